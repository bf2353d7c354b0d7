#include "magaisil/algo/gae.hpp"

#include <cmath>

#include "magaisil/common/error.hpp"

namespace magaisil::algo {

AdvantageEstimate compute_gae(std::span<const double> rewards, std::span<const double> values,
                              double bootstrap_value, double gamma, double lambda) {
  if (rewards.size() != values.size()) throw ContractError("rewards and values differ in length");
  const std::size_t n = rewards.size();
  AdvantageEstimate out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  double next_value = bootstrap_value;
  for (std::size_t t = n; t-- > 0;) {
    const double delta = rewards[t] + gamma * next_value - values[t];
    running = delta + gamma * lambda * running;
    out.advantages[t] = running;
    out.returns[t] = running + values[t];
    next_value = values[t];
  }
  return out;
}

AdvantageEstimate compute_gae(const Trajectory& trajectory, double gamma, double lambda) {
  std::vector<double> rewards;
  std::vector<double> values;
  rewards.reserve(trajectory.steps.size());
  values.reserve(trajectory.steps.size());
  for (const auto& s : trajectory.steps) {
    rewards.push_back(s.disc_reward);
    values.push_back(s.value);
  }
  return compute_gae(rewards, values, trajectory.bootstrap_value, gamma, lambda);
}

void normalize_advantages(std::vector<double>& advantages) {
  if (advantages.empty()) return;
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= static_cast<double>(advantages.size());
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(advantages.size());
  const double scale = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& a : advantages) a = (a - mean) * scale;
}

}  // namespace magaisil::algo
