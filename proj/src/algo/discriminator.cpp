#include "magaisil/algo/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "magaisil/common/error.hpp"

namespace magaisil::algo {

std::vector<double> discriminator_input(std::span<const double> observation, world::ActionId action) {
  std::vector<double> x(observation.begin(), observation.end());
  x.resize(observation.size() + world::kNumActions, 0.0);
  x[observation.size() + world::index_of(action)] = 1.0;
  return x;
}

double clamp_probability(double d) {
  return std::clamp(d, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

double reward_from_probability(double d) { return -std::log(1.0 - clamp_probability(d)); }

double discriminator_probability(const AgentLearner& learner, std::span<const double> observation,
                                 world::ActionId action) {
  return learner.discriminator.predict(discriminator_input(observation, action))[0];
}

double discriminator_reward(const AgentLearner& learner, std::span<const double> observation,
                            world::ActionId action) {
  return reward_from_probability(discriminator_probability(learner, observation, action));
}

namespace {

// Indices into a source of `size` items: a random subset when size >= n,
// otherwise n draws with replacement.
std::vector<std::size_t> sample_indices(std::size_t size, int n, Rng& rng) {
  std::vector<std::size_t> idx;
  if (size == 0 || n <= 0) return idx;
  if (size >= static_cast<std::size_t>(n)) {
    idx.resize(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: first n entries become the sample.
    for (int i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), size - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(n);
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, size - 1);
    for (int i = 0; i < n; ++i) idx.push_back(pick(rng));
  }
  return idx;
}

}  // namespace

std::vector<StateActionPair> sample_agent_pairs(const Trajectory& trajectory, int n, Rng& rng) {
  std::vector<StateActionPair> out;
  for (std::size_t i : sample_indices(trajectory.steps.size(), n, rng)) {
    out.push_back({trajectory.steps[i].observation, trajectory.steps[i].action});
  }
  return out;
}

std::vector<StateActionPair> sample_expert_pairs(const DemoSet& demos, int n, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> flat;
  for (std::size_t e = 0; e < demos.episodes.size(); ++e) {
    for (std::size_t t = 0; t < demos.episodes[e].actions.size(); ++t) flat.emplace_back(e, t);
  }
  std::vector<StateActionPair> out;
  for (std::size_t i : sample_indices(flat.size(), n, rng)) {
    const auto [e, t] = flat[i];
    out.push_back({demos.episodes[e].observations[t], demos.episodes[e].actions[t]});
  }
  return out;
}

namespace {

DiscriminatorLoss evaluate(const nn::Mlp& disc, std::span<const StateActionPair> agent_pairs,
                           std::span<const StateActionPair> expert_pairs, nn::Gradients* grads) {
  if (agent_pairs.empty()) throw ContractError("discriminator update needs agent pairs");
  if (expert_pairs.empty()) throw ContractError("discriminator update needs expert pairs");
  DiscriminatorLoss loss;
  const double na = static_cast<double>(agent_pairs.size());
  const double ne = static_cast<double>(expert_pairs.size());
  for (const auto& p : agent_pairs) {
    const nn::Forward f = disc.forward(discriminator_input(p.observation, p.action));
    const double d = f.output[0];
    const double dc = clamp_probability(d);
    loss.objective += std::log(dc) / na;
    loss.cross_entropy -= std::log(1.0 - dc) / na;
    loss.agent_mean_d += d / na;
    // d/dz of -log(1 - sigmoid(z)) is sigmoid(z).
    if (grads != nullptr) disc.accumulate_from_logits(f.cache, std::array{d / na}, *grads);
  }
  for (const auto& p : expert_pairs) {
    const nn::Forward f = disc.forward(discriminator_input(p.observation, p.action));
    const double d = f.output[0];
    const double dc = clamp_probability(d);
    loss.objective += std::log(1.0 - dc) / ne;
    loss.cross_entropy -= std::log(dc) / ne;
    loss.expert_mean_d += d / ne;
    // d/dz of -log(sigmoid(z)) is sigmoid(z) - 1.
    if (grads != nullptr) disc.accumulate_from_logits(f.cache, std::array{(d - 1.0) / ne}, *grads);
  }
  return loss;
}

}  // namespace

DiscriminatorLoss discriminator_loss(const nn::Mlp& discriminator,
                                     std::span<const StateActionPair> agent_pairs,
                                     std::span<const StateActionPair> expert_pairs) {
  return evaluate(discriminator, agent_pairs, expert_pairs, nullptr);
}

DiscriminatorLoss update_discriminator(AgentLearner& learner,
                                       std::span<const StateActionPair> agent_pairs,
                                       std::span<const StateActionPair> expert_pairs,
                                       double max_grad_norm) {
  nn::Gradients grads = learner.discriminator.zero_gradients();
  const DiscriminatorLoss loss = evaluate(learner.discriminator, agent_pairs, expert_pairs, &grads);
  if (!std::isfinite(loss.cross_entropy)) throw TrainingFault("non-finite discriminator loss");
  nn::clip_global_norm(grads, max_grad_norm);
  nn::adam_step(learner.discriminator, learner.disc_opt, grads);
  return loss;
}

}  // namespace magaisil::algo
