#pragma once
// Independent reference computations the library is checked against. None
// of these call into the code under test beyond what the oracle needs.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "magaisil/nn/mlp.hpp"
#include "magaisil/world/corridor.hpp"

namespace oracle {

// Discounted sums written as the textbook double loop:
// A_t = sum_{k>=t} (gamma*lambda)^(k-t) * (r_k + gamma*V_{k+1} - V_k).
inline std::vector<double> gae_double_loop(const std::vector<double>& r, const std::vector<double>& v,
                                           double bootstrap, double gamma, double lambda) {
  const std::size_t n = r.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t k = t; k < n; ++k) {
      const double next_v = k + 1 < n ? v[k + 1] : bootstrap;
      const double delta = r[k] + gamma * next_v - v[k];
      acc += std::pow(gamma * lambda, static_cast<double>(k - t)) * delta;
    }
    adv[t] = acc;
  }
  return adv;
}

// Mean over 100-beam sectors of the analytic distance from (x, y) to the
// walls y = +-half_width, for beams at heading-relative angles
// pi/3 - k*(2pi/3)/599, clamped to max_range.
inline std::vector<double> straight_corridor_sectors(double y, double heading, double half_width,
                                                     double max_range = 33.0) {
  std::vector<double> sectors(6, max_range);
  for (int k = 0; k < 600; ++k) {
    const double phi = heading + std::numbers::pi / 3.0 - k * (2.0 * std::numbers::pi / 3.0) / 599.0;
    const double s = std::sin(phi);
    double d = max_range;
    if (s > 1e-12) d = (half_width - y) / s;
    if (s < -1e-12) d = (-half_width - y) / s;
    d = std::min(d, max_range);
    sectors[k / 100] = std::min(sectors[k / 100], d);
  }
  return sectors;
}

// Central finite differences of loss(net) over every parameter.
template <typename Loss>
std::vector<double> numeric_gradient(magaisil::nn::Mlp net, Loss loss, double h = 1e-5) {
  std::vector<double> out(net.params().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double keep = net.params()[i];
    net.mutable_params()[i] = keep + h;
    const double up = loss(net);
    net.mutable_params()[i] = keep - h;
    const double down = loss(net);
    net.mutable_params()[i] = keep;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

// Worst per-parameter relative error, with a small absolute floor so that
// near-zero components compare on absolute terms.
inline double max_relative_error(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-4});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

struct GradCheck {
  double worst_relative_error = 0.0;
  std::size_t params = 0;
};

// Random net of the given head; scalar loss sum_i c_i * output_i with
// random c. Compares Mlp::backward with finite differences.
inline GradCheck check_mlp_gradient(magaisil::nn::Head head, std::uint64_t seed) {
  using namespace magaisil;
  Rng rng(seed);
  const int outputs = head == nn::Head::Softmax ? 5 : 1;
  nn::Mlp net = nn::Mlp::orthogonal({7, 9, 8, outputs}, head, 1.0, rng);
  std::normal_distribution<double> gauss(0.0, 0.3);
  for (double& p : net.mutable_params()) p += gauss(rng);
  std::vector<double> input(7), coeff(outputs);
  for (double& x : input) x = gauss(rng) * 3.0;
  for (double& c : coeff) c = gauss(rng) * 3.0;
  auto loss = [&](const nn::Mlp& n) {
    const std::vector<double> out = n.predict(input);
    double s = 0.0;
    for (int i = 0; i < outputs; ++i) s += coeff[i] * out[i];
    return s;
  };
  const nn::Forward fw = net.forward(input);
  const nn::Gradients analytic = net.backward(fw.cache, coeff);
  const std::vector<double> numeric = numeric_gradient(net, loss);
  return {max_relative_error(analytic.values, numeric), numeric.size()};
}

// Straight 30 m pipe along the x axis; the goal defaults to the far end.
inline std::string straight_corridor_toml(double half_length = 300.0, double goal = -1.0) {
  const std::string l = std::to_string(half_length);
  const double g = goal < 0 ? 2 * half_length : goal;
  return "task_id = \"straight\"\nwidth = 30.0\ngoal_progress = " + std::to_string(g) +
         "\ncenterline = [[-" + l + ", 0.0], [" + l + ", 0.0]]\n";
}

}  // namespace oracle
