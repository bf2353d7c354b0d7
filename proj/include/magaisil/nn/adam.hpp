#pragma once

#include <cstdint>
#include <vector>

#include "magaisil/nn/mlp.hpp"

namespace magaisil::nn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step = 0;

  static AdamState for_net(const Mlp& net, AdamConfig config);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update. Throws TrainingFault on a non-finite
// gradient, leaving both net and state untouched.
void adam_step(Mlp& net, AdamState& state, const Gradients& grads);

// Rescales so the global L2 norm is at most `max_norm`; returns the norm
// before clipping.
double clip_global_norm(Gradients& grads, double max_norm);

}  // namespace magaisil::nn
