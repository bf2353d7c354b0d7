#include "magaisil/nn/adam.hpp"

#include <cmath>

#include "magaisil/common/error.hpp"

namespace magaisil::nn {

AdamState AdamState::for_net(const Mlp& net, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.first_moment.assign(net.params().size(), 0.0);
  s.second_moment.assign(net.params().size(), 0.0);
  return s;
}

void adam_step(Mlp& net, AdamState& state, const Gradients& grads) {
  const std::size_t n = net.params().size();
  if (grads.values.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw ContractError("adam_step: shape mismatch between net, state and gradients");
  }
  for (double g : grads.values) {
    if (!std::isfinite(g)) throw TrainingFault("non-finite gradient");
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  std::span<double> params = net.mutable_params();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads.values[i];
    state.first_moment[i] = c.beta1 * state.first_moment[i] + (1.0 - c.beta1) * g;
    state.second_moment[i] = c.beta2 * state.second_moment[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.first_moment[i] / correction1;
    const double v_hat = state.second_moment[i] / correction2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

double clip_global_norm(Gradients& grads, double max_norm) {
  const double n = grads.norm();
  if (max_norm > 0.0 && n > max_norm) grads.scale(max_norm / n);
  return n;
}

}  // namespace magaisil::nn
