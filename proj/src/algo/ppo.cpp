#include "magaisil/algo/ppo.hpp"

#include <cmath>
#include <numeric>

#include "magaisil/algo/gae.hpp"
#include "magaisil/common/error.hpp"

namespace magaisil::algo {

double categorical_entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

PpoSampleTerms ppo_sample_terms(std::span<const double> logits, world::ActionId action,
                                double old_log_prob, double advantage, double clip_epsilon,
                                double entropy_weight) {
  if (logits.size() != world::kNumActions) throw ContractError("policy logits must have 5 entries");
  const std::vector<double> log_p = nn::log_softmax(logits);
  std::array<double, world::kNumActions> p{};
  for (int i = 0; i < world::kNumActions; ++i) p[i] = std::exp(log_p[i]);
  const int a = world::index_of(action);

  PpoSampleTerms t;
  t.ratio = std::exp(log_p[a] - old_log_prob);
  const double clipped_ratio = std::clamp(t.ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  t.surrogate = std::min(t.ratio * advantage, clipped_ratio * advantage);
  t.clipped = (advantage > 0.0 && t.ratio > 1.0 + clip_epsilon) ||
              (advantage < 0.0 && t.ratio < 1.0 - clip_epsilon);
  t.entropy = 0.0;
  for (int i = 0; i < world::kNumActions; ++i) t.entropy -= p[i] * log_p[i];

  // Surrogate: d(r*A)/dz_j = A * r * (1[j=a] - p_j), zero where clipping binds.
  // Entropy: dH/dz_j = -p_j * (log p_j + H).
  for (int j = 0; j < world::kNumActions; ++j) {
    const double d_surrogate =
        t.clipped ? 0.0 : advantage * t.ratio * ((j == a ? 1.0 : 0.0) - p[j]);
    const double d_entropy = -p[j] * (log_p[j] + t.entropy);
    t.logit_grad[j] = -(d_surrogate + entropy_weight * d_entropy);
  }
  return t;
}

PpoStats ppo_update(AgentLearner& learner, const Trajectory& trajectory, const TrainConfig& config) {
  trajectory.validate();
  PpoStats stats;
  AdvantageEstimate est = compute_gae(trajectory, config.gamma, config.gae_lambda);
  std::vector<double> advantages = est.advantages;
  normalize_advantages(advantages);

  const std::size_t n = trajectory.steps.size();
  const std::size_t batch = std::min<std::size_t>(n, static_cast<std::size_t>(config.minibatch_size));
  std::vector<std::size_t> order(n);

  for (int u = 0; u < config.gen_updates_per_episode; ++u) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (batch < n) {
      for (std::size_t i = 0; i < batch; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(learner.rng)]);
      }
    }

    nn::Gradients policy_grad = learner.policy.zero_gradients();
    nn::Gradients value_grad = learner.value.zero_gradients();
    double policy_loss = 0.0;
    double surrogate = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double kl = 0.0;
    double clipped = 0.0;
    const double inv = 1.0 / static_cast<double>(batch);

    for (std::size_t k = 0; k < batch; ++k) {
      const TrajectoryStep& step = trajectory.steps[order[k]];
      const double adv = advantages[order[k]];
      const nn::Forward pf = learner.policy.forward(step.observation);
      const PpoSampleTerms terms =
          ppo_sample_terms(pf.cache.logits, step.action, step.log_prob, adv, config.clip_epsilon,
                           config.entropy_weight);
      std::array<double, world::kNumActions> g = terms.logit_grad;
      for (double& v : g) v *= inv;
      learner.policy.accumulate_from_logits(pf.cache, g, policy_grad);
      policy_loss -= (terms.surrogate + config.entropy_weight * terms.entropy) * inv;
      surrogate += terms.surrogate * inv;
      entropy += terms.entropy * inv;
      kl += (terms.ratio - 1.0 - std::log(terms.ratio)) * inv;
      clipped += (terms.clipped ? 1.0 : 0.0) * inv;

      const nn::Forward vf = learner.value.forward(step.observation);
      const double err = vf.output[0] - est.returns[order[k]];
      value_loss += 0.5 * err * err * inv;
      learner.value.accumulate_from_logits(vf.cache, std::array{err * inv}, value_grad);
    }

    if (!std::isfinite(policy_loss) || !std::isfinite(value_loss)) {
      stats.aborted = true;
      stats.fault = "non-finite loss at generator update " + std::to_string(u);
      break;
    }
    nn::clip_global_norm(policy_grad, config.max_grad_norm);
    nn::clip_global_norm(value_grad, config.max_grad_norm);
    try {
      nn::adam_step(learner.policy, learner.policy_opt, policy_grad);
      nn::adam_step(learner.value, learner.value_opt, value_grad);
    } catch (const TrainingFault& e) {
      stats.aborted = true;
      stats.fault = e.what();
      break;
    }
    stats.policy_loss += policy_loss;
    stats.surrogate += surrogate;
    stats.value_loss += value_loss;
    stats.entropy += entropy;
    stats.approx_kl += kl;
    stats.clip_fraction += clipped;
    stats.updates += 1;
  }
  if (stats.updates > 0) {
    const double k = 1.0 / stats.updates;
    stats.policy_loss *= k;
    stats.surrogate *= k;
    stats.value_loss *= k;
    stats.entropy *= k;
    stats.approx_kl *= k;
    stats.clip_fraction *= k;
  }
  return stats;
}

}  // namespace magaisil::algo
