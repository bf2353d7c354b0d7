#pragma once

#include <array>
#include <span>
#include <string>

#include "magaisil/algo/config.hpp"
#include "magaisil/algo/learner.hpp"

namespace magaisil::algo {

// Per-sample pieces of the clipped surrogate objective.
struct PpoSampleTerms {
  double ratio = 1.0;
  double surrogate = 0.0;  // min(r*A, clip(r, 1-eps, 1+eps)*A)
  double entropy = 0.0;
  bool clipped = false;
  // d/dlogits of the per-sample loss -(surrogate + entropy_weight * entropy).
  std::array<double, world::kNumActions> logit_grad{};
};

PpoSampleTerms ppo_sample_terms(std::span<const double> logits, world::ActionId action,
                                double old_log_prob, double advantage, double clip_epsilon,
                                double entropy_weight);

double categorical_entropy(std::span<const double> probabilities);

struct PpoStats {
  double policy_loss = 0.0;  // mean over updates of -(surrogate + lambda * entropy)
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  int updates = 0;
  bool aborted = false;
  std::string fault;
};

// The configured number of generator updates on one episode: each samples a
// minibatch (the whole episode when it fits), takes one Adam step on the
// policy and one on the value network. Advantages come from GAE on the
// discriminator rewards and are normalized per episode. A non-finite loss
// stops the remaining updates and is reported in the stats.
PpoStats ppo_update(AgentLearner& learner, const Trajectory& trajectory, const TrainConfig& config);

}  // namespace magaisil::algo
