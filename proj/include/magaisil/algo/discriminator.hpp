#pragma once

#include <span>
#include <vector>

#include "magaisil/algo/learner.hpp"

namespace magaisil::algo {

inline constexpr double kProbabilityFloor = 1e-6;

struct StateActionPair {
  std::vector<double> observation;
  world::ActionId action = world::ActionId::Straight;
};

// Observation followed by the one-hot action.
std::vector<double> discriminator_input(std::span<const double> observation, world::ActionId action);

double clamp_probability(double d);

// -log(1 - D) with D clamped to [1e-6, 1 - 1e-6].
double reward_from_probability(double d);

double discriminator_probability(const AgentLearner& learner, std::span<const double> observation,
                                 world::ActionId action);
double discriminator_reward(const AgentLearner& learner, std::span<const double> observation,
                            world::ActionId action);

// N pairs drawn uniformly; with replacement only when the source is smaller
// than N.
std::vector<StateActionPair> sample_agent_pairs(const Trajectory& trajectory, int n, Rng& rng);
std::vector<StateActionPair> sample_expert_pairs(const DemoSet& demos, int n, Rng& rng);

struct DiscriminatorLoss {
  // E_agent[log D] + E_expert[log(1 - D)], evaluated before the step.
  double objective = 0.0;
  // Cross-entropy actually descended: -E_agent[log(1 - D)] - E_expert[log D].
  double cross_entropy = 0.0;
  double agent_mean_d = 0.0;
  double expert_mean_d = 0.0;
};

// Computes both losses on the current discriminator without updating it.
DiscriminatorLoss discriminator_loss(const nn::Mlp& discriminator,
                                     std::span<const StateActionPair> agent_pairs,
                                     std::span<const StateActionPair> expert_pairs);

// One Adam step pushing D toward 0 on agent pairs and toward 1 on expert
// pairs. Throws ContractError if either side is empty.
DiscriminatorLoss update_discriminator(AgentLearner& learner,
                                       std::span<const StateActionPair> agent_pairs,
                                       std::span<const StateActionPair> expert_pairs,
                                       double max_grad_norm = 0.0);

}  // namespace magaisil::algo
