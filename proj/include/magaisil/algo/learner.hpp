#pragma once

#include <memory>
#include <span>
#include <vector>

#include "magaisil/algo/config.hpp"
#include "magaisil/algo/types.hpp"
#include "magaisil/common/random.hpp"
#include "magaisil/nn/adam.hpp"
#include "magaisil/nn/mlp.hpp"

namespace magaisil::algo {

// Accepted trajectories waiting to replace the demonstration set.
struct TrajectoryPool {
  std::vector<DemoEpisode> trajectories;
  std::size_t total_pairs = 0;
  std::size_t capacity = 2000;
};

// Everything one agent learns with: actor, critic, discriminator, their
// optimizers, the current demonstrations and the self-imitation pool.
struct AgentLearner {
  AgentId agent = AgentId::Leader;
  nn::Mlp policy;
  nn::Mlp value;
  nn::Mlp discriminator;
  nn::AdamState policy_opt;
  nn::AdamState value_opt;
  nn::AdamState disc_opt;
  // Replaced wholesale, never edited in place.
  std::shared_ptr<const DemoSet> demos;
  TrajectoryPool pool;
  Rng rng;

  static AgentLearner create(AgentId agent, const TrainConfig& config,
                             std::shared_ptr<const DemoSet> demos);

  int observation_size() const { return policy.input_size(); }
  // Throws ContractError when network sizes disagree with the agent.
  void validate() const;
};

struct ActionSample {
  world::ActionId action = world::ActionId::Straight;
  double log_prob = 0.0;
  double value = 0.0;
};

// Samples from the categorical policy. Throws TrainingFault on non-finite
// network outputs.
ActionSample select_action(const AgentLearner& learner, std::span<const double> observation,
                           Rng& rng);
ActionSample select_action(AgentLearner& learner, std::span<const double> observation);

// Most probable action (lowest index on ties).
world::ActionId greedy_action(const nn::Mlp& policy, std::span<const double> observation);

std::vector<double> action_probabilities(const nn::Mlp& policy, std::span<const double> observation);

}  // namespace magaisil::algo
