#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace magaisil::algo {

struct TrainConfig {
  double gamma = 0.99;
  double entropy_weight = 0.01;  // lambda on the per-step policy entropy bonus
  double clip_epsilon = 0.09;
  int pair_batch = 256;  // N state-action pairs per side per discriminator update
  int disc_updates_per_episode = 3;
  int gen_updates_per_episode = 9;
  int pool_capacity_pairs = 2000;
  double gae_lambda = 0.95;
  int minibatch_size = 256;  // generator minibatch drawn from the episode
  double policy_lr = 3e-4;
  double value_lr = 3e-4;
  double disc_lr = 1e-3;
  std::vector<int> hidden_sizes{64, 64};
  double max_grad_norm = 0.0;  // 0 disables clipping
  // Oracle judge also requires the episode to reach the goal.
  bool oracle_requires_success = true;
  std::uint64_t seed = 0;

  // Throws InvariantError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
// Missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace magaisil::algo
