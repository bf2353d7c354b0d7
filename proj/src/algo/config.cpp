#include "magaisil/algo/config.hpp"

#include "magaisil/common/error.hpp"

namespace magaisil::algo {

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvariantError("gamma", "must lie in (0, 1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw InvariantError("gae_lambda", "must lie in [0, 1]");
  if (!(clip_epsilon > 0.0)) throw InvariantError("clip_epsilon", "must be positive");
  if (!(entropy_weight >= 0.0)) throw InvariantError("entropy_weight", "must be non-negative");
  if (pair_batch < 1) throw InvariantError("pair_batch", "must be at least 1");
  if (disc_updates_per_episode < 0) throw InvariantError("disc_updates_per_episode", "must be >= 0");
  if (gen_updates_per_episode < 0) throw InvariantError("gen_updates_per_episode", "must be >= 0");
  if (pool_capacity_pairs < 1) throw InvariantError("pool_capacity_pairs", "must be positive");
  if (minibatch_size < 1) throw InvariantError("minibatch_size", "must be positive");
  if (!(policy_lr > 0.0)) throw InvariantError("policy_lr", "must be positive");
  if (!(value_lr > 0.0)) throw InvariantError("value_lr", "must be positive");
  if (!(disc_lr > 0.0)) throw InvariantError("disc_lr", "must be positive");
  if (hidden_sizes.empty()) throw InvariantError("hidden_sizes", "needs at least one layer");
  for (int h : hidden_sizes) {
    if (h < 1) throw InvariantError("hidden_sizes", "must be positive");
  }
  if (max_grad_norm < 0.0) throw InvariantError("max_grad_norm", "must be non-negative");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"gamma", c.gamma},
          {"entropy_weight", c.entropy_weight},
          {"clip_epsilon", c.clip_epsilon},
          {"pair_batch", c.pair_batch},
          {"disc_updates_per_episode", c.disc_updates_per_episode},
          {"gen_updates_per_episode", c.gen_updates_per_episode},
          {"pool_capacity_pairs", c.pool_capacity_pairs},
          {"gae_lambda", c.gae_lambda},
          {"minibatch_size", c.minibatch_size},
          {"policy_lr", c.policy_lr},
          {"value_lr", c.value_lr},
          {"disc_lr", c.disc_lr},
          {"hidden_sizes", c.hidden_sizes},
          {"max_grad_norm", c.max_grad_norm},
          {"oracle_requires_success", c.oracle_requires_success},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw ParseError("train config must be an object");
  const nlohmann::json known = to_json(c);
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ParseError("train config: unknown key '" + key + "'");
  }
  try {
    auto take = [&j](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    take("gamma", c.gamma);
    take("entropy_weight", c.entropy_weight);
    take("clip_epsilon", c.clip_epsilon);
    take("pair_batch", c.pair_batch);
    take("disc_updates_per_episode", c.disc_updates_per_episode);
    take("gen_updates_per_episode", c.gen_updates_per_episode);
    take("pool_capacity_pairs", c.pool_capacity_pairs);
    take("gae_lambda", c.gae_lambda);
    take("minibatch_size", c.minibatch_size);
    take("policy_lr", c.policy_lr);
    take("value_lr", c.value_lr);
    take("disc_lr", c.disc_lr);
    take("hidden_sizes", c.hidden_sizes);
    take("max_grad_norm", c.max_grad_norm);
    take("oracle_requires_success", c.oracle_requires_success);
    take("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace magaisil::algo
