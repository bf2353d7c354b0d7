#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "magaisil/algo/types.hpp"
#include "magaisil/nn/mlp.hpp"
#include "magaisil/world/world.hpp"

namespace magaisil::service {

struct EvalEpisode {
  int index = 0;
  world::TermReason term_reason = world::TermReason::None;
  int steps = 0;
  bool success = false;
  double leader_mean_reward = 0.0;
  double follower_mean_reward = 0.0;
  double mean_abs_heading_deviation = 0.0;
  double mean_spacing = 0.0;
  // Per-step series for plotting: leader's nearest sonar return, follower
  // spacing and heading deviation.
  std::vector<double> leader_distance;
  std::vector<double> spacing;
  std::vector<double> heading_deviation;
  std::vector<world::Vec2> leader_path;
  std::vector<world::Vec2> follower_path;
};

struct EvalReport {
  std::string task_id;
  std::uint64_t seed = 0;
  std::vector<EvalEpisode> episodes;
  double success_rate = 0.0;
  double leader_mean_reward = 0.0;
  double follower_mean_reward = 0.0;
};

// Start poses for evaluation episode `index`: the task's default starts
// shifted sideways by up to `lateral` metres and turned by up to
// `heading` radians, drawn from `seed`. Greedy policies are deterministic,
// so this is what makes evaluation episodes differ.
world::WorldState eval_start(const world::World& world, std::uint64_t seed, int index,
                             double lateral = 1.0, double heading = 0.05);

// Greedy (argmax) rollouts of both policies.
EvalReport evaluate(const std::array<nn::Mlp, algo::kNumAgents>& policies, const world::World& world,
                    int episodes, std::uint64_t seed);

nlohmann::ordered_json to_json(const EvalReport& report, bool include_series);

}  // namespace magaisil::service
