#pragma once

#include <cstdint>
#include <filesystem>

#include "magaisil/algo/types.hpp"
#include "magaisil/demos/controllers.hpp"
#include "magaisil/world/corridor.hpp"

namespace magaisil::demos {

// Controller seed for one agent in a recorded episode.
std::uint64_t controller_seed(std::uint64_t episode_seed, algo::AgentId agent);

struct RecordedDemos {
  algo::DemoSet leader;
  algo::DemoSet follower;
  DemoQuality quality = DemoQuality::Optimal;
  int attempts = 0;
  int completed = 0;

  double leader_mean_eval() const { return leader.mean_eval_reward(); }
  double follower_mean_eval() const { return follower.mean_eval_reward(); }
};

// Runs the scripted pair until `episodes` of them reach the goal, trying at
// most `episodes * attempt_factor` times. Only goal-reaching episodes are
// kept. Throws Error when none completes.
RecordedDemos record_demos(const world::Corridor& task, DemoQuality quality, int episodes,
                           std::uint64_t seed, int attempt_factor = 20);

struct DemoFiles {
  std::filesystem::path leader;
  std::filesystem::path follower;
};

// <out_dir>/<task>_<quality>_{leader,follower}.jsonl
DemoFiles write_recorded_demos(const RecordedDemos& demos, const std::filesystem::path& out_dir,
                               const std::string& task_id);

}  // namespace magaisil::demos
