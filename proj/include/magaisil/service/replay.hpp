#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "magaisil/world/corridor.hpp"

namespace magaisil::service {

struct ReplayPaths {
  int episode = 0;
  std::string task_id;
  std::string term_reason;
  std::vector<world::Vec2> leader;
  std::vector<world::Vec2> follower;
};

// trajectories.jsonl as written by training and evaluation.
std::vector<ReplayPaths> read_trajectory_file(const std::filesystem::path& path);

// The record for `episode`, or the last record when `episode` < 0.
const ReplayPaths& select_episode(const std::vector<ReplayPaths>& records, int episode);

// Corridor walls, obstacles and goal line, plus one leader and one follower
// polyline per record. Output depends only on the inputs.
std::string render_svg(const world::Corridor& corridor, std::span<const ReplayPaths> records);

}  // namespace magaisil::service
