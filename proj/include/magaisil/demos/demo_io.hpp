#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "magaisil/algo/types.hpp"

namespace magaisil::demos {

inline constexpr int kDemoFormatVersion = 1;

// Line-delimited JSON. First line: {"format": "magaisil-demos", "version": 1}.
// Then one episode per line:
// {agent, provenance, obs: [[...]], actions: [int...], task_id, seed}.
std::string serialize_demos(const algo::DemoSet& demos);
algo::DemoSet parse_demos(std::string_view text, const std::string& origin = "demo file");

nlohmann::json demo_episode_to_json(const algo::DemoEpisode& episode);
algo::DemoEpisode demo_episode_from_json(const nlohmann::json& j);

// Whole set as one JSON object: {agent, provenance, episodes: [...]}.
nlohmann::json demo_set_to_json(const algo::DemoSet& demos);
algo::DemoSet demo_set_from_json(const nlohmann::json& j);

void write_demo_file(const std::filesystem::path& path, const algo::DemoSet& demos);
algo::DemoSet read_demo_file(const std::filesystem::path& path);

}  // namespace magaisil::demos
