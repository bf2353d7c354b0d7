#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "magaisil/algo/episode.hpp"

namespace magaisil::service {

// One record per episode per agent, keys in a fixed order so identical runs
// produce identical bytes.
nlohmann::ordered_json metrics_record(const algo::EpisodeReport& report, int agent_index);

// Paths rounded to centimetres; enough for rendering, and keeps long runs small.
nlohmann::ordered_json trajectory_record(int episode, const std::string& task_id,
                                         world::TermReason reason,
                                         const std::vector<world::Vec2>& leader_path,
                                         const std::vector<world::Vec2>& follower_path);

// Append-only JSONL file flushed after every line. Opening with
// `keep_before_episode` > 0 keeps the existing records of earlier episodes
// (resume) and drops the rest; otherwise the file starts empty.
class JsonlLog {
 public:
  JsonlLog() = default;
  JsonlLog(const std::filesystem::path& path, int keep_before_episode);

  void append(const nlohmann::ordered_json& record);
  const std::filesystem::path& path() const { return path_; }
  bool is_open() const { return out_.is_open(); }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

}  // namespace magaisil::service
