#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "magaisil/algo/config.hpp"
#include "magaisil/algo/episode.hpp"
#include "magaisil/demos/controllers.hpp"

namespace magaisil::service {

enum class JudgeKind { Oracle, Human };
std::string_view to_string(JudgeKind k);
JudgeKind judge_kind_from_string(std::string_view s);

struct SessionConfig {
  algo::Mode mode = algo::Mode::Magail;
  JudgeKind judge = JudgeKind::Oracle;
  std::string task = "task1";  // task name or path to a task file
  algo::TrainConfig train;

  // Demonstration files. When both are empty the scripted controllers record
  // `demo_episodes` episodes of `demo_quality` at session start.
  std::string demos_leader;
  std::string demos_follower;
  demos::DemoQuality demo_quality = demos::DemoQuality::Optimal;
  int demo_episodes = 10;
  std::uint64_t demo_seed = 1;

  int episodes = 1000;
  int checkpoint_interval = 100;  // 0: only the final checkpoint
  double judgment_timeout_s = 120.0;
  std::string out_dir;  // empty: <data dir>/runs/<mode>-<task>-s<seed>

  // HTTP API. Human judging only works with it enabled.
  bool serve = false;
  std::string host = "127.0.0.1";
  int port = 8080;

  // Throws InvariantError naming the offending field. `check_files` also
  // requires the demo files to exist.
  void validate(bool check_files = true) const;
  std::filesystem::path resolved_out_dir() const;
};

// TOML with the same keys as the JSON form below; [train] holds TrainConfig
// fields and [demos] holds leader, follower, quality, episodes, seed.
// Missing keys keep the values from `base`; unknown keys are errors.
SessionConfig parse_session_config(std::string_view toml_text, SessionConfig base = {},
                                   const std::string& origin = "config");
SessionConfig load_session_config(const std::filesystem::path& path, SessionConfig base = {});

nlohmann::json to_json(const SessionConfig& c);
SessionConfig session_config_from_json(const nlohmann::json& j, SessionConfig base = {});

// MAGAISIL_PORT overrides the port.
void apply_env_overrides(SessionConfig& c);

// $MAGAISIL_DATA_DIR, or the working directory.
std::filesystem::path data_dir();

}  // namespace magaisil::service
