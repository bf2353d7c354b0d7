#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "magaisil/algo/episode.hpp"
#include "magaisil/service/hub.hpp"
#include "magaisil/service/metrics.hpp"
#include "magaisil/service/session_config.hpp"
#include "magaisil/world/world.hpp"

namespace magaisil::service {

inline constexpr int kSessionCheckpointVersion = 1;

struct SessionSummary {
  int episodes_completed = 0;
  int replacements = 0;
  std::array<int, algo::kNumAgents> accepted{};
  // Mean eval reward and success rate over the last (up to) 50 episodes.
  std::array<double, algo::kNumAgents> final_mean_eval{};
  double final_success_rate = 0.0;
  bool aborted = false;
  std::string fault;
  std::filesystem::path out_dir;
  std::filesystem::path metrics_path;
  std::filesystem::path checkpoint_path;
};

nlohmann::json to_json(const SessionSummary& s);

// Geometry the UI draws: centerline, walls and obstacle outlines.
nlohmann::json task_json(const world::Corridor& corridor);

class Session {
 public:
  // Fresh session: loads the task and demonstrations (recording them with
  // the scripted controllers when no files are configured).
  explicit Session(SessionConfig config);

  // Restores a session from a checkpoint file. `episodes` > 0 replaces the
  // configured total.
  static Session resume(const std::filesystem::path& checkpoint, int episodes = 0);

  // Trains until the configured episode count, `stop` is set, or a
  // training fault. Writes metrics.jsonl and trajectories.jsonl under the
  // output directory, plus checkpoint.json every checkpoint interval and at
  // the end. `hub` (optional) receives status, metrics and events; it is
  // required in human-judge mode.
  using EpisodeCallback = std::function<void(const algo::EpisodeReport&)>;
  SessionSummary run(SessionHub* hub = nullptr, const std::atomic<bool>* stop = nullptr,
                     const EpisodeCallback& on_episode = {});

  void save_checkpoint(const std::filesystem::path& path) const;

  const SessionConfig& config() const { return config_; }
  const world::World& world() const { return *world_; }
  const algo::Learners& learners() const { return learners_; }
  int episodes_completed() const { return episodes_completed_; }

 private:
  Session() = default;
  nlohmann::json status_json(const char* state) const;

  SessionConfig config_;
  std::unique_ptr<world::World> world_;
  algo::Learners learners_;
  int episodes_completed_ = 0;
};

// Networks, optimizers, demonstrations, pool and RNG of both agents.
nlohmann::json learners_to_json(const algo::Learners& learners);
algo::Learners learners_from_json(const nlohmann::json& j, const algo::TrainConfig& config);

// Reads only the two policies from a session checkpoint, checking their
// input sizes against the agents.
std::array<nn::Mlp, algo::kNumAgents> load_policies(const std::filesystem::path& checkpoint);

}  // namespace magaisil::service
