#include "magaisil/service/metrics.hpp"

#include <cmath>
#include <sstream>

#include "magaisil/common/error.hpp"
#include "magaisil/common/io.hpp"

namespace magaisil::service {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json metrics_record(const algo::EpisodeReport& report, int agent_index) {
  const algo::AgentEpisodeReport& a = report.agents.at(agent_index);
  ordered_json r;
  r["episode"] = report.episode;
  r["agent"] = std::string(algo::to_string(a.agent));
  r["steps"] = a.steps;
  r["term_reason"] = std::string(world::to_string(a.term_reason));
  r["mean_disc_reward"] = a.mean_disc_reward;
  r["mean_eval_reward"] = a.mean_eval_reward;
  r["success"] = a.success;
  r["judged"] = a.judged;
  r["accepted"] = a.accepted;
  r["judge_timed_out"] = a.judge_timed_out;
  r["pool_pairs"] = a.pool_pairs;
  r["demo_provenance"] = std::string(algo::to_string(a.demo_provenance));
  r["replacement"] = a.pool_outcome == algo::PoolOutcome::Replaced;
  r["disc_objective"] = a.disc_loss.objective;
  r["policy_entropy"] = a.ppo.entropy;
  return r;
}

namespace {

double round_cm(double v) { return std::round(v * 100.0) / 100.0; }

ordered_json path_json(const std::vector<world::Vec2>& path) {
  ordered_json out = ordered_json::array();
  for (const world::Vec2& p : path) out.push_back({round_cm(p.x), round_cm(p.y)});
  return out;
}

}  // namespace

ordered_json trajectory_record(int episode, const std::string& task_id, world::TermReason reason,
                               const std::vector<world::Vec2>& leader_path,
                               const std::vector<world::Vec2>& follower_path) {
  ordered_json r;
  r["episode"] = episode;
  r["task_id"] = task_id;
  r["term_reason"] = std::string(world::to_string(reason));
  r["leader"] = path_json(leader_path);
  r["follower"] = path_json(follower_path);
  return r;
}

JsonlLog::JsonlLog(const std::filesystem::path& path, int keep_before_episode) : path_(path) {
  std::string kept;
  if (keep_before_episode > 0 && std::filesystem::exists(path)) {
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = parse_json_text(line, path.string());
      if (j.value("episode", -1) < keep_before_episode) kept += line + '\n';
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  out_ << kept;
  out_.flush();
}

void JsonlLog::append(const ordered_json& record) {
  if (!out_.is_open()) throw ContractError("log is not open");
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed: " + path_.string());
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<json> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(parse_json_text(line, path.string() + ":" + std::to_string(line_no)));
  }
  return out;
}

}  // namespace magaisil::service
