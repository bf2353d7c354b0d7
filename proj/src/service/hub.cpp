#include "magaisil/service/hub.hpp"

#include <algorithm>

namespace magaisil::service {

using nlohmann::json;

namespace {

json path_json(const std::vector<world::Vec2>& path) {
  json out = json::array();
  for (const world::Vec2& p : path) out.push_back({p.x, p.y});
  return out;
}

double unix_now() {
  return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
}

}  // namespace

json to_json(const PendingJudgment& p) {
  return {{"trajectory_id", p.trajectory_id},
          {"agent", std::string(algo::to_string(p.agent))},
          {"episode", p.episode},
          {"term_reason", p.term_reason},
          {"leader_path", path_json(p.leader_path)},
          {"follower_path", path_json(p.follower_path)},
          {"eval_rewards", p.eval_rewards},
          {"mean_eval_reward", p.mean_eval_reward},
          {"demo",
           {{"mean_eval_reward", p.demo.mean_eval_reward},
            {"provenance", std::string(algo::to_string(p.demo.provenance))},
            {"pairs", p.demo.pairs}}},
          {"created_at", p.created_at}};
}

std::vector<world::Vec2> downsample(std::span<const world::Vec2> path, std::size_t max_points) {
  if (path.size() <= max_points || max_points < 2) return {path.begin(), path.end()};
  std::vector<world::Vec2> out;
  out.reserve(max_points);
  const double stride = static_cast<double>(path.size() - 1) / static_cast<double>(max_points - 1);
  for (std::size_t i = 0; i < max_points; ++i) {
    out.push_back(path[static_cast<std::size_t>(std::lround(stride * static_cast<double>(i)))]);
  }
  return out;
}

void SessionHub::set_status(json status) {
  {
    std::lock_guard lock(mu_);
    status_ = std::move(status);
  }
}

json SessionHub::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

void SessionHub::set_task(json task) {
  std::lock_guard lock(mu_);
  task_ = std::move(task);
}

json SessionHub::task() const {
  std::lock_guard lock(mu_);
  return task_;
}

void SessionHub::add_metrics(const json& record) {
  std::lock_guard lock(mu_);
  metrics_.push_back(record);
}

json SessionHub::metrics_after(int episode) const {
  std::lock_guard lock(mu_);
  json out = json::array();
  for (const json& r : metrics_) {
    if (r.value("episode", -1) > episode) out.push_back(r);
  }
  return out;
}

void SessionHub::publish(std::string type, std::string data) {
  {
    std::lock_guard lock(mu_);
    events_.push_back({next_seq_++, std::move(type), std::move(data)});
    if (events_.size() > kMaxEvents) events_.pop_front();
  }
  cv_.notify_all();
}

std::vector<HubEvent> SessionHub::events_after(std::uint64_t after, std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, wait, [&] { return closed_ || next_seq_ - 1 > after; });
  std::vector<HubEvent> out;
  for (const HubEvent& e : events_) {
    if (e.seq > after) out.push_back(e);
  }
  return out;
}

void SessionHub::post_pending(std::vector<PendingJudgment> pending) {
  {
    std::lock_guard lock(mu_);
    for (const PendingJudgment& p : pending) decisions_.emplace(p.trajectory_id, std::nullopt);
    pending_ = std::move(pending);
  }
  cv_.notify_all();
}

std::vector<PendingJudgment> SessionHub::pending() const {
  std::lock_guard lock(mu_);
  return pending_;
}

SessionHub::Submit SessionHub::submit(const std::string& trajectory_id, bool accept) {
  {
    std::lock_guard lock(mu_);
    const auto it = decisions_.find(trajectory_id);
    if (it == decisions_.end()) return Submit::Unknown;
    if (it->second.has_value()) return Submit::AlreadyDecided;
    it->second = accept;
    std::erase_if(pending_, [&](const PendingJudgment& p) { return p.trajectory_id == trajectory_id; });
  }
  cv_.notify_all();
  return Submit::Recorded;
}

std::optional<bool> SessionHub::await_decision(const std::string& trajectory_id,
                                               std::chrono::steady_clock::time_point deadline) {
  std::unique_lock lock(mu_);
  const auto it = decisions_.find(trajectory_id);
  if (it == decisions_.end()) return std::nullopt;
  cv_.wait_until(lock, deadline, [&] { return closed_ || it->second.has_value(); });
  if (!it->second.has_value()) {
    // Timed out (or shut down): record the rejection so a late POST conflicts.
    it->second = false;
    std::erase_if(pending_, [&](const PendingJudgment& p) { return p.trajectory_id == trajectory_id; });
    return std::nullopt;
  }
  return it->second;
}

std::optional<bool> SessionHub::decision_for(const std::string& trajectory_id) const {
  std::lock_guard lock(mu_);
  const auto it = decisions_.find(trajectory_id);
  if (it == decisions_.end()) return std::nullopt;
  return it->second;
}

void SessionHub::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool SessionHub::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::vector<algo::JudgeDecision> HumanJudge::judge(std::span<const algo::JudgeRequest> requests) {
  const double now = unix_now();
  std::vector<PendingJudgment> pending;
  for (const algo::JudgeRequest& req : requests) {
    const algo::Trajectory& t = *req.trajectory;
    PendingJudgment p;
    p.trajectory_id = t.id;
    p.agent = t.agent;
    p.episode = t.episode;
    p.term_reason = std::string(world::to_string(t.terminal_reason));
    p.leader_path = downsample(req.leader_path, 300);
    p.follower_path = downsample(req.follower_path, 300);
    for (const algo::TrajectoryStep& s : t.steps) p.eval_rewards.push_back(s.eval_reward);
    p.mean_eval_reward = t.mean_eval_reward();
    p.demo = req.demo;
    p.created_at = now;
    pending.push_back(std::move(p));
  }
  json listing = json::array();
  for (const PendingJudgment& p : pending) listing.push_back(to_json(p));
  hub_.post_pending(pending);
  hub_.publish("pending", listing.dump());

  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(timeout_s_));
  std::vector<algo::JudgeDecision> out;
  for (const algo::JudgeRequest& req : requests) {
    const std::optional<bool> verdict = hub_.await_decision(req.trajectory->id, deadline);
    algo::JudgeDecision d;
    d.trajectory_id = req.trajectory->id;
    d.agent = req.trajectory->agent;
    d.source = algo::JudgeSource::Human;
    d.accept = verdict.value_or(false);
    d.timed_out = !verdict.has_value();
    d.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(d);
  }
  return out;
}

}  // namespace magaisil::service
