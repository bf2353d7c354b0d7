#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magaisil/algo/judge.hpp"

namespace magaisil::service {

// What the human trainer sees for one agent's trajectory.
struct PendingJudgment {
  std::string trajectory_id;
  algo::AgentId agent = algo::AgentId::Leader;
  int episode = 0;
  std::string term_reason;
  std::vector<world::Vec2> leader_path;  // downsampled
  std::vector<world::Vec2> follower_path;
  std::vector<double> eval_rewards;  // advisory overlay, one per step
  double mean_eval_reward = 0.0;
  algo::DemoSummary demo;
  double created_at = 0.0;  // unix seconds
};

nlohmann::json to_json(const PendingJudgment& p);

// Keeps at most `max_points` points, always including both ends.
std::vector<world::Vec2> downsample(std::span<const world::Vec2> path, std::size_t max_points);

struct HubEvent {
  std::uint64_t seq = 0;
  std::string type;  // "episode", "replacement", "pending", "status"
  std::string data;  // JSON text
};

// State shared between the training worker (the only writer of session
// state) and the API handlers (readers, plus judgment submissions).
class SessionHub {
 public:
  void set_status(nlohmann::json status);
  nlohmann::json status() const;
  void set_task(nlohmann::json task);
  nlohmann::json task() const;

  void add_metrics(const nlohmann::json& record);
  // Records of episodes strictly after `episode`, in log order.
  nlohmann::json metrics_after(int episode) const;

  void publish(std::string type, std::string data);
  // Events with seq > `after`. Waits up to `wait` when there are none yet.
  std::vector<HubEvent> events_after(std::uint64_t after, std::chrono::milliseconds wait) const;

  void post_pending(std::vector<PendingJudgment> pending);
  std::vector<PendingJudgment> pending() const;

  enum class Submit { Recorded, Unknown, AlreadyDecided };
  Submit submit(const std::string& trajectory_id, bool accept);
  // Decision for a pending trajectory, or nullopt once `deadline` passes
  // (the trajectory then counts as decided, so late submissions conflict).
  std::optional<bool> await_decision(const std::string& trajectory_id,
                                     std::chrono::steady_clock::time_point deadline);
  // Previously decided trajectory, if any.
  std::optional<bool> decision_for(const std::string& trajectory_id) const;

  // Wakes every waiter; later waits return immediately.
  void close();
  bool closed() const;

 private:
  static constexpr std::size_t kMaxEvents = 4096;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  nlohmann::json status_ = nlohmann::json::object();
  nlohmann::json task_ = nlohmann::json::object();
  std::vector<nlohmann::json> metrics_;
  std::deque<HubEvent> events_;
  std::uint64_t next_seq_ = 1;
  std::vector<PendingJudgment> pending_;
  std::map<std::string, std::optional<bool>> decisions_;  // nullopt: undecided
  bool closed_ = false;
};

// Blocks the training worker until the trainer judges both trajectories or
// the timeout passes; a timeout counts as a rejection.
class HumanJudge : public algo::Judge {
 public:
  HumanJudge(SessionHub& hub, double timeout_s) : hub_(hub), timeout_s_(timeout_s) {}
  std::vector<algo::JudgeDecision> judge(std::span<const algo::JudgeRequest> requests) override;

 private:
  SessionHub& hub_;
  double timeout_s_;
};

}  // namespace magaisil::service
