#pragma once

#include <span>
#include <string>
#include <vector>

#include "magaisil/algo/types.hpp"

namespace magaisil::algo {

enum class JudgeSource { Oracle, Human };
std::string_view to_string(JudgeSource s);

struct JudgeDecision {
  std::string trajectory_id;
  AgentId agent = AgentId::Leader;
  bool accept = false;
  JudgeSource source = JudgeSource::Oracle;
  double latency_s = 0.0;
  bool timed_out = false;
};

// One finished trajectory awaiting a verdict, with what a judge needs to
// see it: the demonstrations it competes against and both vehicle paths.
struct JudgeRequest {
  const Trajectory* trajectory = nullptr;
  DemoSummary demo;
  std::span<const world::Vec2> leader_path;
  std::span<const world::Vec2> follower_path;
};

class Judge {
 public:
  virtual ~Judge() = default;
  // Exactly one decision per request, in request order.
  virtual std::vector<JudgeDecision> judge(std::span<const JudgeRequest> requests) = 0;
};

// Accepts iff the trajectory's mean per-step evaluation reward strictly
// exceeds the demonstrations' mean (and, if required, the episode reached
// the goal).
JudgeDecision oracle_decision(const Trajectory& trajectory, const DemoSummary& demo,
                              bool require_success);

class OracleJudge : public Judge {
 public:
  explicit OracleJudge(bool require_success = true) : require_success_(require_success) {}
  std::vector<JudgeDecision> judge(std::span<const JudgeRequest> requests) override;

 private:
  bool require_success_;
};

}  // namespace magaisil::algo
