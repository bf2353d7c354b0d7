#include "magaisil/algo/judge.hpp"

#include "magaisil/common/error.hpp"

namespace magaisil::algo {

std::string_view to_string(JudgeSource s) { return s == JudgeSource::Oracle ? "oracle" : "human"; }

JudgeDecision oracle_decision(const Trajectory& trajectory, const DemoSummary& demo,
                              bool require_success) {
  if (trajectory.terminal_reason == world::TermReason::None) {
    throw ContractError("trajectory " + trajectory.id + " has not finished");
  }
  JudgeDecision d;
  d.trajectory_id = trajectory.id;
  d.agent = trajectory.agent;
  d.source = JudgeSource::Oracle;
  d.accept = trajectory.mean_eval_reward() > demo.mean_eval_reward &&
             (!require_success || trajectory.succeeded());
  return d;
}

std::vector<JudgeDecision> OracleJudge::judge(std::span<const JudgeRequest> requests) {
  std::vector<JudgeDecision> out;
  out.reserve(requests.size());
  for (const JudgeRequest& r : requests) {
    out.push_back(oracle_decision(*r.trajectory, r.demo, require_success_));
  }
  return out;
}

}  // namespace magaisil::algo
