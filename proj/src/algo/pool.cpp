#include "magaisil/algo/pool.hpp"

#include "magaisil/common/error.hpp"

namespace magaisil::algo {

std::string_view to_string(PoolOutcome o) {
  switch (o) {
    case PoolOutcome::Pooled: return "pooled";
    case PoolOutcome::Replaced: return "replaced";
    case PoolOutcome::Rejected: return "rejected";
  }
  return "?";
}

PoolOutcome pool_insert_and_maybe_replace(AgentLearner& learner, const Trajectory& trajectory,
                                          const JudgeDecision& decision,
                                          const std::string& task_id) {
  if (decision.trajectory_id != trajectory.id || decision.agent != trajectory.agent) {
    throw ContractError("decision does not belong to trajectory " + trajectory.id);
  }
  if (trajectory.agent != learner.agent) throw ContractError("trajectory belongs to another agent");
  if (!decision.accept) return PoolOutcome::Rejected;
  trajectory.validate();

  TrajectoryPool& pool = learner.pool;
  pool.trajectories.push_back(to_demo_episode(trajectory, task_id));
  pool.total_pairs += trajectory.steps.size();
  if (pool.total_pairs < pool.capacity) return PoolOutcome::Pooled;

  auto replacement = std::make_shared<DemoSet>();
  replacement->agent = learner.agent;
  replacement->provenance = Provenance::SelfGenerated;
  replacement->episodes = std::move(pool.trajectories);
  learner.demos = std::move(replacement);
  pool.trajectories.clear();
  pool.total_pairs = 0;
  return PoolOutcome::Replaced;
}

}  // namespace magaisil::algo
