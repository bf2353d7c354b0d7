#pragma once

#include <string_view>

#include "magaisil/algo/judge.hpp"
#include "magaisil/algo/learner.hpp"

namespace magaisil::algo {

enum class PoolOutcome { Pooled, Replaced, Rejected };
std::string_view to_string(PoolOutcome o);

// Accepted trajectories join the pool; once the pool holds at least
// `capacity` pairs it becomes the new (self-generated) demonstration set
// and is emptied. Rejected trajectories are dropped.
PoolOutcome pool_insert_and_maybe_replace(AgentLearner& learner, const Trajectory& trajectory,
                                          const JudgeDecision& decision,
                                          const std::string& task_id = "");

}  // namespace magaisil::algo
