#include "magaisil/world/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "magaisil/common/error.hpp"

namespace magaisil::world {

double eval_reward_leader(double leader_distance) {
  return 1.0 - std::abs(leader_distance - kSafeDistance) / kSafeDistanceScale;
}

double eval_reward_follower(double spacing, double heading_deviation, double follower_distance) {
  const double tracking = -(std::abs(heading_deviation) * 3.0 / std::numbers::pi) +
                          std::abs(1.0 - std::abs(spacing - kTargetSpacing) / kSpacingScale);
  const double avoidance = eval_reward_leader(follower_distance);
  return 0.5 * tracking + 0.5 * avoidance;
}

double eval_reward(const LeaderObs& obs) { return eval_reward_leader(obs.sonar.min()); }

double eval_reward(const FollowerObs& obs) {
  return eval_reward_follower(obs.spacing, obs.heading_deviation, obs.sonar.min());
}

double eval_reward_from_vector(std::span<const double> obs) {
  if (obs.size() == kLeaderObsDim) {
    return eval_reward_leader(*std::min_element(obs.begin(), obs.end()));
  }
  if (obs.size() == kFollowerObsDim) {
    const double d = *std::min_element(obs.begin() + 2, obs.end());
    return eval_reward_follower(obs[0], obs[1], d);
  }
  throw ContractError("observation must have 6 or 8 entries");
}

}  // namespace magaisil::world
