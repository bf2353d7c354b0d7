#pragma once

#include <span>

#include "magaisil/world/world.hpp"

namespace magaisil::world {

// Distance from walls that keeps a vehicle centered in the 30 m pipe.
inline constexpr double kSafeDistance = 17.3;
inline constexpr double kSafeDistanceScale = 8.65;
inline constexpr double kTargetSpacing = 18.0;
inline constexpr double kSpacingScale = 15.0;

// Evaluation-only rewards. Nothing in the training path takes gradients
// through these.
double eval_reward_leader(double leader_distance);
double eval_reward_follower(double spacing, double heading_deviation, double follower_distance);

double eval_reward(const LeaderObs& obs);
double eval_reward(const FollowerObs& obs);

// Same rewards from flat observation vectors (6 = leader, 8 = follower).
double eval_reward_from_vector(std::span<const double> obs);

}  // namespace magaisil::world
