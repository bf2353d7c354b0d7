#pragma once

#include <array>
#include <span>
#include <string_view>

#include "magaisil/world/corridor.hpp"
#include "magaisil/world/sonar.hpp"

namespace magaisil::world {

inline constexpr int kNumActions = 5;
inline constexpr int kLeaderObsDim = 6;
inline constexpr int kFollowerObsDim = 8;

enum class ActionId : int { TurnLeft2 = 0, TurnLeft1 = 1, Straight = 2, TurnRight1 = 3, TurnRight2 = 4 };

ActionId action_from_index(int index);  // throws ContractError outside 0..4
constexpr int index_of(ActionId a) { return static_cast<int>(a); }
std::string_view to_string(ActionId a);

// Horizontal rudder angles in degrees, exactly as commanded to the vehicle.
// Left/right rudders (dive control) are always zero.
struct RudderAngles {
  double upper = 0.0;
  double right = 0.0;
  double lower = 0.0;
  double left = 0.0;
};
RudderAngles rudder_angles(ActionId a);

// Signed yaw deflection in radians; positive turns counter-clockwise (left).
double steering_deflection(ActionId a);

struct LeaderObs {
  SonarScan sonar;
  std::array<double, kLeaderObsDim> to_array() const;
};

struct FollowerObs {
  double spacing = 0.0;            // distance to the leader (m)
  double heading_deviation = 0.0;  // follower heading minus bearing to the leader (rad)
  SonarScan sonar;
  std::array<double, kFollowerObsDim> to_array() const;
};

struct FollowerGeometry {
  double spacing = 0.0;
  double heading_deviation = 0.0;
  bool degenerate = false;  // coincident positions; heading_deviation forced to 0
};

FollowerGeometry follower_geometry(const Pose& leader, const Pose& follower);

enum class TermReason {
  None,
  CollisionLeader,
  CollisionFollower,
  SpacingViolation,
  HeadingViolation,
  GoalReached,
  StepLimit,
};
std::string_view to_string(TermReason r);
TermReason term_reason_from_string(std::string_view s);

// Success is reaching the goal; a step-limit ending is a truncation.
constexpr bool is_failure(TermReason r) {
  return r == TermReason::CollisionLeader || r == TermReason::CollisionFollower ||
         r == TermReason::SpacingViolation || r == TermReason::HeadingViolation;
}

inline constexpr double kCollisionDistance = 2.0;
inline constexpr double kMinSpacing = 3.0;
inline constexpr double kMaxSpacing = 33.0;
inline constexpr double kMaxHeadingDeviation = std::numbers::pi / 3.0;

struct TerminationInputs {
  double leader_distance = kSonarMaxRange;    // d_L
  double follower_distance = kSonarMaxRange;  // d_F
  double spacing = 18.0;
  double heading_deviation = 0.0;
  bool leader_in_free_space = true;
  bool follower_in_free_space = true;
  double progress = 0.0;
  double goal_progress = 0.0;
  int steps = 0;
  int max_steps = 0;
};

// Checks in a fixed order: collisions, spacing, heading, goal, step limit.
TermReason classify_termination(const TerminationInputs& in);

struct StepOutcome {
  LeaderObs leader_obs;
  FollowerObs follower_obs;
  bool done = false;
  TermReason term_reason = TermReason::None;
  double progress = 0.0;  // leader arc length along the centerline
};

struct WorldState {
  Pose leader;
  Pose follower;
  int steps = 0;
  bool done = false;
  TermReason term_reason = TermReason::None;
};

class World {
 public:
  explicit World(Corridor corridor);

  const Corridor& corridor() const { return corridor_; }
  const CorridorGeometry& geometry() const { return geometry_; }

  WorldState reset() const;
  WorldState reset(const Pose& leader, const Pose& follower) const;

  // Observations and termination status of a state, without advancing it.
  StepOutcome observe(const WorldState& state) const;

  // Advances both vehicles by one control period. Throws ContractError when
  // the episode is already over.
  StepOutcome step(WorldState& state, ActionId leader_action, ActionId follower_action) const;

 private:
  Pose advance(const Pose& pose, ActionId action) const;

  Corridor corridor_;
  CorridorGeometry geometry_;
};

}  // namespace magaisil::world
