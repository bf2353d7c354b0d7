#include "magaisil/world/world.hpp"

#include <algorithm>
#include <cmath>

#include "magaisil/common/error.hpp"

namespace magaisil::world {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Floor applied to sonar ranges of a pose outside free space.
constexpr double kContactRange = 1e-6;

struct AgentSense {
  SonarScan sonar;
  bool free = true;
};

AgentSense sense(const CorridorGeometry& g, const Pose& pose) {
  AgentSense s;
  s.free = in_free_space(g, pose.position());
  s.sonar = cast_sonar(g, pose);
  for (double& v : s.sonar.sector_min) v = std::max(v, kContactRange);
  return s;
}

}  // namespace

ActionId action_from_index(int index) {
  if (index < 0 || index >= kNumActions) {
    throw ContractError("action index out of range: " + std::to_string(index));
  }
  return static_cast<ActionId>(index);
}

std::string_view to_string(ActionId a) {
  switch (a) {
    case ActionId::TurnLeft2: return "turn-left-2";
    case ActionId::TurnLeft1: return "turn-left-1";
    case ActionId::Straight: return "straight";
    case ActionId::TurnRight1: return "turn-right-1";
    case ActionId::TurnRight2: return "turn-right-2";
  }
  return "?";
}

RudderAngles rudder_angles(ActionId a) {
  switch (a) {
    case ActionId::TurnLeft2: return {-20.0, 0.0, 20.0, 0.0};
    case ActionId::TurnLeft1: return {-14.0, 0.0, 14.0, 0.0};
    case ActionId::Straight: return {};
    case ActionId::TurnRight1: return {14.0, 0.0, -14.0, 0.0};
    case ActionId::TurnRight2: return {20.0, 0.0, -20.0, 0.0};
  }
  return {};
}

double steering_deflection(ActionId a) { return -rudder_angles(a).upper * kDeg; }

std::array<double, kLeaderObsDim> LeaderObs::to_array() const { return sonar.sector_min; }

std::array<double, kFollowerObsDim> FollowerObs::to_array() const {
  std::array<double, kFollowerObsDim> out{};
  out[0] = spacing;
  out[1] = heading_deviation;
  std::copy(sonar.sector_min.begin(), sonar.sector_min.end(), out.begin() + 2);
  return out;
}

FollowerGeometry follower_geometry(const Pose& leader, const Pose& follower) {
  FollowerGeometry g;
  const double dx = leader.x - follower.x;
  const double dy = leader.y - follower.y;
  g.spacing = std::hypot(dx, dy);
  if (dx == 0.0 && dy == 0.0) {
    g.degenerate = true;
    g.heading_deviation = 0.0;
    return g;
  }
  g.heading_deviation = normalize_angle(follower.heading - std::atan2(dy, dx));
  return g;
}

std::string_view to_string(TermReason r) {
  switch (r) {
    case TermReason::None: return "none";
    case TermReason::CollisionLeader: return "collision_leader";
    case TermReason::CollisionFollower: return "collision_follower";
    case TermReason::SpacingViolation: return "spacing_violation";
    case TermReason::HeadingViolation: return "heading_violation";
    case TermReason::GoalReached: return "goal_reached";
    case TermReason::StepLimit: return "step_limit";
  }
  return "?";
}

TermReason term_reason_from_string(std::string_view s) {
  for (TermReason r : {TermReason::None, TermReason::CollisionLeader, TermReason::CollisionFollower,
                       TermReason::SpacingViolation, TermReason::HeadingViolation,
                       TermReason::GoalReached, TermReason::StepLimit}) {
    if (to_string(r) == s) return r;
  }
  throw ParseError("unknown termination reason '" + std::string(s) + "'");
}

TermReason classify_termination(const TerminationInputs& in) {
  if (!in.leader_in_free_space || std::abs(in.leader_distance) <= kCollisionDistance) {
    return TermReason::CollisionLeader;
  }
  if (!in.follower_in_free_space || std::abs(in.follower_distance) <= kCollisionDistance) {
    return TermReason::CollisionFollower;
  }
  if (std::abs(in.spacing) < kMinSpacing || std::abs(in.spacing) > kMaxSpacing) {
    return TermReason::SpacingViolation;
  }
  if (std::abs(in.heading_deviation) >= kMaxHeadingDeviation) return TermReason::HeadingViolation;
  if (in.progress >= in.goal_progress) return TermReason::GoalReached;
  if (in.steps >= in.max_steps) return TermReason::StepLimit;
  return TermReason::None;
}

World::World(Corridor corridor)
    : corridor_(std::move(corridor)), geometry_(build_geometry(corridor_)) {}

WorldState World::reset() const {
  return reset(default_leader_start(corridor_), default_follower_start(corridor_));
}

WorldState World::reset(const Pose& leader, const Pose& follower) const {
  WorldState s;
  s.leader = leader;
  s.follower = follower;
  s.leader.heading = normalize_angle(s.leader.heading);
  s.follower.heading = normalize_angle(s.follower.heading);
  return s;
}

StepOutcome World::observe(const WorldState& state) const {
  const AgentSense lead = sense(geometry_, state.leader);
  const AgentSense follow = sense(geometry_, state.follower);
  const FollowerGeometry fg = follower_geometry(state.leader, state.follower);

  StepOutcome out;
  out.leader_obs.sonar = lead.sonar;
  out.follower_obs.spacing = fg.spacing;
  out.follower_obs.heading_deviation = fg.heading_deviation;
  out.follower_obs.sonar = follow.sonar;
  out.progress = progress_of(corridor_, state.leader.position());

  TerminationInputs in;
  in.leader_distance = lead.sonar.min();
  in.follower_distance = follow.sonar.min();
  in.spacing = fg.spacing;
  in.heading_deviation = fg.heading_deviation;
  in.leader_in_free_space = lead.free;
  in.follower_in_free_space = follow.free;
  in.progress = out.progress;
  in.goal_progress = corridor_.goal_progress;
  in.steps = state.steps;
  in.max_steps = corridor_.kinematics.max_steps;
  out.term_reason = classify_termination(in);
  out.done = out.term_reason != TermReason::None;
  return out;
}

Pose World::advance(const Pose& pose, ActionId action) const {
  const KinematicsConfig& k = corridor_.kinematics;
  Pose next = pose;
  next.heading = normalize_angle(pose.heading + k.yaw_gain * steering_deflection(action) * k.dt);
  next.x += k.forward_speed * k.dt * std::cos(next.heading);
  next.y += k.forward_speed * k.dt * std::sin(next.heading);
  return next;
}

StepOutcome World::step(WorldState& state, ActionId leader_action,
                        ActionId follower_action) const {
  if (state.done) throw ContractError("step called on a finished episode");
  state.leader = advance(state.leader, leader_action);
  state.follower = advance(state.follower, follower_action);
  state.steps += 1;
  StepOutcome out = observe(state);
  state.done = out.done;
  state.term_reason = out.term_reason;
  return out;
}

}  // namespace magaisil::world
