#include "magaisil/demos/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "magaisil/common/error.hpp"

namespace magaisil::demos {

using world::ActionId;

std::string_view to_string(DemoQuality q) {
  return q == DemoQuality::Optimal ? "optimal" : "suboptimal";
}

DemoQuality demo_quality_from_string(std::string_view s) {
  if (s == "optimal") return DemoQuality::Optimal;
  if (s == "suboptimal") return DemoQuality::Suboptimal;
  throw ParseError("quality must be 'optimal' or 'suboptimal', got '" + std::string(s) + "'");
}

ControllerParams default_params(ControllerKind kind, DemoQuality quality) {
  ControllerParams p;
  if (kind == ControllerKind::LeaderCentering) {
    p.deadband = 0.5;
    p.hard_turn = 3.0;
  } else {
    p.deadband = 0.02;
    p.hard_turn = 0.08;
  }
  if (quality == DemoQuality::Suboptimal) {
    // Bang-bang steering on stale observations overshoots after every turn.
    p.deadband = 0.0;
    p.hard_turn = kind == ControllerKind::LeaderCentering ? 1.0 : 0.02;
    p.random_action_prob = 0.2;
    p.reaction_delay = 7;
  }
  return p;
}

namespace {

// Positive error means "turn left".
ActionId steer(double error, const ControllerParams& p) {
  if (error > p.hard_turn) return ActionId::TurnLeft2;
  if (error > p.deadband) return ActionId::TurnLeft1;
  if (error < -p.hard_turn) return ActionId::TurnRight2;
  if (error < -p.deadband) return ActionId::TurnRight1;
  return ActionId::Straight;
}

}  // namespace

ActionId leader_control_law(const world::SonarScan& sonar, const ControllerParams& p) {
  const auto& s = sonar.sector_min;
  return steer(s[0] - s[world::kSonarSectors - 1], p);
}

ActionId follower_control_law(const world::FollowerObs& obs, const ControllerParams& p) {
  const auto& s = obs.sonar.sector_min;
  const double left = std::min({s[0], s[1], s[2]});
  const double right = std::min({s[3], s[4], s[5]});
  if (std::min(left, right) < p.wall_override) {
    return left < right ? ActionId::TurnRight2 : ActionId::TurnLeft2;
  }
  // Positive deviation: heading is counter-clockwise of the bearing, so turn right.
  return steer(-obs.heading_deviation, p);
}

ScriptedController::ScriptedController(ControllerKind kind, DemoQuality quality,
                                       std::uint64_t seed)
    : ScriptedController(kind, default_params(kind, quality), seed) {}

ScriptedController::ScriptedController(ControllerKind kind, ControllerParams params,
                                       std::uint64_t seed)
    : kind_(kind), params_(params), rng_(seed) {}

ActionId ScriptedController::act(std::span<const double> observation) {
  const std::size_t expected =
      kind_ == ControllerKind::LeaderCentering ? world::kLeaderObsDim : world::kFollowerObsDim;
  if (observation.size() != expected) {
    throw ContractError("controller observation has wrong dimension");
  }
  history_.emplace_back(observation.begin(), observation.end());
  while (history_.size() > static_cast<std::size_t>(params_.reaction_delay) + 1) {
    history_.pop_front();
  }
  // Until the delay line fills, react to the oldest observation available.
  const std::vector<double>& seen = history_.front();

  ActionId action;
  if (kind_ == ControllerKind::LeaderCentering) {
    world::SonarScan scan;
    std::copy(seen.begin(), seen.end(), scan.sector_min.begin());
    action = leader_control_law(scan, params_);
  } else {
    world::FollowerObs obs;
    obs.spacing = seen[0];
    obs.heading_deviation = seen[1];
    std::copy(seen.begin() + 2, seen.end(), obs.sonar.sector_min.begin());
    action = follower_control_law(obs, params_);
  }

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any_action(0, world::kNumActions - 1);
  const double flip = coin(rng_);
  const int random_action = any_action(rng_);
  if (flip < params_.random_action_prob) action = world::action_from_index(random_action);
  return action;
}

}  // namespace magaisil::demos
