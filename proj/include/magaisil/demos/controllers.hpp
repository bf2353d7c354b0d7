#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "magaisil/common/random.hpp"
#include "magaisil/world/world.hpp"

namespace magaisil::demos {

enum class ControllerKind { LeaderCentering, FollowerTracking };
enum class DemoQuality { Optimal, Suboptimal };

std::string_view to_string(DemoQuality q);
DemoQuality demo_quality_from_string(std::string_view s);

struct ControllerParams {
  // Error magnitude below which the controller goes straight, and above
  // which it uses the hard turn. Meters for the leader (left minus right
  // outer-sector range), radians for the follower (heading deviation).
  double deadband = 0.5;
  double hard_turn = 3.0;
  // Follower only: steer away from the nearer side when any sector is closer.
  double wall_override = 6.0;
  double random_action_prob = 0.0;
  int reaction_delay = 0;  // control steps
};

ControllerParams default_params(ControllerKind kind, DemoQuality quality);

// Memoryless control laws; the scripted controllers add delay and noise.
world::ActionId leader_control_law(const world::SonarScan& sonar, const ControllerParams& p);
world::ActionId follower_control_law(const world::FollowerObs& obs, const ControllerParams& p);

// Deterministic given its seed: each call draws the same number of random
// variates regardless of the branch taken, so replaying recorded
// observations reproduces recorded actions.
class ScriptedController {
 public:
  ScriptedController(ControllerKind kind, DemoQuality quality, std::uint64_t seed);
  ScriptedController(ControllerKind kind, ControllerParams params, std::uint64_t seed);

  world::ActionId act(std::span<const double> observation);

  ControllerKind kind() const { return kind_; }
  const ControllerParams& params() const { return params_; }

 private:
  ControllerKind kind_;
  ControllerParams params_;
  Rng rng_;
  std::deque<std::vector<double>> history_;
};

}  // namespace magaisil::demos
