#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "magaisil/algo/discriminator.hpp"
#include "magaisil/algo/judge.hpp"
#include "magaisil/algo/learner.hpp"
#include "magaisil/algo/pool.hpp"
#include "magaisil/algo/ppo.hpp"
#include "magaisil/world/world.hpp"

namespace magaisil::algo {

enum class Mode { Magail, Magaisil };
std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

using Learners = std::array<AgentLearner, kNumAgents>;

// Chooses an action for one agent from its observation vector.
using ActionChooser = std::function<world::ActionId(AgentId, std::span<const double>)>;

struct RolloutRecord {
  // Pre-action observation and chosen action for every step, per agent.
  std::array<std::vector<std::vector<double>>, kNumAgents> observations;
  std::array<std::vector<world::ActionId>, kNumAgents> actions;
  // Positions including the start pose.
  std::vector<world::Vec2> leader_path;
  std::vector<world::Vec2> follower_path;
  world::StepOutcome final_outcome;
  world::WorldState final_state;

  std::size_t steps() const { return actions[0].size(); }
};

// Both agents act simultaneously until the episode ends.
RolloutRecord rollout(const world::World& world, const world::WorldState& start,
                      const ActionChooser& choose);

struct AgentEpisodeReport {
  AgentId agent = AgentId::Leader;
  int steps = 0;
  world::TermReason term_reason = world::TermReason::None;
  double mean_disc_reward = 0.0;
  double mean_eval_reward = 0.0;
  bool success = false;
  bool judged = false;
  bool accepted = false;
  bool judge_timed_out = false;
  PoolOutcome pool_outcome = PoolOutcome::Rejected;
  std::size_t pool_pairs = 0;
  Provenance demo_provenance = Provenance::ExpertOptimal;
  std::string trajectory_id;
  DiscriminatorLoss disc_loss;  // from the last discriminator update
  PpoStats ppo;
};

struct EpisodeReport {
  int episode = 0;
  world::TermReason term_reason = world::TermReason::None;
  std::array<AgentEpisodeReport, kNumAgents> agents;
  std::vector<world::Vec2> leader_path;
  std::vector<world::Vec2> follower_path;

  bool replacement() const {
    return agents[0].pool_outcome == PoolOutcome::Replaced ||
           agents[1].pool_outcome == PoolOutcome::Replaced;
  }
};

// One training episode: roll out both stochastic policies, then per agent
// run the discriminator updates, score every step with the updated
// discriminator, estimate advantages and run the generator updates. In
// MAGAISIL mode both trajectories then go to the judge and the pool.
// `judge` may be null in MAGAIL mode.
EpisodeReport run_episode(Learners& learners, const world::World& world, Judge* judge, Mode mode,
                          const TrainConfig& config, int episode_index);

}  // namespace magaisil::algo
