#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "magaisil/world/world.hpp"

namespace magaisil::algo {

enum class AgentId : int { Leader = 0, Follower = 1 };
inline constexpr int kNumAgents = 2;

std::string_view to_string(AgentId a);
AgentId agent_from_string(std::string_view s);
int observation_size(AgentId a);
constexpr int index_of(AgentId a) { return static_cast<int>(a); }

enum class Provenance { ExpertOptimal, ExpertSuboptimal, SelfGenerated };
std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

// Per-step evaluation reward computed from an observation vector; never a
// training signal.
double step_eval_reward(std::span<const double> observation);

struct TrajectoryStep {
  std::vector<double> observation;
  world::ActionId action = world::ActionId::Straight;
  double log_prob = 0.0;
  double value = 0.0;
  double disc_reward = 0.0;
  double eval_reward = 0.0;
};

struct Trajectory {
  std::string id;
  AgentId agent = AgentId::Leader;
  int episode = 0;
  std::vector<TrajectoryStep> steps;
  world::TermReason terminal_reason = world::TermReason::None;
  // V(s_T) for step-limit truncation, 0 on a true termination.
  double bootstrap_value = 0.0;

  bool succeeded() const { return terminal_reason == world::TermReason::GoalReached; }
  double mean_eval_reward() const;
  double mean_disc_reward() const;
  // Throws ContractError when empty or dimensions disagree with the agent.
  void validate() const;
};

struct DemoEpisode {
  std::vector<std::vector<double>> observations;
  std::vector<world::ActionId> actions;
  std::string task_id;
  std::uint64_t seed = 0;

  friend bool operator==(const DemoEpisode&, const DemoEpisode&) = default;
};

struct DemoSummary {
  double mean_eval_reward = 0.0;
  Provenance provenance = Provenance::ExpertOptimal;
  std::size_t pairs = 0;
};

struct DemoSet {
  AgentId agent = AgentId::Leader;
  Provenance provenance = Provenance::ExpertOptimal;
  std::vector<DemoEpisode> episodes;

  std::size_t total_pairs() const;
  // Mean per-step evaluation reward over every recorded pair.
  double mean_eval_reward() const;
  DemoSummary summary() const;
  // Nonempty, per-pair dimensions match the agent.
  void validate() const;

  friend bool operator==(const DemoSet&, const DemoSet&) = default;
};

DemoEpisode to_demo_episode(const Trajectory& trajectory, std::string task_id);

}  // namespace magaisil::algo
