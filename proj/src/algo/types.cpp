#include "magaisil/algo/types.hpp"

#include <numeric>

#include "magaisil/common/error.hpp"
#include "magaisil/world/rewards.hpp"

namespace magaisil::algo {

std::string_view to_string(AgentId a) { return a == AgentId::Leader ? "leader" : "follower"; }

AgentId agent_from_string(std::string_view s) {
  if (s == "leader") return AgentId::Leader;
  if (s == "follower") return AgentId::Follower;
  throw ParseError("unknown agent '" + std::string(s) + "'");
}

int observation_size(AgentId a) {
  return a == AgentId::Leader ? world::kLeaderObsDim : world::kFollowerObsDim;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ExpertOptimal: return "expert-optimal";
    case Provenance::ExpertSuboptimal: return "expert-suboptimal";
    case Provenance::SelfGenerated: return "self-generated";
  }
  return "?";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "expert-optimal") return Provenance::ExpertOptimal;
  if (s == "expert-suboptimal") return Provenance::ExpertSuboptimal;
  if (s == "self-generated") return Provenance::SelfGenerated;
  throw ParseError("unknown provenance '" + std::string(s) + "'");
}

double step_eval_reward(std::span<const double> observation) {
  return world::eval_reward_from_vector(observation);
}

double Trajectory::mean_eval_reward() const {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : steps) sum += s.eval_reward;
  return sum / static_cast<double>(steps.size());
}

double Trajectory::mean_disc_reward() const {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : steps) sum += s.disc_reward;
  return sum / static_cast<double>(steps.size());
}

void Trajectory::validate() const {
  if (steps.empty()) throw ContractError("trajectory " + id + " is empty");
  const std::size_t dim = observation_size(agent);
  for (const auto& s : steps) {
    if (s.observation.size() != dim) {
      throw ContractError("trajectory " + id + " has an observation of the wrong size");
    }
  }
}

std::size_t DemoSet::total_pairs() const {
  return std::accumulate(episodes.begin(), episodes.end(), std::size_t{0},
                         [](std::size_t n, const DemoEpisode& e) { return n + e.actions.size(); });
}

double DemoSet::mean_eval_reward() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : episodes) {
    for (const auto& obs : e.observations) {
      sum += step_eval_reward(obs);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

DemoSummary DemoSet::summary() const { return {mean_eval_reward(), provenance, total_pairs()}; }

void DemoSet::validate() const {
  if (total_pairs() == 0) throw InvariantError("demos", "demonstration set is empty");
  const std::size_t dim = observation_size(agent);
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const auto& e = episodes[i];
    if (e.observations.size() != e.actions.size()) {
      throw InvariantError("demos[" + std::to_string(i) + "]", "observation/action count mismatch");
    }
    for (const auto& obs : e.observations) {
      if (obs.size() != dim) {
        throw InvariantError("demos[" + std::to_string(i) + "]",
                             "observation size does not match agent " +
                                 std::string(to_string(agent)));
      }
    }
  }
}

DemoEpisode to_demo_episode(const Trajectory& trajectory, std::string task_id) {
  DemoEpisode e;
  e.task_id = std::move(task_id);
  e.seed = static_cast<std::uint64_t>(trajectory.episode);
  e.observations.reserve(trajectory.steps.size());
  e.actions.reserve(trajectory.steps.size());
  for (const auto& s : trajectory.steps) {
    e.observations.push_back(s.observation);
    e.actions.push_back(s.action);
  }
  return e;
}

}  // namespace magaisil::algo
