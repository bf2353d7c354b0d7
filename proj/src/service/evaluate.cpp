#include "magaisil/service/evaluate.hpp"

#include <cmath>

#include "magaisil/algo/episode.hpp"
#include "magaisil/common/error.hpp"
#include "magaisil/common/random.hpp"
#include "magaisil/world/rewards.hpp"

namespace magaisil::service {

using nlohmann::ordered_json;

world::WorldState eval_start(const world::World& world, std::uint64_t seed, int index,
                             double lateral, double heading) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const world::WorldState base = world.reset();
  auto jitter = [&](world::Pose p) {
    const double side = lateral * unit(rng);
    p.x += -std::sin(p.heading) * side;
    p.y += std::cos(p.heading) * side;
    p.heading = world::normalize_angle(p.heading + heading * unit(rng));
    return p;
  };
  const world::Pose leader = jitter(base.leader);
  const world::Pose follower = jitter(base.follower);
  return world.reset(leader, follower);
}

EvalReport evaluate(const std::array<nn::Mlp, algo::kNumAgents>& policies, const world::World& world,
                    int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ContractError("evaluate needs at least one episode");
  for (int i = 0; i < algo::kNumAgents; ++i) {
    if (policies[i].input_size() != algo::observation_size(static_cast<algo::AgentId>(i))) {
      throw ContractError("policy input size does not match the agent's observation");
    }
  }
  EvalReport report;
  report.task_id = world.corridor().task_id;
  report.seed = seed;
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    const algo::RolloutRecord rec =
        algo::rollout(world, eval_start(world, seed, e), [&](algo::AgentId id, std::span<const double> obs) {
          return algo::greedy_action(policies[algo::index_of(id)], obs);
        });
    EvalEpisode ep;
    ep.index = e;
    ep.term_reason = rec.final_outcome.term_reason;
    ep.steps = static_cast<int>(rec.steps());
    ep.success = ep.term_reason == world::TermReason::GoalReached;
    for (std::size_t t = 0; t < rec.steps(); ++t) {
      const auto& lo = rec.observations[0][t];
      const auto& fo = rec.observations[1][t];
      ep.leader_mean_reward += world::eval_reward_from_vector(lo);
      ep.follower_mean_reward += world::eval_reward_from_vector(fo);
      double d = lo[0];
      for (double s : lo) d = std::min(d, s);
      ep.leader_distance.push_back(d);
      ep.spacing.push_back(fo[0]);
      ep.heading_deviation.push_back(fo[1]);
      ep.mean_abs_heading_deviation += std::abs(fo[1]);
      ep.mean_spacing += fo[0];
    }
    const double n = static_cast<double>(std::max<std::size_t>(rec.steps(), 1));
    ep.leader_mean_reward /= n;
    ep.follower_mean_reward /= n;
    ep.mean_abs_heading_deviation /= n;
    ep.mean_spacing /= n;
    ep.leader_path = rec.leader_path;
    ep.follower_path = rec.follower_path;
    successes += ep.success;
    report.leader_mean_reward += ep.leader_mean_reward;
    report.follower_mean_reward += ep.follower_mean_reward;
    report.episodes.push_back(std::move(ep));
  }
  report.success_rate = static_cast<double>(successes) / episodes;
  report.leader_mean_reward /= episodes;
  report.follower_mean_reward /= episodes;
  return report;
}

ordered_json to_json(const EvalReport& report, bool include_series) {
  ordered_json rows = ordered_json::array();
  for (const EvalEpisode& e : report.episodes) {
    ordered_json r;
    r["episode"] = e.index;
    r["term_reason"] = std::string(world::to_string(e.term_reason));
    r["steps"] = e.steps;
    r["success"] = e.success;
    r["leader_mean_reward"] = e.leader_mean_reward;
    r["follower_mean_reward"] = e.follower_mean_reward;
    r["mean_abs_heading_deviation"] = e.mean_abs_heading_deviation;
    r["mean_spacing"] = e.mean_spacing;
    if (include_series) {
      r["leader_distance"] = e.leader_distance;
      r["spacing"] = e.spacing;
      r["heading_deviation"] = e.heading_deviation;
    }
    rows.push_back(std::move(r));
  }
  ordered_json out;
  out["task_id"] = report.task_id;
  out["seed"] = report.seed;
  out["episodes"] = static_cast<int>(report.episodes.size());
  out["success_rate"] = report.success_rate;
  out["leader_mean_reward"] = report.leader_mean_reward;
  out["follower_mean_reward"] = report.follower_mean_reward;
  out["per_episode"] = std::move(rows);
  return out;
}

}  // namespace magaisil::service
