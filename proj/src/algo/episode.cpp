#include "magaisil/algo/episode.hpp"

#include "magaisil/common/error.hpp"

namespace magaisil::algo {

std::string_view to_string(Mode m) { return m == Mode::Magail ? "magail" : "magaisil"; }

Mode mode_from_string(std::string_view s) {
  if (s == "magail") return Mode::Magail;
  if (s == "magaisil") return Mode::Magaisil;
  throw ParseError("mode must be 'magail' or 'magaisil', got '" + std::string(s) + "'");
}

RolloutRecord rollout(const world::World& world, const world::WorldState& start,
                      const ActionChooser& choose) {
  RolloutRecord rec;
  world::WorldState state = start;
  world::StepOutcome outcome = world.observe(state);
  rec.leader_path.push_back(state.leader.position());
  rec.follower_path.push_back(state.follower.position());
  while (!state.done) {
    const auto leader_obs = outcome.leader_obs.to_array();
    const auto follower_obs = outcome.follower_obs.to_array();
    const world::ActionId a_leader = choose(AgentId::Leader, leader_obs);
    const world::ActionId a_follower = choose(AgentId::Follower, follower_obs);
    rec.observations[0].emplace_back(leader_obs.begin(), leader_obs.end());
    rec.observations[1].emplace_back(follower_obs.begin(), follower_obs.end());
    rec.actions[0].push_back(a_leader);
    rec.actions[1].push_back(a_follower);
    outcome = world.step(state, a_leader, a_follower);
    rec.leader_path.push_back(state.leader.position());
    rec.follower_path.push_back(state.follower.position());
  }
  rec.final_outcome = outcome;
  rec.final_state = state;
  return rec;
}

namespace {

std::vector<double> final_observation(const RolloutRecord& rec, AgentId agent) {
  if (agent == AgentId::Leader) {
    const auto obs = rec.final_outcome.leader_obs.to_array();
    return {obs.begin(), obs.end()};
  }
  const auto obs = rec.final_outcome.follower_obs.to_array();
  return {obs.begin(), obs.end()};
}

}  // namespace

EpisodeReport run_episode(Learners& learners, const world::World& world, Judge* judge, Mode mode,
                          const TrainConfig& config, int episode_index) {
  if (mode == Mode::Magaisil && judge == nullptr) {
    throw ContractError("MAGAISIL episodes need a judge");
  }
  std::array<std::vector<ActionSample>, kNumAgents> samples;
  const RolloutRecord rec =
      rollout(world, world.reset(), [&](AgentId id, std::span<const double> obs) {
        const ActionSample s = select_action(learners[index_of(id)], obs);
        samples[index_of(id)].push_back(s);
        return s.action;
      });

  EpisodeReport report;
  report.episode = episode_index;
  report.term_reason = rec.final_outcome.term_reason;
  report.leader_path = rec.leader_path;
  report.follower_path = rec.follower_path;

  std::array<Trajectory, kNumAgents> trajectories;
  for (int i = 0; i < kNumAgents; ++i) {
    AgentLearner& learner = learners[i];
    Trajectory& traj = trajectories[i];
    traj.agent = learner.agent;
    traj.episode = episode_index;
    traj.id = "ep" + std::to_string(episode_index) + "-" + std::string(to_string(learner.agent));
    traj.terminal_reason = rec.final_outcome.term_reason;
    for (std::size_t t = 0; t < rec.steps(); ++t) {
      TrajectoryStep step;
      step.observation = rec.observations[i][t];
      step.action = samples[i][t].action;
      step.log_prob = samples[i][t].log_prob;
      step.value = samples[i][t].value;
      step.eval_reward = step_eval_reward(step.observation);
      traj.steps.push_back(std::move(step));
    }
    if (traj.terminal_reason == world::TermReason::StepLimit) {
      traj.bootstrap_value = learner.value.predict(final_observation(rec, learner.agent))[0];
    }
    traj.validate();

    if (!learner.demos || learner.demos->total_pairs() == 0) {
      throw ContractError("agent " + std::string(to_string(learner.agent)) + " has no demonstrations");
    }
    AgentEpisodeReport& ar = report.agents[i];
    ar.agent = learner.agent;
    ar.trajectory_id = traj.id;
    for (int u = 0; u < config.disc_updates_per_episode; ++u) {
      const auto agent_pairs = sample_agent_pairs(traj, config.pair_batch, learner.rng);
      const auto expert_pairs = sample_expert_pairs(*learner.demos, config.pair_batch, learner.rng);
      ar.disc_loss = update_discriminator(learner, agent_pairs, expert_pairs, config.max_grad_norm);
    }
    for (TrajectoryStep& step : traj.steps) {
      step.disc_reward = discriminator_reward(learner, step.observation, step.action);
    }
    ar.ppo = ppo_update(learner, traj, config);

    ar.steps = static_cast<int>(traj.steps.size());
    ar.term_reason = traj.terminal_reason;
    ar.mean_disc_reward = traj.mean_disc_reward();
    ar.mean_eval_reward = traj.mean_eval_reward();
    ar.success = traj.succeeded();
  }

  if (mode == Mode::Magaisil) {
    std::array<JudgeRequest, kNumAgents> requests;
    for (int i = 0; i < kNumAgents; ++i) {
      requests[i].trajectory = &trajectories[i];
      requests[i].demo = learners[i].demos->summary();
      requests[i].leader_path = report.leader_path;
      requests[i].follower_path = report.follower_path;
    }
    const std::vector<JudgeDecision> decisions = judge->judge(requests);
    if (decisions.size() != requests.size()) throw ContractError("judge returned the wrong number of decisions");
    for (int i = 0; i < kNumAgents; ++i) {
      AgentEpisodeReport& ar = report.agents[i];
      ar.judged = true;
      ar.accepted = decisions[i].accept;
      ar.judge_timed_out = decisions[i].timed_out;
      ar.pool_outcome = pool_insert_and_maybe_replace(learners[i], trajectories[i], decisions[i],
                                                      world.corridor().task_id);
    }
  }
  for (int i = 0; i < kNumAgents; ++i) {
    report.agents[i].pool_pairs = learners[i].pool.total_pairs;
    report.agents[i].demo_provenance = learners[i].demos->provenance;
  }
  return report;
}

}  // namespace magaisil::algo
