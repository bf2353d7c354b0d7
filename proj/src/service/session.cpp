#include "magaisil/service/session.hpp"

#include <algorithm>

#include "magaisil/common/error.hpp"
#include "magaisil/common/io.hpp"
#include "magaisil/demos/demo_io.hpp"
#include "magaisil/demos/recorder.hpp"
#include "magaisil/nn/serialization.hpp"

namespace magaisil::service {

using nlohmann::json;

namespace {

constexpr int kSummaryWindow = 50;

json points_json(const std::vector<world::Vec2>& pts) {
  json out = json::array();
  for (const world::Vec2& p : pts) out.push_back({p.x, p.y});
  return out;
}

world::Corridor load_session_task(const SessionConfig& config) {
  return world::load_task(world::resolve_task_path(config.task, world::default_task_dirs()));
}

algo::DemoSet load_agent_demos(const std::string& path, algo::AgentId agent) {
  algo::DemoSet demos = demos::read_demo_file(path);
  if (demos.agent != agent) {
    throw InvariantError(agent == algo::AgentId::Leader ? "demos.leader" : "demos.follower",
                         path + " holds " + std::string(algo::to_string(demos.agent)) + " demonstrations");
  }
  return demos;
}

}  // namespace

json to_json(const SessionSummary& s) {
  return {{"episodes_completed", s.episodes_completed},
          {"replacements", s.replacements},
          {"accepted", {{"leader", s.accepted[0]}, {"follower", s.accepted[1]}}},
          {"final_mean_eval_reward", {{"leader", s.final_mean_eval[0]}, {"follower", s.final_mean_eval[1]}}},
          {"final_success_rate", s.final_success_rate},
          {"aborted", s.aborted},
          {"fault", s.fault},
          {"out_dir", s.out_dir.string()},
          {"metrics", s.metrics_path.string()},
          {"checkpoint", s.checkpoint_path.string()}};
}

json task_json(const world::Corridor& c) {
  const world::CorridorGeometry g = world::build_geometry(c);
  json obstacles = json::array();
  for (const auto& poly : g.obstacle_polygons) obstacles.push_back(points_json({poly.begin(), poly.end()}));
  return {{"task_id", c.task_id},
          {"width", c.width},
          {"goal_progress", c.goal_progress},
          {"centerline", points_json(c.centerline)},
          {"left_wall", points_json(g.left_wall)},
          {"right_wall", points_json(g.right_wall)},
          {"obstacles", obstacles},
          {"goal", points_json({world::frame_at(c, c.goal_progress).point})}};
}

json learners_to_json(const algo::Learners& learners) {
  json out = json::array();
  for (const algo::AgentLearner& l : learners) {
    json pool = json::array();
    for (const algo::DemoEpisode& e : l.pool.trajectories) pool.push_back(demos::demo_episode_to_json(e));
    out.push_back({{"agent", std::string(algo::to_string(l.agent))},
                   {"policy", nn::to_json(l.policy, &l.policy_opt)},
                   {"value", nn::to_json(l.value, &l.value_opt)},
                   {"discriminator", nn::to_json(l.discriminator, &l.disc_opt)},
                   {"rng", rng_state(l.rng)},
                   {"demos", demos::demo_set_to_json(*l.demos)},
                   {"pool",
                    {{"capacity", l.pool.capacity},
                     {"total_pairs", l.pool.total_pairs},
                     {"trajectories", std::move(pool)}}}});
  }
  return out;
}

algo::Learners learners_from_json(const json& j, const algo::TrainConfig& config) {
  if (!j.is_array() || j.size() != algo::kNumAgents) throw ParseError("checkpoint: expected two learners");
  algo::Learners learners;
  try {
    for (int i = 0; i < algo::kNumAgents; ++i) {
      const json& lj = j.at(i);
      const algo::AgentId agent = algo::agent_from_string(lj.at("agent").get<std::string>());
      if (algo::index_of(agent) != i) throw ParseError("checkpoint: learners out of order");
      auto demos = std::make_shared<algo::DemoSet>(demos::demo_set_from_json(lj.at("demos")));
      algo::AgentLearner l = algo::AgentLearner::create(agent, config, demos);
      auto load = [&lj](const char* key, nn::Mlp& net, nn::AdamState& opt) {
        net = nn::mlp_from_json(lj.at(key));
        std::optional<nn::AdamState> a = nn::adam_from_json(lj.at(key));
        if (!a) throw ParseError(std::string("checkpoint: ") + key + " has no optimizer state");
        opt = std::move(*a);
      };
      load("policy", l.policy, l.policy_opt);
      load("value", l.value, l.value_opt);
      load("discriminator", l.discriminator, l.disc_opt);
      restore_rng_state(l.rng, lj.at("rng").get<std::string>());
      const json& pool = lj.at("pool");
      l.pool.capacity = pool.at("capacity").get<std::size_t>();
      l.pool.total_pairs = pool.at("total_pairs").get<std::size_t>();
      for (const json& e : pool.at("trajectories")) l.pool.trajectories.push_back(demos::demo_episode_from_json(e));
      l.validate();
      learners[i] = std::move(l);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  return learners;
}

Session::Session(SessionConfig config) : config_(std::move(config)) {
  config_.validate();
  world_ = std::make_unique<world::World>(load_session_task(config_));
  std::array<algo::DemoSet, algo::kNumAgents> sets;
  if (!config_.demos_leader.empty()) {
    sets[0] = load_agent_demos(config_.demos_leader, algo::AgentId::Leader);
    sets[1] = load_agent_demos(config_.demos_follower, algo::AgentId::Follower);
  } else {
    demos::RecordedDemos rec = demos::record_demos(world_->corridor(), config_.demo_quality,
                                                   config_.demo_episodes, config_.demo_seed);
    sets[0] = std::move(rec.leader);
    sets[1] = std::move(rec.follower);
  }
  for (int i = 0; i < algo::kNumAgents; ++i) {
    learners_[i] = algo::AgentLearner::create(static_cast<algo::AgentId>(i), config_.train,
                                              std::make_shared<algo::DemoSet>(std::move(sets[i])));
  }
}

Session Session::resume(const std::filesystem::path& checkpoint, int episodes) {
  const json j = parse_json_text(read_file(checkpoint), checkpoint.string());
  if (j.value("format", "") != "magaisil-checkpoint") {
    throw ParseError(checkpoint.string() + ": not a session checkpoint");
  }
  if (j.value("version", 0) != kSessionCheckpointVersion) {
    throw ParseError(checkpoint.string() + ": unsupported checkpoint version");
  }
  Session s;
  s.config_ = session_config_from_json(j.at("config"));
  if (episodes > 0) s.config_.episodes = episodes;
  s.config_.validate(false);
  s.world_ = std::make_unique<world::World>(load_session_task(s.config_));
  s.learners_ = learners_from_json(j.at("learners"), s.config_.train);
  s.episodes_completed_ = j.at("episodes_completed").get<int>();
  return s;
}

void Session::save_checkpoint(const std::filesystem::path& path) const {
  const json j{{"format", "magaisil-checkpoint"},
               {"version", kSessionCheckpointVersion},
               {"episodes_completed", episodes_completed_},
               {"task_id", world_->corridor().task_id},
               {"config", to_json(config_)},
               {"learners", learners_to_json(learners_)}};
  write_file_atomic(path, j.dump());
}

json Session::status_json(const char* state) const {
  json agents = json::array();
  for (const algo::AgentLearner& l : learners_) {
    agents.push_back({{"agent", std::string(algo::to_string(l.agent))},
                      {"pool_pairs", l.pool.total_pairs},
                      {"pool_capacity", l.pool.capacity},
                      {"demo_provenance", std::string(algo::to_string(l.demos->provenance))},
                      {"demo_mean_eval_reward", l.demos->mean_eval_reward()},
                      {"demo_pairs", l.demos->total_pairs()}});
  }
  return {{"state", state},
          {"mode", std::string(algo::to_string(config_.mode))},
          {"judge", std::string(to_string(config_.judge))},
          {"task_id", world_->corridor().task_id},
          {"episodes_total", config_.episodes},
          {"episodes_completed", episodes_completed_},
          {"agents", agents},
          {"config", to_json(config_)}};
}

SessionSummary Session::run(SessionHub* hub, const std::atomic<bool>* stop,
                            const EpisodeCallback& on_episode) {
  SessionSummary summary;
  summary.out_dir = config_.resolved_out_dir();
  summary.metrics_path = summary.out_dir / "metrics.jsonl";
  summary.checkpoint_path = summary.out_dir / "checkpoint.json";
  std::filesystem::create_directories(summary.out_dir);

  std::unique_ptr<algo::Judge> judge;
  if (config_.mode == algo::Mode::Magaisil) {
    if (config_.judge == JudgeKind::Human) {
      if (hub == nullptr) throw ContractError("human judging needs the API hub");
      judge = std::make_unique<HumanJudge>(*hub, config_.judgment_timeout_s);
    } else {
      judge = std::make_unique<algo::OracleJudge>(config_.train.oracle_requires_success);
    }
  }

  if (episodes_completed_ == 0) {
    demos::write_demo_file(summary.out_dir / "demos_leader.jsonl", *learners_[0].demos);
    demos::write_demo_file(summary.out_dir / "demos_follower.jsonl", *learners_[1].demos);
  }
  JsonlLog metrics(summary.metrics_path, episodes_completed_);
  JsonlLog paths(summary.out_dir / "trajectories.jsonl", episodes_completed_);
  if (hub != nullptr) {
    hub->set_task(task_json(world_->corridor()));
    if (episodes_completed_ > 0) {
      for (const json& r : read_jsonl(summary.metrics_path)) hub->add_metrics(r);
    }
    hub->set_status(status_json("running"));
  }

  const std::string& task_id = world_->corridor().task_id;
  while (episodes_completed_ < config_.episodes) {
    if (stop != nullptr && stop->load()) break;
    algo::EpisodeReport report;
    try {
      report = algo::run_episode(learners_, *world_, judge.get(), config_.mode, config_.train,
                                 episodes_completed_);
    } catch (const TrainingFault& e) {
      summary.aborted = true;
      summary.fault = e.what();
      break;
    }
    for (int i = 0; i < algo::kNumAgents; ++i) {
      const nlohmann::ordered_json rec = metrics_record(report, i);
      metrics.append(rec);
      if (hub != nullptr) {
        const json plain = json::parse(rec.dump());
        hub->add_metrics(plain);
        hub->publish("episode", rec.dump());
        if (report.agents[i].pool_outcome == algo::PoolOutcome::Replaced) hub->publish("replacement", rec.dump());
      }
    }
    paths.append(trajectory_record(report.episode, task_id, report.term_reason, report.leader_path,
                                   report.follower_path));
    ++episodes_completed_;
    if (on_episode) on_episode(report);
    for (const algo::AgentEpisodeReport& a : report.agents) {
      if (a.ppo.aborted) {
        summary.aborted = true;
        summary.fault = std::string(algo::to_string(a.agent)) + ": " + a.ppo.fault;
      }
    }
    if (summary.aborted) break;
    if (config_.checkpoint_interval > 0 && episodes_completed_ % config_.checkpoint_interval == 0) {
      save_checkpoint(summary.checkpoint_path);
    }
    if (hub != nullptr) hub->set_status(status_json("running"));
  }
  if (!summary.aborted) save_checkpoint(summary.checkpoint_path);

  // Summary from the whole log, so a resumed run reports the same numbers.
  const std::vector<json> records = read_jsonl(summary.metrics_path);
  summary.episodes_completed = episodes_completed_;
  std::array<int, algo::kNumAgents> counted{};
  int success = 0;
  for (const json& r : records) {
    const int i = algo::index_of(algo::agent_from_string(r.at("agent").get<std::string>()));
    const int ep = r.at("episode").get<int>();
    if (r.at("replacement").get<bool>()) ++summary.replacements;
    if (r.at("accepted").get<bool>()) ++summary.accepted[i];
    if (ep >= episodes_completed_ - kSummaryWindow) {
      summary.final_mean_eval[i] += r.at("mean_eval_reward").get<double>();
      ++counted[i];
      if (i == 0 && r.at("success").get<bool>()) ++success;
    }
  }
  for (int i = 0; i < algo::kNumAgents; ++i) {
    if (counted[i] > 0) summary.final_mean_eval[i] /= counted[i];
  }
  if (counted[0] > 0) summary.final_success_rate = static_cast<double>(success) / counted[0];

  if (hub != nullptr) {
    hub->set_status(status_json(summary.aborted ? "aborted" : "finished"));
    hub->publish("status", hub->status().dump());
  }
  return summary;
}

std::array<nn::Mlp, algo::kNumAgents> load_policies(const std::filesystem::path& checkpoint) {
  const json j = parse_json_text(read_file(checkpoint), checkpoint.string());
  if (j.value("format", "") != "magaisil-checkpoint") {
    throw ParseError(checkpoint.string() + ": not a session checkpoint");
  }
  std::array<nn::Mlp, algo::kNumAgents> out;
  try {
    const json& learners = j.at("learners");
    for (int i = 0; i < algo::kNumAgents; ++i) {
      const algo::AgentId agent = static_cast<algo::AgentId>(i);
      nn::Mlp net = nn::mlp_from_json(learners.at(i).at("policy"));
      if (net.input_size() != algo::observation_size(agent) ||
          net.output_size() != world::kNumActions || net.head() != nn::Head::Softmax) {
        throw ContractError("checkpoint/task mismatch: " + std::string(algo::to_string(agent)) +
                            " policy does not fit the observation and action spaces");
      }
      out[i] = std::move(net);
    }
  } catch (const json::exception& e) {
    throw ParseError(checkpoint.string() + ": " + e.what());
  }
  return out;
}

}  // namespace magaisil::service
