#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "magaisil/common/error.hpp"
#include "magaisil/service/api.hpp"
#include "magaisil/service/evaluate.hpp"
#include "magaisil/service/hub.hpp"
#include "magaisil/service/metrics.hpp"
#include "magaisil/service/replay.hpp"
#include "magaisil/service/session.hpp"
#include "magaisil/service/session_config.hpp"

using namespace magaisil;
using namespace magaisil::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("magaisil_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SessionConfig small_session(const fs::path& out, algo::Mode mode, int episodes) {
  SessionConfig c;
  c.mode = mode;
  c.task = "task1";
  c.episodes = episodes;
  c.demo_episodes = 2;
  c.demo_quality = demos::DemoQuality::Suboptimal;
  c.checkpoint_interval = 0;
  c.train.seed = 7;
  c.out_dir = out.string();
  return c;
}

algo::JudgeRequest request_for(const algo::Trajectory& t) { return {&t, {0.5, algo::Provenance::ExpertOptimal, 10}, {}, {}}; }

algo::Trajectory finished(const std::string& id, algo::AgentId agent) {
  algo::Trajectory t;
  t.id = id;
  t.agent = agent;
  t.terminal_reason = world::TermReason::GoalReached;
  algo::TrajectoryStep s;
  s.observation.assign(algo::observation_size(agent), 17.3);
  t.steps.push_back(s);
  return t;
}

}  // namespace

TEST(SessionConfig, TomlParseAndDefaults) {
  const SessionConfig c = parse_session_config(R"(
mode = "magaisil"
task = "task2"
episodes = 50
[train]
seed = 3
entropy_weight = 0.02
[demos]
quality = "suboptimal"
episodes = 4
[serve]
port = 9001
)");
  EXPECT_EQ(c.mode, algo::Mode::Magaisil);
  EXPECT_EQ(c.judge, JudgeKind::Oracle);
  EXPECT_EQ(c.task, "task2");
  EXPECT_EQ(c.episodes, 50);
  EXPECT_EQ(c.train.seed, 3u);
  EXPECT_DOUBLE_EQ(c.train.entropy_weight, 0.02);
  EXPECT_DOUBLE_EQ(c.train.clip_epsilon, 0.09);
  EXPECT_EQ(c.demo_quality, demos::DemoQuality::Suboptimal);
  EXPECT_EQ(c.demo_episodes, 4);
  EXPECT_EQ(c.port, 9001);
  EXPECT_EQ(c.host, "127.0.0.1");
  const SessionConfig back = session_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(SessionConfig, RejectsBadInput) {
  EXPECT_THROW(parse_session_config("bogus = 1\n"), ParseError);
  EXPECT_THROW(parse_session_config("[train]\nbogus = 1\n"), Error);
  EXPECT_THROW(parse_session_config("mode = \"other\"\n"), Error);
  EXPECT_THROW(parse_session_config("episodes = [\n"), ParseError);
  SessionConfig human;
  human.judge = JudgeKind::Human;
  try {
    human.validate(false);
    FAIL() << "human judging without the API accepted";
  } catch (const InvariantError& e) {
    EXPECT_EQ(e.field(), "judge");
  }
  human.serve = true;
  EXPECT_NO_THROW(human.validate(false));
  SessionConfig half;
  half.demos_leader = "a.jsonl";
  EXPECT_THROW(half.validate(false), InvariantError);
}

TEST(SessionConfig, EnvironmentOverrides) {
  SessionConfig c;
  ::setenv("MAGAISIL_PORT", "9123", 1);
  apply_env_overrides(c);
  EXPECT_EQ(c.port, 9123);
  ::setenv("MAGAISIL_PORT", "nope", 1);
  EXPECT_THROW(apply_env_overrides(c), InvariantError);
  ::unsetenv("MAGAISIL_PORT");
  ::setenv("MAGAISIL_DATA_DIR", "/tmp/magaisil_data", 1);
  c.train.seed = 5;
  c.mode = algo::Mode::Magaisil;
  EXPECT_EQ(c.resolved_out_dir(), fs::path("/tmp/magaisil_data/runs/magaisil-task1-s5"));
  ::unsetenv("MAGAISIL_DATA_DIR");
}

TEST(Session, MagailWritesOrderedRecords) {
  const fs::path out = fresh_dir("magail");
  Session s(small_session(out, algo::Mode::Magail, 5));
  const SessionSummary sum = s.run();
  EXPECT_EQ(sum.episodes_completed, 5);
  EXPECT_FALSE(sum.aborted);
  const auto recs = read_jsonl(out / "metrics.jsonl");
  ASSERT_EQ(recs.size(), 10u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].at("episode"), static_cast<int>(i / 2));
    EXPECT_EQ(recs[i].at("agent"), i % 2 ? "follower" : "leader");
    EXPECT_EQ(recs[i].at("judged"), false);
    EXPECT_EQ(recs[i].at("pool_pairs"), 0);
    EXPECT_EQ(recs[i].at("demo_provenance"), "expert-suboptimal");
  }
  const std::vector<std::string> keys{"episode", "agent", "steps", "term_reason", "mean_disc_reward",
                                      "mean_eval_reward", "success", "judged", "accepted",
                                      "judge_timed_out", "pool_pairs", "demo_provenance", "replacement",
                                      "disc_objective", "policy_entropy"};
  const std::string first_line = slurp(out / "metrics.jsonl").substr(0, slurp(out / "metrics.jsonl").find('\n'));
  const nlohmann::ordered_json first = nlohmann::ordered_json::parse(first_line);
  std::vector<std::string> got;
  for (const auto& [k, v] : first.items()) got.push_back(k);
  EXPECT_EQ(got, keys);
  EXPECT_EQ(read_trajectory_file(out / "trajectories.jsonl").size(), 5u);
  EXPECT_TRUE(fs::exists(out / "checkpoint.json"));
  EXPECT_TRUE(fs::exists(out / "demos_leader.jsonl"));
}

TEST(Session, ResumeReproducesUninterruptedRun) {
  const fs::path straight_dir = fresh_dir("straight");
  const fs::path resumed_dir = fresh_dir("resumed");
  SessionConfig cfg = small_session(straight_dir, algo::Mode::Magaisil, 6);
  Session(cfg).run();
  cfg.out_dir = resumed_dir.string();
  cfg.episodes = 3;
  Session(cfg).run();
  Session r = Session::resume(resumed_dir / "checkpoint.json", 6);
  EXPECT_EQ(r.episodes_completed(), 3);
  r.run();
  EXPECT_EQ(slurp(resumed_dir / "metrics.jsonl"), slurp(straight_dir / "metrics.jsonl"));
  EXPECT_EQ(slurp(resumed_dir / "trajectories.jsonl"), slurp(straight_dir / "trajectories.jsonl"));
  const json a = json::parse(slurp(resumed_dir / "checkpoint.json"));
  const json b = json::parse(slurp(straight_dir / "checkpoint.json"));
  EXPECT_EQ(a.at("learners"), b.at("learners"));
  EXPECT_EQ(a.at("episodes_completed"), 6);
}

TEST(Session, StopFlagEndsEarly) {
  const fs::path out = fresh_dir("stop");
  Session s(small_session(out, algo::Mode::Magail, 50));
  std::atomic<bool> stop{false};
  int seen = 0;
  const SessionSummary sum = s.run(nullptr, &stop, [&](const algo::EpisodeReport&) {
    if (++seen == 2) stop = true;
  });
  EXPECT_EQ(sum.episodes_completed, 2);
}

TEST(Session, LoadPoliciesChecksSizes) {
  const fs::path out = fresh_dir("policies");
  Session s(small_session(out, algo::Mode::Magail, 1));
  s.run();
  const auto pol = load_policies(out / "checkpoint.json");
  EXPECT_EQ(pol[0].input_size(), world::kLeaderObsDim);
  EXPECT_EQ(pol[1].input_size(), world::kFollowerObsDim);
  json ck = json::parse(slurp(out / "checkpoint.json"));
  std::swap(ck["learners"][0]["policy"], ck["learners"][1]["policy"]);
  std::ofstream(out / "swapped.json") << ck.dump();
  EXPECT_THROW(load_policies(out / "swapped.json"), ContractError);
  EXPECT_THROW(load_policies(out / "missing.json"), Error);
}

TEST(Hub, SubmitSemantics) {
  SessionHub hub;
  EXPECT_EQ(hub.submit("nope", true), SessionHub::Submit::Unknown);
  PendingJudgment p;
  p.trajectory_id = "t1";
  hub.post_pending({p});
  EXPECT_EQ(hub.pending().size(), 1u);
  EXPECT_EQ(hub.submit("t1", true), SessionHub::Submit::Recorded);
  EXPECT_EQ(hub.submit("t1", false), SessionHub::Submit::AlreadyDecided);
  EXPECT_EQ(hub.decision_for("t1"), std::optional<bool>(true));
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(1);
  EXPECT_EQ(hub.await_decision("t1", deadline), std::optional<bool>(true));
}

TEST(Hub, TimeoutCountsAsDecidedRejection) {
  SessionHub hub;
  PendingJudgment p;
  p.trajectory_id = "t2";
  hub.post_pending({p});
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(50);
  EXPECT_FALSE(hub.await_decision("t2", deadline).has_value());
  EXPECT_EQ(hub.submit("t2", true), SessionHub::Submit::AlreadyDecided);
  EXPECT_EQ(hub.decision_for("t2"), std::optional<bool>(false));
}

TEST(Hub, EventsAreSequenced) {
  SessionHub hub;
  hub.publish("episode", "{}");
  hub.publish("status", "{}");
  const auto all = hub.events_after(0, std::chrono::milliseconds(0));
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].seq + 1, all[1].seq);
  EXPECT_EQ(hub.events_after(all[1].seq, std::chrono::milliseconds(20)).size(), 0u);
  hub.add_metrics({{"episode", 0}});
  hub.add_metrics({{"episode", 1}});
  EXPECT_EQ(hub.metrics_after(0).size(), 1u);
  EXPECT_EQ(hub.metrics_after(-1).size(), 2u);
}

TEST(Hub, Downsample) {
  std::vector<world::Vec2> path;
  for (int i = 0; i < 1000; ++i) path.push_back({double(i), 0});
  const auto d = downsample(path, 300);
  ASSERT_EQ(d.size(), 300u);
  EXPECT_EQ(d.front().x, 0);
  EXPECT_EQ(d.back().x, 999);
  EXPECT_EQ(downsample(std::span(path).first(10), 300).size(), 10u);
}

TEST(HumanJudge, AnswersAndTimeouts) {
  SessionHub hub;
  HumanJudge judge(hub, 0.3);
  const algo::Trajectory a = finished("e0-leader", algo::AgentId::Leader);
  const algo::Trajectory b = finished("e0-follower", algo::AgentId::Follower);
  const algo::JudgeRequest reqs[] = {request_for(a), request_for(b)};
  std::thread trainer([&] {
    while (hub.pending().size() < 2) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    hub.submit("e0-leader", true);
  });
  const auto out = judge.judge(reqs);
  trainer.join();
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(out[0].accept);
  EXPECT_FALSE(out[0].timed_out);
  EXPECT_EQ(out[0].source, algo::JudgeSource::Human);
  EXPECT_FALSE(out[1].accept);
  EXPECT_TRUE(out[1].timed_out);
  bool saw_pending = false;
  for (const auto& e : hub.events_after(0, std::chrono::milliseconds(0))) saw_pending |= e.type == "pending";
  EXPECT_TRUE(saw_pending);
}

TEST(Api, EndpointsAndJudgmentFlow) {
  SessionHub hub;
  hub.set_status({{"state", "running"}});
  hub.set_task(task_json(world::load_task(world::resolve_task_path("task1", world::default_task_dirs()))));
  hub.add_metrics({{"episode", 0}, {"agent", "leader"}});
  hub.add_metrics({{"episode", 1}, {"agent", "leader"}});
  PendingJudgment p;
  p.trajectory_id = "e3-leader";
  p.episode = 3;
  hub.post_pending({p});
  hub.publish("episode", R"({"episode":0})");

  ApiServer api(hub);
  const int port = api.start("127.0.0.1", 0);
  httplib::Client cli("127.0.0.1", port);

  auto res = cli.Get("/api/status");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("state"), "running");

  res = cli.Get("/api/task");
  ASSERT_TRUE(res);
  const json t = json::parse(res->body);
  EXPECT_EQ(t.at("width"), 30.0);
  EXPECT_EQ(t.at("task_id"), "task1");
  EXPECT_TRUE(t.at("left_wall").is_array());

  res = cli.Get("/api/metrics?after=0");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body).size(), 1u);
  res = cli.Get("/api/metrics?after=abc");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = cli.Get("/api/pending");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body).at(0).at("trajectory_id"), "e3-leader");

  res = cli.Post("/api/judgment", R"({"trajectory_id": "e3-leader", "accept": true})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = cli.Post("/api/judgment", R"({"trajectory_id": "e3-leader", "accept": false})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(json::parse(res->body).at("accept"), true);
  res = cli.Post("/api/judgment", R"({"trajectory_id": "nope", "accept": true})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
  res = cli.Post("/api/judgment", "garbage", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = cli.Post("/api/judgment", R"({"trajectory_id": "e3-leader", "accept": "yes"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  // Event stream: read until the first event arrives, then hang up.
  std::string received;
  cli.Get("/api/events", [&](const char* data, std::size_t len) {
    received.append(data, len);
    return received.find("\n\n") == std::string::npos;
  });
  EXPECT_NE(received.find("event: episode"), std::string::npos);
  EXPECT_NE(received.find("data: {\"episode\":0}"), std::string::npos);
  EXPECT_NE(received.find("id: 1"), std::string::npos);
  api.stop();
}

TEST(Api, HumanSessionGrowsPoolByAcceptedPairs) {
  const fs::path out = fresh_dir("human");
  SessionConfig cfg = small_session(out, algo::Mode::Magaisil, 3);
  cfg.judge = JudgeKind::Human;
  cfg.serve = true;
  cfg.judgment_timeout_s = 30;
  SessionHub hub;
  ApiServer api(hub);
  const int port = api.start("127.0.0.1", 0);
  Session session(cfg);
  std::thread worker([&] { session.run(&hub); });

  // A scripted trainer accepts every leader trajectory and rejects the follower's.
  httplib::Client cli("127.0.0.1", port);
  int decided = 0;
  while (decided < 6) {
    auto res = cli.Get("/api/pending");
    ASSERT_TRUE(res);
    for (const json& p : json::parse(res->body)) {
      const bool accept = p.at("agent") == "leader";
      const json body{{"trajectory_id", p.at("trajectory_id")}, {"accept", accept}};
      auto r = cli.Post("/api/judgment", body.dump(), "application/json");
      ASSERT_TRUE(r);
      if (r->status == 200) ++decided;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  worker.join();
  api.stop();

  const auto recs = read_jsonl(out / "metrics.jsonl");
  ASSERT_EQ(recs.size(), 6u);
  std::size_t leader_pairs = 0;
  for (const json& r : recs) {
    EXPECT_EQ(r.at("judged"), true);
    EXPECT_EQ(r.at("judge_timed_out"), false);
    if (r.at("agent") == "leader") {
      EXPECT_EQ(r.at("accepted"), true);
      leader_pairs += r.at("steps").get<std::size_t>();
      EXPECT_EQ(r.at("pool_pairs"), leader_pairs);
    } else {
      EXPECT_EQ(r.at("accepted"), false);
      EXPECT_EQ(r.at("pool_pairs"), 0);
    }
  }
}

TEST(Evaluate, GreedyRolloutsAreDeterministic) {
  const fs::path out = fresh_dir("eval");
  Session s(small_session(out, algo::Mode::Magail, 1));
  s.run();
  const auto pol = load_policies(out / "checkpoint.json");
  const world::World w(world::load_task(world::resolve_task_path("task1", world::default_task_dirs())));
  const EvalReport a = evaluate(pol, w, 20, 0);
  const EvalReport b = evaluate(pol, w, 20, 0);
  ASSERT_EQ(a.episodes.size(), 20u);
  EXPECT_EQ(to_json(a, true).dump(), to_json(b, true).dump());
  EXPECT_EQ(to_json(a, false).at("per_episode").size(), 20u);
  int successes = 0;
  for (const auto& e : a.episodes) successes += e.success;
  EXPECT_DOUBLE_EQ(a.success_rate, successes / 20.0);
  // Start jitter stays within its bounds.
  const world::WorldState base = w.reset();
  for (int i = 0; i < 20; ++i) {
    const world::WorldState st = eval_start(w, 0, i);
    EXPECT_LE(std::hypot(st.leader.x - base.leader.x, st.leader.y - base.leader.y), 1.0 + 1e-9);
    EXPECT_LE(std::abs(st.leader.heading - base.leader.heading), 0.05 + 1e-12);
  }
}

TEST(Replay, SvgIsDeterministicAndShowsObstacles) {
  const world::Corridor t2 = world::load_task(world::resolve_task_path("task2", world::default_task_dirs()));
  ReplayPaths rp;
  rp.episode = 0;
  rp.task_id = "task2";
  rp.leader = {{0, 0}, {10, 1}, {20, 2}};
  rp.follower = {{-5, 0}, {5, 1}};
  const std::vector<ReplayPaths> recs{rp};
  const std::string a = render_svg(t2, recs);
  EXPECT_EQ(a, render_svg(t2, recs));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  std::size_t obstacles = 0;
  for (std::size_t pos = a.find("class=\"obstacle\""); pos != std::string::npos;
       pos = a.find("class=\"obstacle\"", pos + 1)) {
    ++obstacles;
  }
  EXPECT_EQ(obstacles, t2.obstacles.size());
  EXPECT_NE(a.find("class=\"leader\""), std::string::npos);
  EXPECT_NE(a.find("class=\"follower\""), std::string::npos);
  EXPECT_NE(a.find("class=\"goal\""), std::string::npos);
  EXPECT_EQ(&select_episode(recs, -1), &recs.back());
  EXPECT_THROW(select_episode(recs, 5), Error);
}
