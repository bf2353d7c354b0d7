// magaisil command-line driver: gen-demos, train, eval, replay, serve.
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "magaisil/common/error.hpp"
#include "magaisil/common/io.hpp"
#include "magaisil/demos/recorder.hpp"
#include "magaisil/service/api.hpp"
#include "magaisil/service/evaluate.hpp"
#include "magaisil/service/metrics.hpp"
#include "magaisil/service/replay.hpp"
#include "magaisil/service/session.hpp"

namespace fs = std::filesystem;
using namespace magaisil;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Flag values left unset fall back to the config file, then the defaults.
struct SessionFlags {
  std::string config;
  std::string resume;
  std::optional<std::string> mode, judge, task, demos_leader, demos_follower, demo_quality, out_dir, host;
  std::optional<int> episodes, checkpoint_interval, demo_episodes, port;
  std::optional<std::uint64_t> seed, demo_seed;
  std::optional<double> timeout_s, entropy_weight;
  bool quiet = false;

  void add_to(CLI::App* cmd, bool serving) {
    cmd->add_option("--config", config, "Session config file (TOML); flags win")->check(CLI::ExistingFile);
    cmd->add_option("--resume", resume, "Continue from a checkpoint.json")->check(CLI::ExistingFile);
    cmd->add_option("--mode", mode, "magail | magaisil")->check(CLI::IsMember({"magail", "magaisil"}));
    cmd->add_option("--judge", judge, "oracle | human")->check(CLI::IsMember({"oracle", "human"}));
    cmd->add_option("--task", task, "Task name (task1, task2, task3) or task file");
    cmd->add_option("--demos-leader", demos_leader, "Leader demo file")->check(CLI::ExistingFile);
    cmd->add_option("--demos-follower", demos_follower, "Follower demo file")->check(CLI::ExistingFile);
    cmd->add_option("--demo-quality", demo_quality, "Quality to record when no demo files are given")
        ->check(CLI::IsMember({"optimal", "suboptimal"}));
    cmd->add_option("--demo-episodes", demo_episodes, "Episodes to record when no demo files are given");
    cmd->add_option("--demo-seed", demo_seed, "Seed for recorded demos");
    cmd->add_option("--episodes", episodes, "Total training episodes");
    cmd->add_option("--seed", seed, "Training seed");
    cmd->add_option("--entropy-weight", entropy_weight, "Entropy bonus weight");
    cmd->add_option("--checkpoint-interval", checkpoint_interval, "Episodes between checkpoints (0: end only)");
    cmd->add_option("--judgment-timeout", timeout_s, "Seconds to wait for a human judgment");
    cmd->add_option("--out-dir", out_dir, "Output directory");
    if (serving) {
      cmd->add_option("--host", host, "Bind address");
      cmd->add_option("--port", port, "Port (0 picks a free one; MAGAISIL_PORT also works)");
    }
    cmd->add_flag("--quiet", quiet, "No progress lines");
  }

  service::SessionConfig build(bool serving) const {
    service::SessionConfig c;
    if (!config.empty()) c = service::load_session_config(config, c);
    service::apply_env_overrides(c);
    if (mode) c.mode = algo::mode_from_string(*mode);
    if (judge) c.judge = service::judge_kind_from_string(*judge);
    if (task) c.task = *task;
    if (demos_leader) c.demos_leader = *demos_leader;
    if (demos_follower) c.demos_follower = *demos_follower;
    if (demo_quality) c.demo_quality = demos::demo_quality_from_string(*demo_quality);
    if (demo_episodes) c.demo_episodes = *demo_episodes;
    if (demo_seed) c.demo_seed = *demo_seed;
    if (episodes) c.episodes = *episodes;
    if (seed) c.train.seed = *seed;
    if (entropy_weight) c.train.entropy_weight = *entropy_weight;
    if (checkpoint_interval) c.checkpoint_interval = *checkpoint_interval;
    if (timeout_s) c.judgment_timeout_s = *timeout_s;
    if (out_dir) c.out_dir = *out_dir;
    if (host) c.host = *host;
    if (port) c.port = *port;
    c.serve = serving;
    c.validate();
    return c;
  }
};

struct UsageError : Error {
  using Error::Error;
};

void print_progress(const algo::EpisodeReport& r, int total) {
  const auto& l = r.agents[0];
  const auto& f = r.agents[1];
  std::fprintf(stderr, "episode %d/%d  %-18s steps %3d  eval L %.3f F %.3f  pool %zu/%zu  %s%s\n",
               r.episode + 1, total, std::string(world::to_string(r.term_reason)).c_str(), l.steps,
               l.mean_eval_reward, f.mean_eval_reward, l.pool_pairs, f.pool_pairs,
               std::string(algo::to_string(l.demo_provenance)).c_str(), r.replacement() ? "  REPLACED" : "");
}

service::Session open_session(const SessionFlags& flags, const service::SessionConfig& config) {
  if (flags.resume.empty()) return service::Session(config);
  service::Session s = service::Session::resume(flags.resume, flags.episodes.value_or(0));
  return s;
}

int run_gen_demos(const std::string& task_name, const std::string& quality, int episodes, std::uint64_t seed,
                  const std::string& out) {
  const world::Corridor task =
      world::load_task(world::resolve_task_path(task_name, world::default_task_dirs()));
  const demos::DemoQuality q = demos::demo_quality_from_string(quality);
  const demos::RecordedDemos rec = demos::record_demos(task, q, episodes, seed);
  const demos::DemoFiles files = demos::write_recorded_demos(rec, out, task.task_id);
  std::printf("task %s quality %s: %d/%d attempts reached the goal\n", task.task_id.c_str(), quality.c_str(),
              rec.completed, rec.attempts);
  std::printf("leader   mean eval reward %.4f  (%zu pairs)  %s\n", rec.leader_mean_eval(),
              rec.leader.total_pairs(), files.leader.string().c_str());
  std::printf("follower mean eval reward %.4f  (%zu pairs)  %s\n", rec.follower_mean_eval(),
              rec.follower.total_pairs(), files.follower.string().c_str());
  return 0;
}

int run_train(const SessionFlags& flags) {
  service::SessionConfig config;
  try {
    config = flags.build(false);
  } catch (const InvariantError& e) {
    if (e.field() == "judge") {
      throw UsageError(std::string(e.what()) +
                       "\n  e.g. magaisil serve --mode magaisil --judge human --task task1 --port 8080");
    }
    throw UsageError(e.what());
  }
  service::Session session = open_session(flags, config);
  const int total = session.config().episodes;
  const service::SessionSummary s = session.run(nullptr, nullptr, [&](const algo::EpisodeReport& r) {
    if (!flags.quiet && ((r.episode + 1) % 10 == 0 || r.replacement())) print_progress(r, total);
  });
  std::cout << to_json(s).dump(2) << '\n';
  return s.aborted ? kExitRuntime : 0;
}

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

int run_serve(const SessionFlags& flags, const std::string& ui_dir, bool linger) {
  service::SessionConfig config;
  try {
    config = flags.build(true);
  } catch (const InvariantError& e) {
    throw UsageError(e.what());
  }
  service::Session session = open_session(flags, config);
  service::SessionHub hub;
  service::ApiServer server(hub, ui_dir);
  const int port = server.start(session.config().host, session.config().port);
  std::fprintf(stderr, "serving on http://%s:%d  (mode %s, judge %s)\n", session.config().host.c_str(), port,
               std::string(algo::to_string(session.config().mode)).c_str(),
               std::string(service::to_string(session.config().judge)).c_str());
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  std::atomic<bool> stop{false};
  std::atomic<bool> finished{false};
  service::SessionSummary summary;
  std::exception_ptr failure;
  const int total = session.config().episodes;
  std::thread worker([&] {
    try {
      summary = session.run(&hub, &stop, [&](const algo::EpisodeReport& r) {
        if (!flags.quiet) print_progress(r, total);
      });
    } catch (...) {
      failure = std::current_exception();
    }
    finished = true;
  });
  while (!finished && !g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  if (g_interrupted) {
    stop = true;
    hub.close();  // releases a pending human judgment as a timeout
  }
  worker.join();
  if (failure) std::rethrow_exception(failure);
  std::cout << to_json(summary).dump(2) << '\n';
  if (linger && !g_interrupted) {
    std::fprintf(stderr, "session finished; still serving, Ctrl-C to exit\n");
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
  server.stop();
  return summary.aborted ? kExitRuntime : 0;
}

int run_eval(const std::string& checkpoint, std::string task_name, int episodes, std::uint64_t seed,
             const std::string& out, const std::string& trajectories, bool series) {
  const auto policies = service::load_policies(checkpoint);
  if (task_name.empty()) {
    task_name = parse_json_text(read_file(checkpoint), checkpoint).value("task_id", "");
  }
  const world::World world(world::load_task(world::resolve_task_path(task_name, world::default_task_dirs())));
  const service::EvalReport report = service::evaluate(policies, world, episodes, seed);
  if (!out.empty()) write_file_atomic(out, to_json(report, series).dump(2) + "\n");
  if (!trajectories.empty()) {
    service::JsonlLog log(trajectories, 0);
    for (const service::EvalEpisode& e : report.episodes) {
      log.append(service::trajectory_record(e.index, report.task_id, e.term_reason, e.leader_path,
                                            e.follower_path));
    }
  }
  std::printf("%-4s %-20s %5s %9s %9s %8s %8s\n", "ep", "outcome", "steps", "r_leader", "r_follow", "|a_F|",
              "g_F");
  for (const service::EvalEpisode& e : report.episodes) {
    std::printf("%-4d %-20s %5d %9.4f %9.4f %8.4f %8.3f\n", e.index,
                std::string(world::to_string(e.term_reason)).c_str(), e.steps, e.leader_mean_reward,
                e.follower_mean_reward, e.mean_abs_heading_deviation, e.mean_spacing);
  }
  std::printf("task %s  success %.2f  leader %.4f  follower %.4f\n", report.task_id.c_str(), report.success_rate,
              report.leader_mean_reward, report.follower_mean_reward);
  return 0;
}

int run_replay(std::string trajectory_file, const std::string& metrics, int episode, const std::string& task_name,
               const std::string& out) {
  if (trajectory_file.empty()) trajectory_file = (fs::path(metrics).parent_path() / "trajectories.jsonl").string();
  const std::vector<service::ReplayPaths> records = service::read_trajectory_file(trajectory_file);
  const service::ReplayPaths& chosen = service::select_episode(records, episode);
  const std::string name = task_name.empty() ? chosen.task_id : task_name;
  const world::Corridor task = world::load_task(world::resolve_task_path(name, world::default_task_dirs()));
  write_file_atomic(out, service::render_svg(task, std::span(&chosen, 1)));
  std::printf("episode %d (%s) -> %s\n", chosen.episode, chosen.term_reason.c_str(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent adversarial imitation with self-imitation for leader-follower AUVs"};
  app.require_subcommand(1);

  std::string gd_task = "task1", gd_quality = "optimal", gd_out = "demos";
  int gd_episodes = 10;
  std::uint64_t gd_seed = 1;
  CLI::App* gen = app.add_subcommand("gen-demos", "Record scripted demonstrations");
  gen->add_option("--task", gd_task, "Task name or file");
  gen->add_option("--quality", gd_quality, "optimal | suboptimal")->check(CLI::IsMember({"optimal", "suboptimal"}));
  gen->add_option("--episodes", gd_episodes, "Goal-reaching episodes to keep")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gd_seed, "Seed");
  gen->add_option("--out", gd_out, "Output directory");

  SessionFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Train with the oracle judge (or plain MAGAIL)");
  train_flags.add_to(train, false);

  SessionFlags serve_flags;
  std::string ui_dir;
  bool linger = false;
  CLI::App* serve = app.add_subcommand("serve", "Train behind the HTTP API (human or oracle judge)");
  serve_flags.add_to(serve, true);
  serve->add_option("--ui-dir", ui_dir, "Static UI files to serve at /");
  serve->add_flag("--linger", linger, "Keep serving after the session ends");

  std::string ev_checkpoint, ev_task, ev_out, ev_traj;
  int ev_episodes = 20;
  std::uint64_t ev_seed = 0;
  bool ev_series = false;
  CLI::App* eval = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  eval->add_option("--checkpoint", ev_checkpoint, "checkpoint.json")->required()->check(CLI::ExistingFile);
  eval->add_option("--task", ev_task, "Task (default: the checkpoint's)");
  eval->add_option("--episodes", ev_episodes, "Episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", ev_seed, "Seed for start-pose jitter");
  eval->add_option("--out", ev_out, "Write the JSON report here");
  eval->add_option("--trajectories", ev_traj, "Write paths (JSONL) here for replay");
  eval->add_flag("--series", ev_series, "Include per-step distance/heading series in the report");

  std::string rp_traj, rp_metrics, rp_task, rp_out;
  int rp_episode = -1;
  CLI::App* replay = app.add_subcommand("replay", "Render an episode's paths to SVG");
  auto* traj_opt = replay->add_option("--trajectory-file", rp_traj, "trajectories.jsonl")->check(CLI::ExistingFile);
  auto* metrics_opt =
      replay->add_option("--metrics", rp_metrics, "metrics.jsonl (uses the sibling trajectories.jsonl)")
          ->check(CLI::ExistingFile);
  traj_opt->excludes(metrics_opt);
  replay->add_option("--episode", rp_episode, "Episode index (default: last)");
  replay->add_option("--task", rp_task, "Task override");
  replay->add_option("--out", rp_out, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return run_gen_demos(gd_task, gd_quality, gd_episodes, gd_seed, gd_out);
    if (*train) return run_train(train_flags);
    if (*serve) return run_serve(serve_flags, ui_dir, linger);
    if (*eval) return run_eval(ev_checkpoint, ev_task, ev_episodes, ev_seed, ev_out, ev_traj, ev_series);
    if (*replay) {
      if (rp_traj.empty() && rp_metrics.empty()) throw UsageError("replay needs --trajectory-file or --metrics");
      return run_replay(rp_traj, rp_metrics, rp_episode, rp_task, rp_out);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
