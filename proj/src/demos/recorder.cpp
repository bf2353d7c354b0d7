#include "magaisil/demos/recorder.hpp"

#include "magaisil/algo/episode.hpp"
#include "magaisil/common/error.hpp"
#include "magaisil/demos/demo_io.hpp"

namespace magaisil::demos {

std::uint64_t controller_seed(std::uint64_t episode_seed, algo::AgentId agent) {
  return derive_seed(episode_seed, static_cast<std::uint64_t>(algo::index_of(agent)));
}

RecordedDemos record_demos(const world::Corridor& task, DemoQuality quality, int episodes,
                           std::uint64_t seed, int attempt_factor) {
  if (episodes < 1) throw ContractError("need at least one demo episode");
  const world::World world(task);
  const algo::Provenance provenance = quality == DemoQuality::Optimal
                                          ? algo::Provenance::ExpertOptimal
                                          : algo::Provenance::ExpertSuboptimal;
  RecordedDemos out;
  out.quality = quality;
  out.leader.agent = algo::AgentId::Leader;
  out.follower.agent = algo::AgentId::Follower;
  out.leader.provenance = out.follower.provenance = provenance;

  const int max_attempts = episodes * attempt_factor;
  while (out.completed < episodes && out.attempts < max_attempts) {
    const std::uint64_t episode_seed = derive_seed(seed, static_cast<std::uint64_t>(out.attempts));
    ++out.attempts;
    ScriptedController leader(ControllerKind::LeaderCentering, quality,
                              controller_seed(episode_seed, algo::AgentId::Leader));
    ScriptedController follower(ControllerKind::FollowerTracking, quality,
                                controller_seed(episode_seed, algo::AgentId::Follower));
    const algo::RolloutRecord rec =
        algo::rollout(world, world.reset(), [&](algo::AgentId id, std::span<const double> obs) {
          return id == algo::AgentId::Leader ? leader.act(obs) : follower.act(obs);
        });
    if (rec.final_outcome.term_reason != world::TermReason::GoalReached) continue;
    ++out.completed;
    for (int i = 0; i < algo::kNumAgents; ++i) {
      algo::DemoEpisode e;
      e.observations = rec.observations[i];
      e.actions = rec.actions[i];
      e.task_id = task.task_id;
      e.seed = episode_seed;
      (i == 0 ? out.leader : out.follower).episodes.push_back(std::move(e));
    }
  }
  if (out.completed == 0) {
    throw Error("scripted controllers finished none of " + std::to_string(out.attempts) +
                " attempted episodes");
  }
  return out;
}

DemoFiles write_recorded_demos(const RecordedDemos& demos, const std::filesystem::path& out_dir,
                               const std::string& task_id) {
  const std::string stem = task_id + "_" + std::string(to_string(demos.quality));
  DemoFiles files{out_dir / (stem + "_leader.jsonl"), out_dir / (stem + "_follower.jsonl")};
  write_demo_file(files.leader, demos.leader);
  write_demo_file(files.follower, demos.follower);
  return files;
}

}  // namespace magaisil::demos
