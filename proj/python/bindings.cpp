// Python bindings. Structured results cross the boundary as JSON text and
// are decoded by the pure-Python wrapper in magaisil/__init__.py.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "magaisil/algo/discriminator.hpp"
#include "magaisil/algo/gae.hpp"
#include "magaisil/common/error.hpp"
#include "magaisil/demos/recorder.hpp"
#include "magaisil/service/evaluate.hpp"
#include "magaisil/service/replay.hpp"
#include "magaisil/service/session.hpp"
#include "magaisil/world/rewards.hpp"
#include "magaisil/world/sonar.hpp"

namespace py = pybind11;
using namespace magaisil;

namespace {

world::Corridor load(const std::string& name_or_path) {
  return world::load_task(world::resolve_task_path(name_or_path, world::default_task_dirs()));
}

py::tuple pose_tuple(const world::Pose& p) { return py::make_tuple(p.x, p.y, p.heading); }

world::Pose pose_from(const std::array<double, 3>& p) { return {p[0], p[1], p[2]}; }

py::dict outcome_dict(const world::StepOutcome& o) {
  py::dict d;
  const auto l = o.leader_obs.to_array();
  const auto f = o.follower_obs.to_array();
  d["leader_obs"] = std::vector<double>(l.begin(), l.end());
  d["follower_obs"] = std::vector<double>(f.begin(), f.end());
  d["done"] = o.done;
  d["term_reason"] = std::string(world::to_string(o.term_reason));
  d["progress"] = o.progress;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Leader-follower AUV imitation learning core";

  // Same hierarchy as the C++ errors, so `except magaisil.Error` catches all.
  const auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<InvariantError>(m, "InvariantError", base);
  py::register_exception<ContractError>(m, "ContractError", base);

  py::class_<world::Corridor>(m, "Corridor")
      .def_readonly("task_id", &world::Corridor::task_id)
      .def_readonly("width", &world::Corridor::width)
      .def_readonly("goal_progress", &world::Corridor::goal_progress)
      .def_property_readonly("centerline",
                             [](const world::Corridor& c) {
                               std::vector<std::pair<double, double>> out;
                               for (const world::Vec2& p : c.centerline) out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def_property_readonly("num_obstacles", [](const world::Corridor& c) { return c.obstacles.size(); })
      .def_property_readonly("length", [](const world::Corridor& c) { return world::centerline_length(c); })
      .def("geometry_json", [](const world::Corridor& c) { return service::task_json(c).dump(); });

  m.def("load_task", &load, py::arg("name_or_path"));
  m.def("parse_task", [](const std::string& text) { return world::parse_task(text); }, py::arg("text"));

  py::class_<world::WorldState>(m, "WorldState")
      .def_property_readonly("leader", [](const world::WorldState& s) { return pose_tuple(s.leader); })
      .def_property_readonly("follower", [](const world::WorldState& s) { return pose_tuple(s.follower); })
      .def_readonly("steps", &world::WorldState::steps)
      .def_readonly("done", &world::WorldState::done)
      .def_property_readonly("term_reason",
                             [](const world::WorldState& s) { return std::string(world::to_string(s.term_reason)); });

  py::class_<world::World>(m, "World")
      .def(py::init<world::Corridor>(), py::arg("corridor"))
      .def_property_readonly("corridor", &world::World::corridor)
      .def("reset", py::overload_cast<>(&world::World::reset, py::const_))
      .def("reset_at",
           [](const world::World& w, const std::array<double, 3>& leader, const std::array<double, 3>& follower) {
             return w.reset(pose_from(leader), pose_from(follower));
           },
           py::arg("leader"), py::arg("follower"))
      .def("observe", [](const world::World& w, const world::WorldState& s) { return outcome_dict(w.observe(s)); })
      .def("step",
           [](const world::World& w, world::WorldState& s, int leader_action, int follower_action) {
             return outcome_dict(
                 w.step(s, world::action_from_index(leader_action), world::action_from_index(follower_action)));
           },
           py::arg("state"), py::arg("leader_action"), py::arg("follower_action"))
      .def("sonar",
           [](const world::World& w, const std::array<double, 3>& pose) -> std::optional<std::vector<double>> {
             const auto scan = world::raycast_sonar(w.geometry(), pose_from(pose));
             if (!scan) return std::nullopt;
             return std::vector<double>(scan->sector_min.begin(), scan->sector_min.end());
           },
           py::arg("pose"));

  m.def("eval_reward_leader", &world::eval_reward_leader, py::arg("leader_distance"));
  m.def("eval_reward_follower", &world::eval_reward_follower, py::arg("spacing"), py::arg("heading_deviation"),
        py::arg("follower_distance"));
  m.def("discriminator_reward", &algo::reward_from_probability, py::arg("d"));
  m.def("compute_gae",
        [](const std::vector<double>& rewards, const std::vector<double>& values, double bootstrap, double gamma,
           double lambda) {
          const algo::AdvantageEstimate est = algo::compute_gae(rewards, values, bootstrap, gamma, lambda);
          return py::make_tuple(est.advantages, est.returns);
        },
        py::arg("rewards"), py::arg("values"), py::arg("bootstrap_value"), py::arg("gamma"), py::arg("lam"));

  m.def("_record_demos",
        [](const std::string& task, const std::string& quality, int episodes, std::uint64_t seed,
           const std::string& out_dir) {
          const world::Corridor corridor = load(task);
          const demos::RecordedDemos rec =
              demos::record_demos(corridor, demos::demo_quality_from_string(quality), episodes, seed);
          nlohmann::json j{{"task_id", corridor.task_id},
                           {"quality", quality},
                           {"attempts", rec.attempts},
                           {"completed", rec.completed},
                           {"leader_mean_eval_reward", rec.leader_mean_eval()},
                           {"follower_mean_eval_reward", rec.follower_mean_eval()},
                           {"pairs", rec.leader.total_pairs()}};
          if (!out_dir.empty()) {
            const demos::DemoFiles files = demos::write_recorded_demos(rec, out_dir, corridor.task_id);
            j["files"] = {{"leader", files.leader.string()}, {"follower", files.follower.string()}};
          }
          return j.dump();
        });

  m.def("_train", [](const std::string& config_json) {
    service::SessionConfig cfg =
        service::session_config_from_json(nlohmann::json::parse(config_json));
    service::SessionSummary summary;
    {
      py::gil_scoped_release release;
      service::Session session(cfg);
      summary = session.run();
    }
    return to_json(summary).dump();
  });

  m.def("_evaluate", [](const std::string& checkpoint, const std::string& task, int episodes, std::uint64_t seed) {
    const auto policies = service::load_policies(checkpoint);
    const world::World w(load(task));
    service::EvalReport report;
    {
      py::gil_scoped_release release;
      report = service::evaluate(policies, w, episodes, seed);
    }
    return to_json(report, false).dump();
  });

  m.def("render_svg",
        [](const std::string& task, const std::string& trajectory_file, int episode) {
          const auto records = service::read_trajectory_file(trajectory_file);
          const service::ReplayPaths& chosen = service::select_episode(records, episode);
          return service::render_svg(load(task), std::span(&chosen, 1));
        },
        py::arg("task"), py::arg("trajectory_file"), py::arg("episode") = -1);
}
