#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "magaisil/common/error.hpp"
#include "magaisil/world/corridor.hpp"

namespace magaisil::world {
namespace {

double require_number(const toml::node_view<const toml::node>& node, const std::string& field) {
  if (!node) throw ParseError("missing key '" + field + "'");
  const auto v = node.value<double>();
  if (!v) throw ParseError("'" + field + "' must be a number");
  return *v;
}

double number_or(const toml::node_view<const toml::node>& node, const std::string& field,
                 double fallback) {
  return node ? require_number(node, field) : fallback;
}

Vec2 parse_point(const toml::node& node, const std::string& field) {
  const toml::array* arr = node.as_array();
  if (arr == nullptr || arr->size() != 2) throw ParseError("'" + field + "' must be [x, y]");
  const auto x = (*arr)[0].value<double>();
  const auto y = (*arr)[1].value<double>();
  if (!x || !y) throw ParseError("'" + field + "' must hold numbers");
  return {*x, *y};
}

std::optional<Pose> parse_pose(const toml::node_view<const toml::node>& node,
                               const std::string& field) {
  if (!node) return std::nullopt;
  const toml::array* arr = node.as_array();
  if (arr == nullptr || arr->size() != 3) {
    throw ParseError("'" + field + "' must be [x, y, heading]");
  }
  const auto x = (*arr)[0].value<double>();
  const auto y = (*arr)[1].value<double>();
  const auto h = (*arr)[2].value<double>();
  if (!x || !y || !h) throw ParseError("'" + field + "' must hold numbers");
  return Pose{*x, *y, normalize_angle(*h)};
}

}  // namespace

Corridor parse_task(std::string_view text, std::string_view default_task_id) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "task file: " << e.description() << " at line " << e.source().begin.line;
    throw ParseError(msg.str());
  }
  const toml::node_view<const toml::node> view{root};

  Corridor c;
  c.task_id = view["task_id"].value_or(std::string(default_task_id));
  c.width = require_number(view["width"], "width");
  c.goal_progress = require_number(view["goal_progress"], "goal_progress");

  const toml::array* centerline = root["centerline"].as_array();
  if (centerline == nullptr) throw ParseError("missing array 'centerline'");
  for (std::size_t i = 0; i < centerline->size(); ++i) {
    c.centerline.push_back(parse_point((*centerline)[i], "centerline[" + std::to_string(i) + "]"));
  }

  if (const auto obstacles = view["obstacles"]) {
    const toml::array* arr = obstacles.as_array();
    if (arr == nullptr) throw ParseError("'obstacles' must be an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string field = "obstacles[" + std::to_string(i) + "]";
      const toml::table* t = (*arr)[i].as_table();
      if (t == nullptr) throw ParseError("'" + field + "' must be a table");
      const toml::node_view<const toml::node> ov{*t};
      Obstacle o;
      o.length = require_number(ov["length"], field + ".length");
      o.width = require_number(ov["width"], field + ".width");
      o.offset = require_number(ov["offset"], field + ".offset");
      const std::string side = ov["side"].value_or(std::string{});
      if (side == "left") {
        o.side = WallSide::Left;
      } else if (side == "right") {
        o.side = WallSide::Right;
      } else {
        throw ParseError("'" + field + ".side' must be \"left\" or \"right\"");
      }
      c.obstacles.push_back(o);
    }
  }

  const auto kin = view["kinematics"];
  KinematicsConfig& k = c.kinematics;
  k.forward_speed = number_or(kin["forward_speed"], "kinematics.forward_speed", k.forward_speed);
  k.yaw_gain = number_or(kin["yaw_gain"], "kinematics.yaw_gain", k.yaw_gain);
  k.dt = number_or(kin["dt"], "kinematics.dt", k.dt);
  if (const auto steps = kin["max_steps"]) {
    const auto v = steps.value<std::int64_t>();
    if (!v) throw ParseError("'kinematics.max_steps' must be an integer");
    k.max_steps = static_cast<int>(*v);
  }

  c.leader_start = parse_pose(view["start"]["leader"], "start.leader");
  c.follower_start = parse_pose(view["start"]["follower"], "start.follower");

  validate(c);
  return c;
}

Corridor load_task(const std::filesystem::path& task_file) {
  std::ifstream in(task_file);
  if (!in) throw IoError("cannot open task file " + task_file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_task(buffer.str(), task_file.stem().string());
}

}  // namespace magaisil::world
