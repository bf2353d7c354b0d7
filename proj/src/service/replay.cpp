#include "magaisil/service/replay.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "magaisil/common/error.hpp"
#include "magaisil/service/metrics.hpp"

namespace magaisil::service {

using nlohmann::json;

namespace {

std::vector<world::Vec2> path_from_json(const json& j) {
  std::vector<world::Vec2> out;
  for (const json& p : j) {
    const auto xy = p.get<std::array<double, 2>>();
    out.push_back({xy[0], xy[1]});
  }
  return out;
}

struct Frame {
  double min_x, max_y, scale;
  double px(double x) const { return (x - min_x) * scale; }
  double py(double y) const { return (max_y - y) * scale; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string points_attr(const Frame& f, std::span<const world::Vec2> pts) {
  std::string out;
  for (const world::Vec2& p : pts) {
    if (!out.empty()) out += ' ';
    out += fmt(f.px(p.x)) + "," + fmt(f.py(p.y));
  }
  return out;
}

}  // namespace

std::vector<ReplayPaths> read_trajectory_file(const std::filesystem::path& path) {
  std::vector<ReplayPaths> out;
  for (const json& j : read_jsonl(path)) {
    try {
      ReplayPaths r;
      r.episode = j.at("episode").get<int>();
      r.task_id = j.value("task_id", "");
      r.term_reason = j.value("term_reason", "");
      r.leader = path_from_json(j.at("leader"));
      r.follower = path_from_json(j.at("follower"));
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  if (out.empty()) throw ParseError(path.string() + ": no trajectories");
  return out;
}

const ReplayPaths& select_episode(const std::vector<ReplayPaths>& records, int episode) {
  if (records.empty()) throw ContractError("no trajectories to select from");
  if (episode < 0) return records.back();
  for (const ReplayPaths& r : records) {
    if (r.episode == episode) return r;
  }
  throw ContractError("episode " + std::to_string(episode) + " not in trajectory file");
}

std::string render_svg(const world::Corridor& corridor, std::span<const ReplayPaths> records) {
  const world::CorridorGeometry g = world::build_geometry(corridor);
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  auto grow = [&](world::Vec2 p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  for (const world::Vec2& p : g.pipe_polygon) grow(p);
  for (const ReplayPaths& r : records) {
    for (const world::Vec2& p : r.leader) grow(p);
    for (const world::Vec2& p : r.follower) grow(p);
  }
  constexpr double kMargin = 5.0;
  constexpr double kScale = 4.0;  // px per metre
  min_x -= kMargin;
  max_x += kMargin;
  min_y -= kMargin;
  max_y += kMargin;
  const Frame f{min_x, max_y, kScale};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt((max_x - min_x) * kScale) +
         "\" height=\"" + fmt((max_y - min_y) * kScale) + "\">\n";
  svg += "<title>" + corridor.task_id + "</title>\n";
  svg += "<polygon class=\"pipe\" points=\"" + points_attr(f, g.pipe_polygon) +
         "\" fill=\"#e8f1fa\" stroke=\"#333\" stroke-width=\"2\"/>\n";
  for (const auto& poly : g.obstacle_polygons) {
    svg += "<polygon class=\"obstacle\" points=\"" + points_attr(f, poly) + "\" fill=\"#888\"/>\n";
  }
  svg += "<polyline class=\"centerline\" points=\"" + points_attr(f, corridor.centerline) +
         "\" fill=\"none\" stroke=\"#aab\" stroke-dasharray=\"6 4\"/>\n";
  const world::CenterlineFrame goal = world::frame_at(corridor, corridor.goal_progress);
  const world::Vec2 n = world::left_normal(goal.tangent) * (corridor.width / 2.0);
  const std::vector<world::Vec2> goal_line{goal.point + n, goal.point - n};
  svg += "<polyline class=\"goal\" points=\"" + points_attr(f, goal_line) +
         "\" fill=\"none\" stroke=\"#2a2\" stroke-width=\"3\"/>\n";
  for (const ReplayPaths& r : records) {
    const std::string ep = std::to_string(r.episode);
    svg += "<polyline class=\"leader\" data-episode=\"" + ep + "\" points=\"" + points_attr(f, r.leader) +
           "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    svg += "<polyline class=\"follower\" data-episode=\"" + ep + "\" points=\"" +
           points_attr(f, r.follower) + "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace magaisil::service
