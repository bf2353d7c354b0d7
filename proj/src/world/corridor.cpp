#include "magaisil/world/corridor.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "magaisil/common/error.hpp"

namespace magaisil::world {
namespace {

Vec2 segment_dir(const Corridor& c, std::size_t i) {
  return unit(c.centerline[i + 1] - c.centerline[i]);
}

std::vector<double> cumulative_lengths(const Corridor& c) {
  std::vector<double> cum(c.centerline.size(), 0.0);
  for (std::size_t i = 1; i < c.centerline.size(); ++i) {
    cum[i] = cum[i - 1] + norm(c.centerline[i] - c.centerline[i - 1]);
  }
  return cum;
}

// Polyline offset by `offset` along the left normal, with mitered joints.
std::vector<Vec2> offset_polyline(const Corridor& c, double offset) {
  const std::size_t n = c.centerline.size();
  std::vector<Vec2> out;
  out.reserve(n);
  out.push_back(c.centerline[0] + offset * left_normal(segment_dir(c, 0)));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 d_prev = segment_dir(c, i - 1);
    const Vec2 d_next = segment_dir(c, i);
    const Vec2 p_prev = c.centerline[i] + offset * left_normal(d_prev);
    const Vec2 p_next = c.centerline[i] + offset * left_normal(d_next);
    const auto miter = line_intersection(p_prev, d_prev, p_next, d_next);
    out.push_back(miter ? *miter : p_next);
  }
  out.push_back(c.centerline[n - 1] + offset * left_normal(segment_dir(c, n - 2)));
  return out;
}

std::array<Vec2, 4> obstacle_polygon(const Corridor& c, const Obstacle& o) {
  const std::vector<double> cum = cumulative_lengths(c);
  const CenterlineFrame frame = frame_at(c, o.offset);
  const Vec2 t = frame.tangent;
  const Vec2 n = left_normal(t);
  const double half = 0.5 * c.width;
  const double v_wall = o.side == WallSide::Left ? half : -half;
  const double v_face = o.side == WallSide::Left ? half - o.width : -half + o.width;
  const Vec2 origin = frame.point;
  return {origin + v_wall * n, origin + o.length * t + v_wall * n,
          origin + o.length * t + v_face * n, origin + v_face * n};
}

}  // namespace

double centerline_length(const Corridor& corridor) {
  return cumulative_lengths(corridor).back();
}

CenterlineFrame frame_at(const Corridor& corridor, double s) {
  const std::vector<double> cum = cumulative_lengths(corridor);
  const std::size_t segments = corridor.centerline.size() - 1;
  std::size_t i = 0;
  while (i + 1 < segments && s >= cum[i + 1]) ++i;
  const Vec2 t = segment_dir(corridor, i);
  const double local = std::clamp(s - cum[i], 0.0, cum[i + 1] - cum[i]);
  return {corridor.centerline[i] + local * t, t, i};
}

double progress_of(const Corridor& corridor, Vec2 p) {
  const std::vector<double> cum = cumulative_lengths(corridor);
  double best_dist = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i + 1 < corridor.centerline.size(); ++i) {
    const Vec2 a = corridor.centerline[i];
    const Vec2 edge = corridor.centerline[i + 1] - a;
    const double len = norm(edge);
    const double t = std::clamp(dot(p - a, edge) / (len * len), 0.0, 1.0);
    const double d = norm(p - (a + t * edge));
    if (d < best_dist) {
      best_dist = d;
      best_s = cum[i] + t * len;
    }
  }
  return best_s;
}

namespace {
Pose start_at(const Corridor& c, double s) {
  const CenterlineFrame f = frame_at(c, s);
  return {f.point.x, f.point.y, std::atan2(f.tangent.y, f.tangent.x)};
}
}  // namespace

Pose default_leader_start(const Corridor& corridor) {
  return corridor.leader_start ? *corridor.leader_start : start_at(corridor, 18.0);
}

Pose default_follower_start(const Corridor& corridor) {
  return corridor.follower_start ? *corridor.follower_start : start_at(corridor, 1.0);
}

void validate(const Corridor& c) {
  if (!(c.width > 0.0) || !std::isfinite(c.width)) {
    throw InvariantError("width", "must be a positive finite number");
  }
  if (c.centerline.size() < 2) {
    throw InvariantError("centerline", "needs at least two waypoints");
  }
  for (std::size_t i = 0; i < c.centerline.size(); ++i) {
    const Vec2 p = c.centerline[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvariantError("centerline", "waypoint " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && c.centerline[i - 1] == p) {
      throw InvariantError("centerline", "waypoints " + std::to_string(i - 1) + " and " +
                                             std::to_string(i) + " coincide");
    }
  }
  const double total = centerline_length(c);
  if (!(c.goal_progress > 0.0) || c.goal_progress > total) {
    throw InvariantError("goal_progress", "must lie in (0, centerline length = " +
                                              std::to_string(total) + "]");
  }
  const KinematicsConfig& k = c.kinematics;
  if (!(k.forward_speed > 0.0)) throw InvariantError("kinematics.forward_speed", "must be positive");
  if (!(k.yaw_gain > 0.0)) throw InvariantError("kinematics.yaw_gain", "must be positive");
  if (!(k.dt > 0.0)) throw InvariantError("kinematics.dt", "must be positive");
  if (k.max_steps <= 0) throw InvariantError("kinematics.max_steps", "must be positive");

  // Mitered walls must keep the orientation of their centerline segment,
  // otherwise a turn is too sharp for the pipe width.
  const double half = 0.5 * c.width;
  for (double side : {half, -half}) {
    const std::vector<Vec2> wall = offset_polyline(c, side);
    for (std::size_t i = 0; i + 1 < wall.size(); ++i) {
      if (dot(wall[i + 1] - wall[i], c.centerline[i + 1] - c.centerline[i]) <= 0.0) {
        throw InvariantError("centerline", "segment " + std::to_string(i) +
                                               " is too short for the pipe width");
      }
    }
  }

  const std::vector<double> cum = cumulative_lengths(c);
  for (std::size_t k2 = 0; k2 < c.obstacles.size(); ++k2) {
    const Obstacle& o = c.obstacles[k2];
    const std::string field = "obstacles[" + std::to_string(k2) + "]";
    if (!(o.length > 0.0) || !(o.width > 0.0)) {
      throw InvariantError(field, "length and width must be positive");
    }
    if (o.width >= c.width) throw InvariantError(field, "blocks the whole pipe");
    if (o.offset < 0.0 || o.offset + o.length > total) {
      throw InvariantError(field, "extends past the centerline");
    }
    const CenterlineFrame frame = frame_at(c, o.offset);
    const std::size_t seg = frame.segment;
    if (o.offset + o.length > cum[seg + 1] + 1e-9) {
      throw InvariantError(field, "spans a turn; obstacles must sit on a single straight");
    }
    // The wall segment on that side must cover the obstacle's along-track span.
    const std::vector<Vec2> wall = offset_polyline(c, o.side == WallSide::Left ? half : -half);
    const Vec2 t = frame.tangent;
    const double wall_begin = dot(wall[seg] - c.centerline[seg], t);
    const double wall_end = dot(wall[seg + 1] - c.centerline[seg], t);
    const double local_begin = o.offset - cum[seg];
    if (local_begin < wall_begin - 1e-9 || local_begin + o.length > wall_end + 1e-9) {
      throw InvariantError(field, "does not lie along the pipe wall");
    }
  }
}

CorridorGeometry build_geometry(const Corridor& corridor) {
  validate(corridor);
  CorridorGeometry g;
  const double half = 0.5 * corridor.width;
  g.left_wall = offset_polyline(corridor, half);
  g.right_wall = offset_polyline(corridor, -half);
  for (std::size_t i = 0; i + 1 < g.left_wall.size(); ++i) {
    g.surfaces.push_back({g.left_wall[i], g.left_wall[i + 1]});
    g.surfaces.push_back({g.right_wall[i], g.right_wall[i + 1]});
  }
  g.surfaces.push_back({g.left_wall.front(), g.right_wall.front()});
  g.surfaces.push_back({g.left_wall.back(), g.right_wall.back()});
  for (const Obstacle& o : corridor.obstacles) {
    const auto poly = obstacle_polygon(corridor, o);
    g.obstacle_polygons.push_back(poly);
    for (std::size_t i = 0; i < 4; ++i) g.surfaces.push_back({poly[i], poly[(i + 1) % 4]});
  }
  g.pipe_polygon = g.left_wall;
  g.pipe_polygon.insert(g.pipe_polygon.end(), g.right_wall.rbegin(), g.right_wall.rend());
  return g;
}

bool in_free_space(const CorridorGeometry& geometry, Vec2 p) {
  if (!point_in_polygon(p, geometry.pipe_polygon)) return false;
  for (const auto& poly : geometry.obstacle_polygons) {
    if (point_in_polygon(p, poly)) return false;
  }
  return true;
}

std::vector<std::filesystem::path> default_task_dirs() {
  std::vector<std::filesystem::path> dirs;
  if (const char* data = std::getenv("MAGAISIL_DATA_DIR")) {
    dirs.emplace_back(std::filesystem::path(data) / "tasks");
  }
  dirs.emplace_back("tasks");
#ifdef MAGAISIL_SOURCE_TASK_DIR
  dirs.emplace_back(MAGAISIL_SOURCE_TASK_DIR);
#endif
  return dirs;
}

std::filesystem::path resolve_task_path(const std::string& name_or_path,
                                        const std::vector<std::filesystem::path>& search_dirs) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  for (const auto& dir : search_dirs) {
    const auto candidate = dir / (name_or_path + ".toml");
    if (std::filesystem::is_regular_file(candidate)) return candidate;
  }
  throw IoError("task not found: " + name_or_path);
}

}  // namespace magaisil::world
