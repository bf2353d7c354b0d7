#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "magaisil/world/geometry.hpp"

namespace magaisil::world {

enum class WallSide { Left, Right };

// Rectangle attached to one pipe wall, axis-aligned in the frame of the
// centerline segment that contains it. `offset` is the arc length along the
// centerline where the obstacle begins; `width` is how far it protrudes.
struct Obstacle {
  double length = 20.0;
  double width = 5.0;
  WallSide side = WallSide::Left;
  double offset = 0.0;
};

struct KinematicsConfig {
  double forward_speed = 1.5;  // m/s
  double yaw_gain = 0.3;       // rad/s per rad of rudder deflection
  double dt = 0.5;             // s
  int max_steps = 600;
};

struct Corridor {
  std::string task_id;
  std::vector<Vec2> centerline;
  double width = 30.0;
  std::vector<Obstacle> obstacles;
  double goal_progress = 240.0;
  KinematicsConfig kinematics;
  // Defaults: leader 18 m and follower 1 m along the centerline, heading
  // along the first segment.
  std::optional<Pose> leader_start;
  std::optional<Pose> follower_start;
};

// Throws InvariantError naming the offending field.
void validate(const Corridor& corridor);

double centerline_length(const Corridor& corridor);

struct CenterlineFrame {
  Vec2 point;
  Vec2 tangent;
  std::size_t segment = 0;
};

// Point and tangent at arc length `s` (clamped to the centerline).
CenterlineFrame frame_at(const Corridor& corridor, double s);

// Arc length of the centerline point closest to `p`.
double progress_of(const Corridor& corridor, Vec2 p);

Pose default_leader_start(const Corridor& corridor);
Pose default_follower_start(const Corridor& corridor);

// Derived wall geometry used by the sonar and collision checks.
struct CorridorGeometry {
  std::vector<Vec2> left_wall;
  std::vector<Vec2> right_wall;
  std::vector<std::array<Vec2, 4>> obstacle_polygons;
  std::vector<Vec2> pipe_polygon;  // closed outline: left wall then right wall reversed
  std::vector<Segment> surfaces;   // everything a sonar beam can hit
};

CorridorGeometry build_geometry(const Corridor& corridor);

// Strictly inside the pipe and outside every obstacle.
bool in_free_space(const CorridorGeometry& geometry, Vec2 p);

// Task files: TOML with keys width, goal_progress, centerline, obstacles,
// kinematics.*, optional task_id and start.{leader,follower} = [x, y, heading].
Corridor parse_task(std::string_view text, std::string_view default_task_id = "");
Corridor load_task(const std::filesystem::path& task_file);

// Accepts a path to an existing file, or a bare task name resolved against
// `search_dirs` as <dir>/<name>.toml.
std::filesystem::path resolve_task_path(const std::string& name_or_path,
                                        const std::vector<std::filesystem::path>& search_dirs);

// Default search list: $MAGAISIL_DATA_DIR/tasks, ./tasks, and the
// source-tree tasks directory.
std::vector<std::filesystem::path> default_task_dirs();

}  // namespace magaisil::world
