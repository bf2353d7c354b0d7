#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>

namespace magaisil::world {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 unit(Vec2 v) { return (1.0 / norm(v)) * v; }
// Counter-clockwise perpendicular.
constexpr Vec2 left_normal(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Planar pose; heading measured counter-clockwise from world +x.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

// Wraps into (-pi, pi].
inline double normalize_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(angle, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

// Distance along a unit-direction ray to the segment, if it is hit.
std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& seg);

double point_segment_distance(Vec2 p, const Segment& seg);

// Even-odd rule; points exactly on an edge may land on either side.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

// Intersection of two infinite lines p + t*d; nullopt when parallel.
std::optional<Vec2> line_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2);

}  // namespace magaisil::world
