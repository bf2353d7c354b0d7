#include "magaisil/world/geometry.hpp"

#include <algorithm>

namespace magaisil::world {

std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& seg) {
  const Vec2 edge = seg.b - seg.a;
  const double denom = cross(dir, edge);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const Vec2 rel = seg.a - origin;
  const double t = cross(rel, edge) / denom;
  const double u = cross(rel, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

double point_segment_distance(Vec2 p, const Segment& seg) {
  const Vec2 edge = seg.b - seg.a;
  const double len2 = dot(edge, edge);
  if (len2 == 0.0) return norm(p - seg.a);
  const double t = std::clamp(dot(p - seg.a, edge) / len2, 0.0, 1.0);
  return norm(p - (seg.a + t * edge));
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::optional<Vec2> line_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2) {
  const double denom = cross(d1, d2);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = cross(p2 - p1, d2) / denom;
  return p1 + t * d1;
}

}  // namespace magaisil::world
