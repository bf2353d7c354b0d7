#include "magaisil/world/sonar.hpp"

#include <algorithm>
#include <vector>

namespace magaisil::world {

double SonarScan::min() const {
  return *std::min_element(sector_min.begin(), sector_min.end());
}

double beam_angle(int k) {
  return kSonarHalfFov - k * (2.0 * kSonarHalfFov) / (kSonarBeams - 1);
}

SonarScan cast_sonar(const CorridorGeometry& geometry, const Pose& pose, double max_range) {
  const Vec2 origin = pose.position();
  thread_local std::vector<const Segment*> nearby;
  nearby.clear();
  for (const Segment& s : geometry.surfaces) {
    if (point_segment_distance(origin, s) <= max_range) nearby.push_back(&s);
  }

  SonarScan scan;
  scan.sector_min.fill(max_range);
  for (int k = 0; k < kSonarBeams; ++k) {
    const Vec2 dir = direction(pose.heading + beam_angle(k));
    double range = max_range;
    for (const Segment* s : nearby) {
      if (const auto hit = ray_segment_distance(origin, dir, *s); hit && *hit < range) {
        range = *hit;
      }
    }
    double& sector = scan.sector_min[k / kBeamsPerSector];
    sector = std::min(sector, range);
  }
  return scan;
}

std::optional<SonarScan> raycast_sonar(const CorridorGeometry& geometry, const Pose& pose,
                                       double max_range) {
  if (!in_free_space(geometry, pose.position())) return std::nullopt;
  return cast_sonar(geometry, pose, max_range);
}

}  // namespace magaisil::world
