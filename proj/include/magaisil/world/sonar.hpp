#pragma once

#include <array>
#include <optional>

#include "magaisil/world/corridor.hpp"

namespace magaisil::world {

inline constexpr int kSonarSectors = 6;
inline constexpr int kBeamsPerSector = 100;
inline constexpr int kSonarBeams = kSonarSectors * kBeamsPerSector;
inline constexpr double kSonarMaxRange = 33.0;
inline constexpr double kSonarHalfFov = std::numbers::pi / 3.0;

// Per-sector minimum beam range. Sector 0 is the leftmost (+60 deg to
// +40 deg relative to heading), sector 5 the rightmost.
struct SonarScan {
  std::array<double, kSonarSectors> sector_min{};

  // Shortest distance over all sectors.
  double min() const;
  friend bool operator==(const SonarScan&, const SonarScan&) = default;
};

// Heading-relative angle of beam `k`; beams span [-pi/3, pi/3] inclusive,
// ordered left to right.
double beam_angle(int k);

// Casts from any pose, without checking free space.
SonarScan cast_sonar(const CorridorGeometry& geometry, const Pose& pose,
                     double max_range = kSonarMaxRange);

// nullopt when the pose is not in free space (callers treat it as a collision).
std::optional<SonarScan> raycast_sonar(const CorridorGeometry& geometry, const Pose& pose,
                                       double max_range = kSonarMaxRange);

}  // namespace magaisil::world
