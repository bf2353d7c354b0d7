#pragma once

#include <span>
#include <vector>

#include "magaisil/algo/types.hpp"

namespace magaisil::algo {

struct AdvantageEstimate {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + value estimates
};

// GAE(lambda) backward recursion; `bootstrap_value` stands in for V(s_T).
AdvantageEstimate compute_gae(std::span<const double> rewards, std::span<const double> values,
                              double bootstrap_value, double gamma, double lambda);

// Uses the discriminator rewards and value estimates stored on the steps.
AdvantageEstimate compute_gae(const Trajectory& trajectory, double gamma, double lambda);

// Shifts to mean 0 and scales to unit standard deviation (population).
void normalize_advantages(std::vector<double>& advantages);

}  // namespace magaisil::algo
