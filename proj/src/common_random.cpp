#include "magaisil/common/random.hpp"

#include <sstream>

#include "magaisil/common/error.hpp"

namespace magaisil {

std::string rng_state(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

void restore_rng_state(Rng& rng, const std::string& state) {
  std::istringstream in(state);
  in >> rng;
  if (in.fail()) throw ParseError("malformed rng state");
}

}  // namespace magaisil
