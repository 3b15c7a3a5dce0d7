#include "agrl/rng.hpp"

#include <cmath>

namespace agrl {

double Rng::normal() {
  // Box-Muller; u1 nudged away from 0 so log() stays finite.
  double u1 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace agrl
