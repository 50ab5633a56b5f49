#include "tsspam/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsspam {

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  // Reject the partial bucket at the top so every residue is equally likely.
  const std::uint64_t excess = (kMax % n + 1) % n;
  for (;;) {
    const std::uint64_t x = gen_();
    if (excess == 0 || x <= kMax - excess) return x % n;
  }
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

}  // namespace tsspam
