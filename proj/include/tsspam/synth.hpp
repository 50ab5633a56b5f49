#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "tsspam/rng.hpp"
#include "tsspam/spline.hpp"

namespace tsspam {

struct SynthConfig {
  Index p = 300;
  Index n = 500;
  Index n_active = 10;  ///< parents of dimension 1, drawn from the other dims
  double noise_half_width = 0.4;
  std::uint64_t seed = 1;
  Index burn_in = 200;
  double contraction = 0.9;
  /// Override: zero every component function, leaving pure noise.
  bool zero_dynamics = false;
  /// Multiplier applied to the driving cubics after standardization; > 1
  /// forces the strong-signal regime of the recovery guarantee.
  double parent_scale = 1.0;
};

/// Cubic through the origin, f(x) = a x + b x^2 + c x^3.
struct Cubic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double x) const { return x * (a + x * (b + x * c)); }
  double deriv(double x) const { return a + x * (2.0 * b + x * 3.0 * c); }
  double norm() const;
  /// Exact maximum of |f'| over [lo, hi] (endpoints plus the interior
  /// extremum of the quadratic derivative).
  double max_abs_deriv(double lo, double hi) const;
  /// Exact maximum of |f| over [lo, hi] (endpoints plus interior critical
  /// points).
  double max_abs_value(double lo, double hi) const;
};

struct GroundTruth {
  std::vector<Index> active_set;    ///< parents of dimension 1 (ascending)
  std::vector<Cubic> parent_fns;    ///< parallel to active_set
  std::vector<Cubic> diagonal_fns;  ///< size p; entry 1 unused (no self-loop)
};

struct SynthResult {
  Eigen::MatrixXd series;  ///< n x p, burn-in discarded
  GroundTruth truth;
  int reseeds = 0;
};

/// Unit-sphere cubic coefficient triple.
Cubic unit_sphere_cubic(Rng& rng);

/// Unit-sphere triple rescaled so that max |f'| <= derivative_budget over
/// [-interval_half_width, interval_half_width]; coefficients are never scaled
/// up past unit norm.
Cubic standardized_cubic(Rng& rng, double interval_half_width, double derivative_budget);

struct StabilizedCubic {
  Cubic fn;
  double scale = 0.0;  ///< applied to the unit triple, in (0, 1]
  double reach = 0.0;  ///< invariant interval half-width of x <- fn(x) + noise
};

/// Largest scale s <= 1 such that x <- s f(x) + noise admits an invariant
/// interval [-M, M] on which |s f'| stays below `contraction`. The resulting
/// reach M never exceeds noise_half_width / (1 - contraction).
StabilizedCubic stabilize_cubic(const Cubic& unit, double noise_half_width, double contraction);

/// Nonlinear autoregressive generator: dimension 1 is driven by n_active
/// randomly chosen other dimensions through unit-norm cubics; every other
/// dimension follows its own scalar cubic recursion, rescaled to a uniform
/// contraction so the chain stays bounded and mixing. Noise is uniform on
/// [-noise_half_width, noise_half_width] in every dimension. Deterministic
/// per seed; a trajectory breaching the blow-up guard triggers a
/// deterministic reseed (at most 10, then an error).
SynthResult generate(const SynthConfig& config);

}  // namespace tsspam
