#include "tsspam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsspam {

double Cubic::norm() const { return std::sqrt(a * a + b * b + c * c); }

double Cubic::max_abs_deriv(double lo, double hi) const {
  double best = std::max(std::abs(deriv(lo)), std::abs(deriv(hi)));
  if (c != 0.0) {
    const double vertex = -b / (3.0 * c);
    if (vertex > lo && vertex < hi) best = std::max(best, std::abs(deriv(vertex)));
  }
  return best;
}

double Cubic::max_abs_value(double lo, double hi) const {
  double best = std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
  // Interior critical points: roots of a + 2b x + 3c x^2.
  if (c != 0.0) {
    const double disc = b * b - 3.0 * a * c;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      for (const double x : {(-b + root) / (3.0 * c), (-b - root) / (3.0 * c)})
        if (x > lo && x < hi) best = std::max(best, std::abs((*this)(x)));
    }
  } else if (b != 0.0) {
    const double x = -a / (2.0 * b);
    if (x > lo && x < hi) best = std::max(best, std::abs((*this)(x)));
  }
  return best;
}

Cubic unit_sphere_cubic(Rng& rng) {
  for (;;) {
    Cubic f{rng.normal(), rng.normal(), rng.normal()};
    const double norm = f.norm();
    if (norm > 1e-12) {
      f.a /= norm;
      f.b /= norm;
      f.c /= norm;
      return f;
    }
  }
}

Cubic standardized_cubic(Rng& rng, double interval_half_width, double derivative_budget) {
  if (interval_half_width <= 0.0)
    throw std::invalid_argument("standardized_cubic: interval half width must be positive");
  if (derivative_budget <= 0.0)
    throw std::invalid_argument("standardized_cubic: derivative budget must be positive");
  Cubic f = unit_sphere_cubic(rng);
  const double sup = f.max_abs_deriv(-interval_half_width, interval_half_width);
  const double scale = std::min(1.0, derivative_budget / sup);
  return Cubic{f.a * scale, f.b * scale, f.c * scale};
}

namespace {

/// Smallest invariant half-width of x <- s f(x) + noise, found by iterating
/// the reach map M <- s max|f| + hw from below. Returns false when the map
/// has no fixed point (the scaled recursion can escape).
bool invariant_reach(const Cubic& f, double scale, double noise_half_width, double& reach) {
  double m = noise_half_width;
  for (int it = 0; it < 500; ++it) {
    const double next = scale * f.max_abs_value(-m, m) + noise_half_width;
    if (next <= m * (1.0 + 1e-12)) {
      reach = m * (1.0 + 1e-9);
      return scale * f.max_abs_value(-reach, reach) + noise_half_width <= reach;
    }
    m = next;
    if (m > 1e4) return false;
  }
  return false;
}

bool stable_at(const Cubic& f, double scale, double noise_half_width, double contraction,
               double& reach) {
  if (!invariant_reach(f, scale, noise_half_width, reach)) return false;
  return scale * f.max_abs_deriv(-reach, reach) <= contraction;
}

}  // namespace

StabilizedCubic stabilize_cubic(const Cubic& unit, double noise_half_width, double contraction) {
  if (noise_half_width <= 0.0)
    throw std::invalid_argument("stabilize_cubic: noise half width must be positive");
  if (contraction <= 0.0 || contraction >= 1.0)
    throw std::invalid_argument("stabilize_cubic: contraction must lie in (0, 1)");

  StabilizedCubic out;
  double reach = noise_half_width;
  if (stable_at(unit, 1.0, noise_half_width, contraction, reach)) {
    out.scale = 1.0;
  } else {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (stable_at(unit, mid, noise_half_width, contraction, reach)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.scale = lo;
    stable_at(unit, lo, noise_half_width, contraction, reach);
  }
  out.reach = reach;
  out.fn = Cubic{unit.a * out.scale, unit.b * out.scale, unit.c * out.scale};
  return out;
}

namespace {

constexpr double kBlowUpGuard = 1e6;
constexpr int kMaxReseeds = 10;
constexpr std::uint64_t kReseedStride = 0x9E3779B97F4A7C15ULL;

struct Attempt {
  Eigen::MatrixXd series;
  GroundTruth truth;
  bool stable = true;
};

Attempt run_attempt(const SynthConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Attempt out;

  // Parents of dimension 1 are sampled without replacement from the other
  // dimensions (no self-loop on the driven dimension).
  std::vector<Index> candidates;
  candidates.reserve(static_cast<std::size_t>(cfg.p - 1));
  for (Index j = 1; j < cfg.p; ++j) candidates.push_back(j);
  for (Index k = 0; k < cfg.n_active; ++k) {
    const auto pick =
        k + static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(candidates.size() - k)));
    std::swap(candidates[static_cast<std::size_t>(k)], candidates[static_cast<std::size_t>(pick)]);
  }
  out.truth.active_set.assign(candidates.begin(), candidates.begin() + cfg.n_active);
  std::sort(out.truth.active_set.begin(), out.truth.active_set.end());

  // Driving cubics keep their unit norm (scaled only by parent_scale):
  // dimension 1 feeds nothing back, so its inputs' stability is all that
  // matters for the joint chain.
  out.truth.parent_fns.reserve(out.truth.active_set.size());
  for (std::size_t k = 0; k < out.truth.active_set.size(); ++k) {
    Cubic f = cfg.zero_dynamics ? Cubic{} : unit_sphere_cubic(rng);
    f.a *= cfg.parent_scale;
    f.b *= cfg.parent_scale;
    f.c *= cfg.parent_scale;
    out.truth.parent_fns.push_back(f);
  }

  // Each recurrent dimension keeps a unit-norm cubic, with the sphere
  // direction redrawn until the full-strength scalar recursion is stable:
  // an invariant interval exists and |f'| stays below the contraction
  // constant on it. The interval is then at most hw / (1 - contraction).
  out.truth.diagonal_fns.assign(static_cast<std::size_t>(cfg.p), Cubic{});
  for (Index i = 1; i < cfg.p && !cfg.zero_dynamics; ++i) {
    Cubic f;
    bool stable = false;
    double reach = 0.0;
    for (int draw = 0; draw < 2000 && !stable; ++draw) {
      f = unit_sphere_cubic(rng);
      stable = stable_at(f, 1.0, cfg.noise_half_width, cfg.contraction, reach);
    }
    if (!stable) f = stabilize_cubic(f, cfg.noise_half_width, cfg.contraction).fn;
    out.truth.diagonal_fns[static_cast<std::size_t>(i)] = f;
  }

  Eigen::VectorXd state(cfg.p);
  for (Index i = 0; i < cfg.p; ++i)
    state[i] = rng.uniform(-cfg.noise_half_width, cfg.noise_half_width);

  out.series.resize(cfg.n, cfg.p);
  Eigen::VectorXd next(cfg.p);
  for (Index t = 0; t < cfg.burn_in + cfg.n; ++t) {
    double drive = 0.0;
    for (std::size_t k = 0; k < out.truth.active_set.size(); ++k)
      drive += out.truth.parent_fns[k](state[out.truth.active_set[k]]);
    next[0] = drive + rng.uniform(-cfg.noise_half_width, cfg.noise_half_width);
    for (Index i = 1; i < cfg.p; ++i)
      next[i] = out.truth.diagonal_fns[static_cast<std::size_t>(i)](state[i]) +
                rng.uniform(-cfg.noise_half_width, cfg.noise_half_width);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kBlowUpGuard) {
      out.stable = false;
      return out;
    }
    state = next;
    if (t >= cfg.burn_in) out.series.row(t - cfg.burn_in) = state.transpose();
  }
  return out;
}

}  // namespace

SynthResult generate(const SynthConfig& cfg) {
  if (cfg.p < 1) throw std::invalid_argument("generate: p must be positive");
  if (cfg.n < 1) throw std::invalid_argument("generate: n must be positive");
  if (cfg.n_active < 0 || cfg.n_active >= cfg.p)
    throw std::invalid_argument("generate: n_active must lie in [0, p)");
  if (cfg.noise_half_width <= 0.0)
    throw std::invalid_argument("generate: noise half width must be positive");
  if (cfg.parent_scale <= 0.0)
    throw std::invalid_argument("generate: parent scale must be positive");
  if (cfg.contraction <= 0.0 || cfg.contraction >= 1.0)
    throw std::invalid_argument("generate: contraction must lie in (0, 1)");
  if (cfg.burn_in < 0) throw std::invalid_argument("generate: negative burn-in");

  for (int attempt = 0; attempt <= kMaxReseeds; ++attempt) {
    const std::uint64_t seed =
        cfg.seed ^ (static_cast<std::uint64_t>(attempt) * kReseedStride);
    Attempt run = run_attempt(cfg, seed);
    if (run.stable)
      return SynthResult{std::move(run.series), std::move(run.truth), attempt};
  }
  throw std::runtime_error("generate: trajectory unstable after 10 reseeds");
}

}  // namespace tsspam
