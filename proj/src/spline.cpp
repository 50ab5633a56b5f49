#include "tsspam/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tsspam {

KnotVector build_uniform_knots(double a, double b, Index n_interior, int order) {
  if (!(a < b)) throw std::invalid_argument("build_uniform_knots: requires a < b");
  if (order < 1) throw std::invalid_argument("build_uniform_knots: order must be >= 1");
  if (n_interior < 0) throw std::invalid_argument("build_uniform_knots: negative knot count");

  KnotVector kv;
  kv.a = a;
  kv.b = b;
  kv.order = order;
  kv.interior.resize(static_cast<std::size_t>(n_interior));
  const double step = (b - a) / static_cast<double>(n_interior + 1);
  for (Index i = 0; i < n_interior; ++i) kv.interior[static_cast<std::size_t>(i)] = a + step * static_cast<double>(i + 1);

  kv.padded.reserve(static_cast<std::size_t>(n_interior) + 2 * static_cast<std::size_t>(order));
  kv.padded.insert(kv.padded.end(), static_cast<std::size_t>(order), a);
  kv.padded.insert(kv.padded.end(), kv.interior.begin(), kv.interior.end());
  kv.padded.insert(kv.padded.end(), static_cast<std::size_t>(order), b);
  return kv;
}

BSplineBasis::BSplineBasis(KnotVector knots) : knots_(std::move(knots)) {
  if (knots_.order < 1) throw std::invalid_argument("BSplineBasis: order must be >= 1");
  if (!(knots_.a < knots_.b)) throw std::invalid_argument("BSplineBasis: requires a < b");
  q_ = knots_.basis_count();
  if (knots_.padded.size() != static_cast<std::size_t>(q_ + knots_.order))
    throw std::invalid_argument("BSplineBasis: malformed padded knot vector");
}

Index BSplineBasis::find_span(double x) const {
  const int l = knots_.order;
  const auto& t = knots_.padded;
  // Span s in [l-1, q-1] with t[s] <= x < t[s+1]; x == b falls in the last
  // nonempty span.
  auto first = t.begin() + (l - 1);
  auto last = t.begin() + q_;
  auto it = std::upper_bound(first, last, x);
  Index s = static_cast<Index>(it - t.begin()) - 1;
  return std::clamp<Index>(s, l - 1, q_ - 1);
}

Index BSplineBasis::eval_local(double x, Eigen::Ref<Eigen::VectorXd> values) const {
  if (std::isnan(x)) throw std::invalid_argument("BSplineBasis::eval: NaN input");
  x = std::clamp(x, knots_.a, knots_.b);

  const int l = knots_.order;
  const auto& t = knots_.padded;
  const Index s = find_span(x);

  // Cox-de Boor triangle; values[r] ends up as phi_{s-l+1+r}(x).
  values[0] = 1.0;
  std::vector<double> left(static_cast<std::size_t>(l)), right(static_cast<std::size_t>(l));
  for (int j = 1; j < l; ++j) {
    left[static_cast<std::size_t>(j)] = x - t[static_cast<std::size_t>(s + 1 - j)];
    right[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(s + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
      const double temp = values[r] / denom;
      values[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
      saved = left[static_cast<std::size_t>(j - r)] * temp;
    }
    values[j] = saved;
  }
  return s - l + 1;
}

Eigen::VectorXd BSplineBasis::eval(double x) const {
  Eigen::VectorXd local(knots_.order);
  const Index first = eval_local(x, local);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(q_);
  out.segment(first, knots_.order) = local;
  return out;
}

CenteredBasis::CenteredBasis(BSplineBasis base, Eigen::VectorXd offsets)
    : base_(std::move(base)), offsets_(std::move(offsets)) {
  if (offsets_.size() != base_.size())
    throw std::invalid_argument("CenteredBasis: offset length does not match basis size");
}

CenteredBasis center_basis(const BSplineBasis& basis,
                           const Eigen::Ref<const Eigen::VectorXd>& sample) {
  if (sample.size() == 0) throw std::invalid_argument("center_basis: empty sample");
  if (!sample.allFinite()) throw std::invalid_argument("center_basis: non-finite sample");

  Eigen::VectorXd offsets = Eigen::VectorXd::Zero(basis.size());
  Eigen::VectorXd local(basis.order());
  for (Index t = 0; t < sample.size(); ++t) {
    const Index first = basis.eval_local(sample[t], local);
    offsets.segment(first, basis.order()) += local;
  }
  offsets /= static_cast<double>(sample.size());
  return CenteredBasis(basis, std::move(offsets));
}

Index auto_basis_count(Index n, double d, int order) {
  if (n < 1) throw std::invalid_argument("auto_basis_count: n must be positive");
  if (d <= 0.0) throw std::invalid_argument("auto_basis_count: d must be positive");
  const double rate = std::pow(static_cast<double>(n), 1.0 / (2.0 * d + 1.0));
  return static_cast<Index>(std::llround(rate)) + order;
}

DesignResult build_design(const Eigen::Ref<const Eigen::MatrixXd>& series,
                          Index target, const DesignOptions& options) {
  const Index n = series.rows();
  const Index p = series.cols();
  if (p < 1) throw std::invalid_argument("build_design: series has no columns");
  if (target < 0 || target >= p) throw std::invalid_argument("build_design: target out of range");
  if (!series.allFinite()) throw std::invalid_argument("build_design: non-finite data");

  const int order = options.order;
  if (order < 1) throw std::invalid_argument("build_design: order must be >= 1");
  const Index q = options.q ? *options.q : auto_basis_count(n, options.smoothness_d, order);
  if (q < order)
    throw std::invalid_argument("build_design: q must be >= order (q = " + std::to_string(q) +
                                ", order = " + std::to_string(order) + ")");
  if (n < std::max<Index>(q + 2, 5))
    throw std::invalid_argument("build_design: too few samples (n = " + std::to_string(n) + ")");

  const Index n_eff = n - 1;
  DesignResult result;
  GroupedDesign& design = result.design;
  design.p = p;
  design.q = q;
  design.Z.resize(n_eff, p * q);
  design.bases.reserve(static_cast<std::size_t>(p));

  Eigen::VectorXd local(order);
  for (Index j = 0; j < p; ++j) {
    const auto x = series.col(j).head(n_eff);
    double lo = x.minCoeff();
    double hi = x.maxCoeff();
    if (lo == hi) {
      // Degenerate predictor: give it a unit interval so the basis is valid;
      // centering then zeroes the whole block.
      design.constant_groups.push_back(j);
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double pad = 1e-9 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
    BSplineBasis basis(build_uniform_knots(lo, hi, q - order, order));
    CenteredBasis centered = center_basis(basis, x);

    auto blk = design.block(j);
    for (Index t = 0; t < n_eff; ++t) {
      blk.row(t) = -centered.offsets().transpose();
      const Index first = basis.eval_local(x[t], local);
      blk.row(t).segment(first, order) += local.transpose();
    }
    design.bases.push_back(std::move(centered));
  }

  const auto y_raw = series.col(target).tail(n_eff);
  result.response_mean = y_raw.mean();
  result.response = y_raw.array() - result.response_mean;
  return result;
}

}  // namespace tsspam
