#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace tsspam {

using Index = Eigen::Index;

/// Clamped knot vector on [a, b] with evenly spaced interior knots.
///
/// `order` is the spline order l (degree l-1). The boundary knots a and b are
/// carried with multiplicity l, so the padded vector has K + 2l entries for K
/// interior knots and supports q = K + l basis functions.
struct KnotVector {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> interior;
  int order = 1;
  std::vector<double> padded;

  Index basis_count() const { return static_cast<Index>(interior.size()) + order; }
};

/// Uniform clamped knot vector with `n_interior` evenly spaced interior knots.
/// Throws std::invalid_argument on a >= b or order < 1.
KnotVector build_uniform_knots(double a, double b, Index n_interior, int order);

/// B-spline basis over a clamped knot vector, evaluated with the stable
/// Cox-de Boor triangular recursion. At any x in [a, b] at most `order`
/// functions are nonzero, each phi_k >= 0, and sum_k phi_k(x) = 1.
class BSplineBasis {
 public:
  explicit BSplineBasis(KnotVector knots);

  Index size() const { return q_; }
  const KnotVector& knots() const { return knots_; }
  double a() const { return knots_.a; }
  double b() const { return knots_.b; }
  int order() const { return knots_.order; }

  /// Dense evaluation of (phi_1(x), ..., phi_q(x)). Values of x outside
  /// [a, b] are clamped to the interval; NaN is rejected.
  Eigen::VectorXd eval(double x) const;

  /// Local evaluation: writes the `order` nonzero values into `values` and
  /// returns the index of the first nonzero basis function.
  Index eval_local(double x, Eigen::Ref<Eigen::VectorXd> values) const;

 private:
  Index find_span(double x) const;

  KnotVector knots_;
  Index q_ = 0;
};

/// Basis with per-function offsets subtracted, so that the centered functions
/// psi_k(x) = phi_k(x) - offset_k sum to zero over the centering sample.
class CenteredBasis {
 public:
  CenteredBasis(BSplineBasis base, Eigen::VectorXd offsets);

  const BSplineBasis& base() const { return base_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }
  Index size() const { return base_.size(); }
  double a() const { return base_.a(); }
  double b() const { return base_.b(); }

  Eigen::VectorXd eval(double x) const { return base_.eval(x) - offsets_; }

 private:
  BSplineBasis base_;
  Eigen::VectorXd offsets_;
};

/// offsets_k = mean_t phi_k(sample[t]); the centered evaluations then sum to
/// ~0 over the sample. Throws on an empty or non-finite sample.
CenteredBasis center_basis(const BSplineBasis& basis,
                           const Eigen::Ref<const Eigen::VectorXd>& sample);

/// Grouped design matrix: p blocks of q columns, block j holding the centered
/// basis of predictor j evaluated at its lagged sample. Constant predictors
/// produce an all-zero block and are listed in `constant_groups`.
struct GroupedDesign {
  Eigen::MatrixXd Z;
  Index p = 0;
  Index q = 0;
  std::vector<CenteredBasis> bases;
  std::vector<Index> constant_groups;

  Index rows() const { return Z.rows(); }
  Index cols() const { return Z.cols(); }
  Index group_of(Index col) const { return col / q; }

  auto block(Index j) const { return Z.middleCols(j * q, q); }
  auto block(Index j) { return Z.middleCols(j * q, q); }
};

struct DesignOptions {
  std::optional<Index> q;     ///< basis functions per predictor; auto rule if unset
  int order = 3;              ///< spline order l (degree l-1)
  double smoothness_d = 2.0;  ///< smoothness exponent for the auto rule
};

struct DesignResult {
  GroupedDesign design;
  Eigen::VectorXd response;  ///< next-step values of the target, mean-centered
  double response_mean = 0.0;
};

/// Basis-count rule q = round(n^(1/(2d+1))) + order.
Index auto_basis_count(Index n, double d, int order);

/// Build the lag-1 design for one target: block j is predictor j's centered
/// basis evaluated at rows 1..n-1, each on its own empirical interval
/// [min_j, max_j] padded by 1e-9 of the range; the response is the target's
/// rows 2..n minus their mean.
DesignResult build_design(const Eigen::Ref<const Eigen::MatrixXd>& series,
                          Index target, const DesignOptions& options = {});

}  // namespace tsspam
