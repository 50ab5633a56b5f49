#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "tsspam/penalty.hpp"
#include "tsspam/spline.hpp"

namespace tsspam {

/// Group-structured coefficient vector: p contiguous groups of length q.
struct Coefficients {
  Eigen::VectorXd value;
  Index p = 0;
  Index q = 0;

  static Coefficients zero(Index p, Index q) {
    return Coefficients{Eigen::VectorXd::Zero(p * q), p, q};
  }

  auto group(Index j) { return value.segment(j * q, q); }
  auto group(Index j) const { return value.segment(j * q, q); }
  double group_norm(Index j) const { return group(j).norm(); }

  /// Indices of groups with nonzero norm.
  std::vector<Index> support() const;
};

/// Least-squares loss ||y - Z beta||^2 / (2 n) over the design rows.
double loss(const GroupedDesign& design, const Eigen::Ref<const Eigen::VectorXd>& y,
            const Coefficients& beta);

/// Gradient Z^T (Z beta - y) / n.
Eigen::VectorXd grad_loss(const GroupedDesign& design,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Coefficients& beta);

/// Gradient of the augmented loss L + W_lambda (loss gradient plus per-group
/// concave gradients).
Eigen::VectorXd grad_augmented(const GroupedDesign& design,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Coefficients& beta, const PenaltyParams& params);

/// Full objective F_lambda = loss + sum_j r_lambda(||beta_j||).
double objective_value(const GroupedDesign& design,
                       const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Coefficients& beta, const PenaltyParams& params);

/// Approximate KKT residual: the smallest attainable max-group norm of
/// grad(L~) + lambda * xi over subgradients xi of the group norm sum. Active
/// groups contribute ||g_j + lambda beta_j/||beta_j||||, zero groups
/// max(||g_j|| - lambda, 0).
double kkt_residual(const GroupedDesign& design,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Coefficients& beta, const PenaltyParams& params);

/// Same residual from a precomputed augmented-loss gradient.
double kkt_from_grad(const Eigen::Ref<const Eigen::VectorXd>& grad_aug,
                     const Coefficients& beta, double lambda);

/// Fitted values Z beta, summing only over groups with nonzero norm.
Eigen::VectorXd fitted_values(const GroupedDesign& design, const Coefficients& beta);

struct EigRange {
  double rho_min = 0.0;
  double rho_max = 0.0;
  /// Set when the selected block has more columns than design rows.
  bool overcomplete = false;
};

/// Extreme eigenvalues of the Gram matrix (1/n) B_A^T B_A of the selected
/// groups' raw (pre-centering) basis evaluations: B_j = Z_j + 1 * offsets_j^T
/// when basis metadata is present, plain Z_j otherwise. The centered blocks
/// themselves are structurally singular (the centered functions sum to zero
/// pointwise), so the conditioning diagnostic is only informative on the raw
/// basis.
EigRange restricted_eigs(const GroupedDesign& design, std::span<const Index> groups);

}  // namespace tsspam
