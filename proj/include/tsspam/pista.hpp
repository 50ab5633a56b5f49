#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsspam/objective.hpp"

namespace tsspam {

struct PistaConfig {
  /// Explicit strictly decreasing positive grid. When empty, the grid is
  /// generated from lambda_zero with the geometric decay below.
  std::vector<double> lambda_sequence;
  int n_lambdas = 100;
  double decay = 0.95;
  std::optional<double> lambda_min;
  /// Noise scale; when set, the generated grid ends exactly at
  /// theoretical_lambda(n, p, sigma).
  std::optional<double> sigma;
  double epsilon = 1e-4;  ///< inner stop: kkt <= epsilon * lambda
  double eta0 = 1.0;      ///< initial inverse step size
  int max_inner_iters = 10000;
};

struct PathEntry {
  double lambda = 0.0;
  Coefficients beta;  ///< may be released to save memory; support stays
  int inner_iters = 0;
  double final_kkt = 0.0;
  double objective = 0.0;
  bool converged = true;
  /// Largest observed increase of F_lambda over an accepted step; exactly 0
  /// when every step descended.
  double descent_violation = 0.0;
  std::vector<Index> support;
  Eigen::VectorXd group_norms;  ///< norms of the support groups, same order
};

struct SolutionPath {
  std::vector<PathEntry> entries;
  std::vector<std::string> warnings;

  long total_inner_iters() const;
  bool all_converged() const;
  double max_descent_violation() const;
};

/// Smallest lambda at which beta = 0 is stationary:
/// max_j ||Z_j^T y / n||_2. Throws when the value is zero (nothing to fit).
double lambda_zero(const GroupedDesign& design, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Blockwise shrinkage: v_j * max(1 - lambda / (eta ||v_j||), 0) per group,
/// with zero groups mapped to zero.
Eigen::VectorXd group_soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& v, Index p,
                                     Index q, double lambda, double eta);

/// One proximal-gradient step with backtracking: doubles eta (never shrinks
/// it) until the quadratic surrogate dominates the augmented loss at the
/// candidate, then applies the group soft threshold. Returns the new iterate
/// and the accepted eta. Throws after 60 failed doublings.
std::pair<Coefficients, double> ista_step(const Coefficients& beta,
                                          const GroupedDesign& design,
                                          const Eigen::Ref<const Eigen::VectorXd>& y,
                                          const PenaltyParams& params, double eta_prev);

struct IstaResult {
  Coefficients beta;
  int iters = 0;
  double kkt = 0.0;
  bool converged = true;
  double descent_violation = 0.0;
};

/// Inner loop: proximal-gradient steps until kkt <= epsilon * lambda or the
/// iteration cap is hit (flagged, not thrown). `eta` carries the inverse
/// step size across calls; it is never decreased.
IstaResult ista_solve(const Coefficients& init, const GroupedDesign& design,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const PenaltyParams& params, double epsilon, int max_iters,
                      double& eta);

/// Outer loop: warm-started inner solves along the decreasing lambda grid.
/// The grid starts below lambda_zero (whose solution is the zero vector and
/// is not recorded) and each stage starts from the previous solution.
SolutionPath pista_solve(const GroupedDesign& design,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const PistaConfig& config, const PenaltyParams& penalty_template);

/// Regularization level of the support-recovery guarantee:
/// 8 sigma (sqrt(1/n) + sqrt(log p) / n).
double theoretical_lambda(double n, double p, double sigma);

}  // namespace tsspam
