#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "tsspam/pista.hpp"
#include "tsspam/spline.hpp"

namespace tsspam {

enum class SelectionRule { FixedLambda, F1Truth, ForwardCv };

struct FitConfig {
  DesignOptions design;
  PenaltyParams penalty;  ///< lambda is filled per stage; kind and gamma apply
  PistaConfig path;
  SelectionRule selection = SelectionRule::ForwardCv;
  double fixed_lambda = 0.0;        ///< used by SelectionRule::FixedLambda
  std::vector<Index> truth;         ///< true parent set for SelectionRule::F1Truth
  int cv_folds = 3;
  /// Drop per-entry coefficient vectors once a lambda is selected (supports
  /// and group norms are kept either way).
  bool keep_path_betas = true;
};

struct TsSpamFit {
  Index target = 0;
  SolutionPath path;
  double selected_lambda = 0.0;
  Index selected_index = 0;  ///< position of the selected entry in the path
  Coefficients beta_hat;
  std::vector<Index> support;
  std::vector<CenteredBasis> bases;
  double response_mean = 0.0;
  PenaltyParams penalty;
};

struct CausalEdge {
  Index from = 0;
  Index to = 0;
  double weight = 0.0;
};

struct CausalGraph {
  Index p = 0;
  std::vector<std::string> labels;
  std::vector<CausalEdge> edges;
};

struct OracleSolution {
  std::vector<Index> support;
  Coefficients beta;
  bool rank_deficient = false;  ///< minimum-norm solution returned when set
  double residual_norm = 0.0;
};

/// Fit one target: build the lag-1 design over all p candidate parents
/// (self-dependence included), run the pathwise solver, and select a lambda
/// by the configured rule.
TsSpamFit fit_target(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
                     const FitConfig& config);

/// Least squares restricted to the given groups, zero elsewhere. Solved by a
/// complete orthogonal decomposition; a rank-deficient restricted design
/// yields the minimum-norm solution and sets the flag. (Centering makes each
/// block rank-deficient by one, so the flag is expected on spline designs.)
OracleSolution oracle_fit(const GroupedDesign& design,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const std::vector<Index>& support);

OracleSolution oracle_fit(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
                          const std::vector<Index>& support,
                          const DesignOptions& options = {});

/// Pointwise reconstruction f_j(x) = sum_k beta_jk psi_jk(x), clamped to the
/// basis interval.
Eigen::VectorXd reconstruct_function(const TsSpamFit& fit, Index j,
                                     const Eigen::Ref<const Eigen::VectorXd>& xs);

/// Trapezoid-rule L2 distance between the reconstructed component and a
/// reference on the basis interval, after subtracting each side's grid mean.
double function_l2(const TsSpamFit& fit, Index j,
                   const std::function<double(double)>& reference, Index grid = 512);

/// Fit every target (in parallel) and assemble the recovered parent sets
/// into a graph; edge weight is the selected coefficient group norm.
CausalGraph fit_all(const Eigen::Ref<const Eigen::MatrixXd>& series, const FitConfig& config,
                    std::vector<std::string> labels = {});

/// The k strongest incoming edges of a target, ties broken toward the
/// smaller source index.
std::vector<CausalEdge> top_k_parents(const CausalGraph& graph, Index target, Index k);

}  // namespace tsspam
