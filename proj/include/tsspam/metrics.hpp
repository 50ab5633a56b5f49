#pragma once

#include <Eigen/Dense>

#include <vector>

#include "tsspam/model.hpp"

namespace tsspam {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Precision is reported as 1 for an empty estimate; this flag records it.
  bool empty_estimate = false;
};

/// Support-recovery metrics. Requires a non-empty truth set.
Prf precision_recall_f1(const std::vector<Index>& estimated, const std::vector<Index>& truth);

struct F1Point {
  double lambda = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

std::vector<F1Point> f1_curve(const SolutionPath& path, const std::vector<Index>& truth);

struct CvResult {
  double best_lambda = 0.0;
  std::vector<double> lambdas;
  std::vector<double> mean_mse;  ///< per lambda, averaged over folds
  Eigen::MatrixXd fold_mse;      ///< folds x lambdas
};

/// Expanding-window forward-chaining cross validation: fold k trains on a
/// prefix and scores one-step-ahead squared error on the following window
/// (the validation windows tile the second half of the series). All folds
/// share the lambda grid derived from the shortest training prefix, so no
/// fold sees data beyond its own window. Ties go to the larger lambda.
CvResult forward_cv(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
                    const FitConfig& config, int folds);

/// Mean one-step-ahead squared error of a fit on a holdout continuation.
double prediction_mse(const TsSpamFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& holdout);

}  // namespace tsspam
