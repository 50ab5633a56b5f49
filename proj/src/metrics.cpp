#include "tsspam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsspam {

Prf precision_recall_f1(const std::vector<Index>& estimated, const std::vector<Index>& truth) {
  if (truth.empty()) throw std::invalid_argument("precision_recall_f1: empty truth set");

  std::vector<Index> est_sorted = estimated;
  std::vector<Index> truth_sorted = truth;
  std::sort(est_sorted.begin(), est_sorted.end());
  std::sort(truth_sorted.begin(), truth_sorted.end());
  std::vector<Index> both;
  std::set_intersection(est_sorted.begin(), est_sorted.end(), truth_sorted.begin(),
                        truth_sorted.end(), std::back_inserter(both));

  Prf out;
  const double hits = static_cast<double>(both.size());
  if (est_sorted.empty()) {
    out.precision = 1.0;  // no false positives; flagged as a convention
    out.empty_estimate = true;
  } else {
    out.precision = hits / static_cast<double>(est_sorted.size());
  }
  out.recall = hits / static_cast<double>(truth_sorted.size());
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

std::vector<F1Point> f1_curve(const SolutionPath& path, const std::vector<Index>& truth) {
  std::vector<F1Point> curve;
  curve.reserve(path.entries.size());
  for (const auto& entry : path.entries) {
    const Prf prf = precision_recall_f1(entry.support, truth);
    curve.push_back({entry.lambda, prf.precision, prf.recall, prf.f1});
  }
  return curve;
}

namespace {

/// One-step-ahead prediction from a coefficient vector and the bases of the
/// design it was fitted on.
double predict_next(const std::vector<CenteredBasis>& bases, const Coefficients& beta,
                    const std::vector<Index>& support, double response_mean,
                    const Eigen::Ref<const Eigen::RowVectorXd>& x_prev) {
  double value = response_mean;
  for (const Index j : support)
    value += bases[static_cast<std::size_t>(j)].eval(x_prev[j]).dot(beta.group(j));
  return value;
}

}  // namespace

CvResult forward_cv(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
                    const FitConfig& config, int folds) {
  const Index n = series.rows();
  if (folds < 1) throw std::invalid_argument("forward_cv: folds must be >= 1");
  const Index window = (n / 2) / folds;
  if (window < 1) throw std::invalid_argument("forward_cv: series too short for fold count");
  const Index first_train_end = n - static_cast<Index>(folds) * window;

  CvResult result;
  result.lambdas = config.path.lambda_sequence;
  if (result.lambdas.empty()) {
    // Grid from the shortest training prefix: available to every fold
    // without looking past its own window.
    const DesignResult first = build_design(series.topRows(first_train_end), target, config.design);
    const double l0 = lambda_zero(first.design, first.response);
    double lam = l0;
    const double floor = config.path.lambda_min.value_or(l0 * 1e-3);
    for (int m = 1; m <= config.path.n_lambdas; ++m) {
      lam *= config.path.decay;
      if (lam < floor) break;
      result.lambdas.push_back(lam);
    }
    if (result.lambdas.empty()) result.lambdas.push_back(l0 * config.path.decay);
  }

  const Index n_lambdas = static_cast<Index>(result.lambdas.size());
  result.fold_mse.setZero(folds, n_lambdas);

  for (int k = 0; k < folds; ++k) {
    const Index train_end = first_train_end + static_cast<Index>(k) * window;
    const DesignResult built = build_design(series.topRows(train_end), target, config.design);

    PistaConfig path_config = config.path;
    path_config.lambda_sequence = result.lambdas;
    const SolutionPath path = pista_solve(built.design, built.response, path_config, config.penalty);

    for (Index m = 0; m < n_lambdas; ++m) {
      const auto& entry = path.entries[static_cast<std::size_t>(m)];
      double err = 0.0;
      for (Index t = train_end; t < train_end + window; ++t) {
        const double pred = predict_next(built.design.bases, entry.beta, entry.support,
                                         built.response_mean, series.row(t - 1));
        const double diff = series(t, target) - pred;
        err += diff * diff;
      }
      result.fold_mse(k, m) = err / static_cast<double>(window);
    }
  }

  result.mean_mse.resize(static_cast<std::size_t>(n_lambdas));
  Index best = 0;
  for (Index m = 0; m < n_lambdas; ++m) {
    result.mean_mse[static_cast<std::size_t>(m)] = result.fold_mse.col(m).mean();
    if (result.mean_mse[static_cast<std::size_t>(m)] <
        result.mean_mse[static_cast<std::size_t>(best)])
      best = m;  // strict comparison: ties keep the larger lambda
  }
  result.best_lambda = result.lambdas[static_cast<std::size_t>(best)];
  return result;
}

double prediction_mse(const TsSpamFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& holdout) {
  const Index m = holdout.rows();
  if (m < 2) throw std::invalid_argument("prediction_mse: holdout needs at least two rows");
  if (holdout.cols() != static_cast<Index>(fit.bases.size()))
    throw std::invalid_argument("prediction_mse: holdout width does not match the fit");

  double err = 0.0;
  for (Index t = 0; t + 1 < m; ++t) {
    const double pred = predict_next(fit.bases, fit.beta_hat, fit.support, fit.response_mean,
                                     holdout.row(t));
    const double diff = holdout(t + 1, fit.target) - pred;
    err += diff * diff;
  }
  return err / static_cast<double>(m - 1);
}

}  // namespace tsspam
