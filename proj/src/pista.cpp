#include "tsspam/pista.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsspam {

long SolutionPath::total_inner_iters() const {
  long total = 0;
  for (const auto& e : entries) total += e.inner_iters;
  return total;
}

bool SolutionPath::all_converged() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const PathEntry& e) { return e.converged; });
}

double SolutionPath::max_descent_violation() const {
  double v = 0.0;
  for (const auto& e : entries) v = std::max(v, e.descent_violation);
  return v;
}

double lambda_zero(const GroupedDesign& design, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (design.rows() != y.size())
    throw std::invalid_argument("lambda_zero: response length does not match design rows");
  const double n = static_cast<double>(design.rows());
  const Eigen::VectorXd g = design.Z.transpose() * y / n;
  double best = 0.0;
  for (Index j = 0; j < design.p; ++j)
    best = std::max(best, g.segment(j * design.q, design.q).norm());
  if (best == 0.0)
    throw std::invalid_argument("lambda_zero: zero correlation with the response, nothing to fit");
  return best;
}

Eigen::VectorXd group_soft_threshold(const Eigen::Ref<const Eigen::VectorXd>& v, Index p,
                                     Index q, double lambda, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("group_soft_threshold: eta must be positive");
  if (lambda < 0.0) throw std::invalid_argument("group_soft_threshold: negative lambda");
  if (v.size() != p * q) throw std::invalid_argument("group_soft_threshold: bad vector length");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(p * q);
  for (Index j = 0; j < p; ++j) {
    const auto vj = v.segment(j * q, q);
    const double norm = vj.norm();
    if (norm * eta > lambda) out.segment(j * q, q) = vj * (1.0 - lambda / (eta * norm));
  }
  return out;
}

namespace {

double augmented_loss_value(const GroupedDesign& design,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            const Coefficients& beta, const PenaltyParams& params) {
  double value = loss(design, y, beta);
  for (Index j = 0; j < beta.p; ++j) value += concave_value(params, beta.group_norm(j));
  return value;
}

double group_l12_sum(const Coefficients& beta) {
  double value = 0.0;
  for (Index j = 0; j < beta.p; ++j) value += beta.group_norm(j);
  return value;
}

struct StepOutcome {
  Coefficients beta;
  double eta = 0.0;
  double aug_loss = 0.0;
};

/// Backtracking prox step. `aug_at_beta` and `grad` must be the augmented
/// loss and its gradient at `beta`; eta doubles until the quadratic model
/// dominates the augmented loss at the candidate.
StepOutcome backtracking_step(const Coefficients& beta, double aug_at_beta,
                              const Eigen::VectorXd& grad, const GroupedDesign& design,
                              const Eigen::Ref<const Eigen::VectorXd>& y,
                              const PenaltyParams& params, double eta_start) {
  const double slack = 1e-15 * (1.0 + std::abs(aug_at_beta));
  double eta = eta_start;
  for (int z = 0; z <= 60; ++z, eta *= 2.0) {
    const Eigen::VectorXd v = beta.value - grad / eta;
    Coefficients candidate{group_soft_threshold(v, beta.p, beta.q, params.lambda, eta),
                           beta.p, beta.q};
    const double aug_candidate = augmented_loss_value(design, y, candidate, params);
    const Eigen::VectorXd diff = candidate.value - beta.value;
    const double quad = aug_at_beta + grad.dot(diff) + 0.5 * eta * diff.squaredNorm();
    if (aug_candidate <= quad + slack)
      return {std::move(candidate), eta, aug_candidate};
  }
  throw std::runtime_error("ista_step: line search exceeded 60 doublings (ill-conditioned)");
}

}  // namespace

std::pair<Coefficients, double> ista_step(const Coefficients& beta,
                                          const GroupedDesign& design,
                                          const Eigen::Ref<const Eigen::VectorXd>& y,
                                          const PenaltyParams& params, double eta_prev) {
  if (eta_prev <= 0.0) throw std::invalid_argument("ista_step: eta must be positive");
  const Eigen::VectorXd grad = grad_augmented(design, y, beta, params);
  const double aug = augmented_loss_value(design, y, beta, params);
  StepOutcome out = backtracking_step(beta, aug, grad, design, y, params, eta_prev);
  return {std::move(out.beta), out.eta};
}

IstaResult ista_solve(const Coefficients& init, const GroupedDesign& design,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const PenaltyParams& params, double epsilon, int max_iters,
                      double& eta) {
  if (epsilon <= 0.0) throw std::invalid_argument("ista_solve: epsilon must be positive");
  if (eta <= 0.0) throw std::invalid_argument("ista_solve: eta must be positive");

  IstaResult result;
  result.beta = init;
  double aug = augmented_loss_value(design, y, result.beta, params);
  Eigen::VectorXd grad = grad_augmented(design, y, result.beta, params);
  result.kkt = kkt_from_grad(grad, result.beta, params.lambda);
  // F = (L + W) + lambda * sum_j ||beta_j|| -- the augmented loss already
  // carries the concave part.
  double objective_prev = aug + params.lambda * group_l12_sum(result.beta);

  const double tol = epsilon * params.lambda;
  while (result.kkt > tol && result.iters < max_iters) {
    StepOutcome step = backtracking_step(result.beta, aug, grad, design, y, params, eta);
    result.beta = std::move(step.beta);
    eta = step.eta;
    aug = step.aug_loss;
    ++result.iters;

    grad = grad_augmented(design, y, result.beta, params);
    result.kkt = kkt_from_grad(grad, result.beta, params.lambda);

    const double objective = aug + params.lambda * group_l12_sum(result.beta);
    result.descent_violation = std::max(result.descent_violation, objective - objective_prev);
    objective_prev = objective;
  }
  result.converged = result.kkt <= tol;
  return result;
}

namespace {

std::vector<double> make_lambda_grid(const GroupedDesign& design,
                                     const Eigen::Ref<const Eigen::VectorXd>& y,
                                     const PistaConfig& config) {
  if (!config.lambda_sequence.empty()) {
    const auto& seq = config.lambda_sequence;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i] <= 0.0)
        throw std::invalid_argument("pista_solve: lambda sequence must be positive");
      if (i > 0 && seq[i] >= seq[i - 1])
        throw std::invalid_argument("pista_solve: lambda sequence must be strictly decreasing");
    }
    return seq;
  }

  if (config.decay <= 0.0 || config.decay >= 1.0)
    throw std::invalid_argument("pista_solve: decay must lie in (0, 1)");
  if (config.n_lambdas < 1)
    throw std::invalid_argument("pista_solve: need at least one lambda stage");

  const double l0 = lambda_zero(design, y);
  const double theory = config.sigma
                            ? theoretical_lambda(static_cast<double>(design.rows()),
                                                 static_cast<double>(design.p), *config.sigma)
                            : 0.0;
  const double user_floor = config.lambda_min.value_or(0.0);

  std::vector<double> grid;
  if (config.sigma && theory >= l0) return {theory};

  double lam = l0;
  for (int m = 1; m <= config.n_lambdas; ++m) {
    lam *= config.decay;
    if (config.sigma && lam <= theory && theory >= user_floor) {
      // End the path exactly at the level the recovery guarantee targets.
      grid.push_back(theory);
      break;
    }
    if (user_floor > 0.0 && lam < user_floor) break;
    grid.push_back(lam);
  }
  if (grid.empty())
    throw std::invalid_argument("pista_solve: empty lambda grid (floor above lambda_zero)");
  return grid;
}

}  // namespace

SolutionPath pista_solve(const GroupedDesign& design,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const PistaConfig& config, const PenaltyParams& penalty_template) {
  if (config.epsilon <= 0.0) throw std::invalid_argument("pista_solve: epsilon must be positive");
  if (config.eta0 <= 0.0) throw std::invalid_argument("pista_solve: eta0 must be positive");

  SolutionPath path;
  const std::vector<double> grid = make_lambda_grid(design, y, config);

  if (penalty_template.kind == PenaltyKind::GroupMcp) {
    double rho_min = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < design.p; ++j) {
      const Index group[1] = {j};
      rho_min = std::min(rho_min, restricted_eigs(design, group).rho_min);
    }
    if (rho_min <= 1.0 / penalty_template.gamma) {
      path.warnings.push_back(
          "min single-group eigenvalue " + std::to_string(rho_min) +
          " <= 1/gamma; the concave part may cancel the loss curvature");
    }
  }

  Coefficients beta = Coefficients::zero(design.p, design.q);
  double eta = config.eta0;
  for (const double lam : grid) {
    PenaltyParams params = penalty_template;
    params.lambda = lam;
    IstaResult inner =
        ista_solve(beta, design, y, params, config.epsilon, config.max_inner_iters, eta);
    beta = inner.beta;

    PathEntry entry;
    entry.lambda = lam;
    entry.beta = inner.beta;
    entry.inner_iters = inner.iters;
    entry.final_kkt = inner.kkt;
    entry.objective = objective_value(design, y, inner.beta, params);
    entry.converged = inner.converged;
    entry.descent_violation = inner.descent_violation;
    entry.support = inner.beta.support();
    entry.group_norms.resize(static_cast<Index>(entry.support.size()));
    for (std::size_t k = 0; k < entry.support.size(); ++k)
      entry.group_norms[static_cast<Index>(k)] = inner.beta.group_norm(entry.support[k]);
    path.entries.push_back(std::move(entry));
  }
  return path;
}

double theoretical_lambda(double n, double p, double sigma) {
  if (n <= 0.0) throw std::invalid_argument("theoretical_lambda: n must be positive");
  if (p < 1.0) throw std::invalid_argument("theoretical_lambda: p must be >= 1");
  if (sigma < 0.0) throw std::invalid_argument("theoretical_lambda: negative sigma");
  return 8.0 * sigma * (std::sqrt(1.0 / n) + std::sqrt(std::log(p)) / n);
}

}  // namespace tsspam
