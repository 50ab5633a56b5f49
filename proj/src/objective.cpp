#include "tsspam/objective.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsspam {

std::vector<Index> Coefficients::support() const {
  std::vector<Index> out;
  for (Index j = 0; j < p; ++j)
    if (group_norm(j) > 0.0) out.push_back(j);
  return out;
}

namespace {

void check_dims(const GroupedDesign& design, const Eigen::Ref<const Eigen::VectorXd>& y,
                const Coefficients& beta) {
  if (design.rows() != y.size())
    throw std::invalid_argument("objective: response length does not match design rows");
  if (design.cols() != beta.value.size() || design.p != beta.p || design.q != beta.q)
    throw std::invalid_argument("objective: coefficient layout does not match design");
}

}  // namespace

Eigen::VectorXd fitted_values(const GroupedDesign& design, const Coefficients& beta) {
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(design.rows());
  for (Index j = 0; j < beta.p; ++j) {
    const auto seg = beta.group(j);
    if (!seg.isZero(0.0)) fitted.noalias() += design.block(j) * seg;
  }
  return fitted;
}

double loss(const GroupedDesign& design, const Eigen::Ref<const Eigen::VectorXd>& y,
            const Coefficients& beta) {
  check_dims(design, y, beta);
  const double n = static_cast<double>(design.rows());
  return (y - fitted_values(design, beta)).squaredNorm() / (2.0 * n);
}

Eigen::VectorXd grad_loss(const GroupedDesign& design,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Coefficients& beta) {
  check_dims(design, y, beta);
  const double n = static_cast<double>(design.rows());
  const Eigen::VectorXd residual = fitted_values(design, beta) - y;
  return design.Z.transpose() * residual / n;
}

Eigen::VectorXd grad_augmented(const GroupedDesign& design,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const Coefficients& beta, const PenaltyParams& params) {
  Eigen::VectorXd g = grad_loss(design, y, beta);
  for (Index j = 0; j < beta.p; ++j)
    add_concave_grad(params, beta.group(j), g.segment(j * beta.q, beta.q));
  return g;
}

double objective_value(const GroupedDesign& design,
                       const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Coefficients& beta, const PenaltyParams& params) {
  double value = loss(design, y, beta);
  for (Index j = 0; j < beta.p; ++j) value += penalty_value(params, beta.group_norm(j));
  return value;
}

double kkt_from_grad(const Eigen::Ref<const Eigen::VectorXd>& grad_aug,
                     const Coefficients& beta, double lambda) {
  double kappa = 0.0;
  for (Index j = 0; j < beta.p; ++j) {
    const auto g = grad_aug.segment(j * beta.q, beta.q);
    const double norm = beta.group_norm(j);
    double contribution;
    if (norm > 0.0) {
      contribution = (g + (lambda / norm) * beta.group(j)).norm();
    } else {
      contribution = std::max(g.norm() - lambda, 0.0);
    }
    kappa = std::max(kappa, contribution);
  }
  return kappa;
}

double kkt_residual(const GroupedDesign& design,
                    const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Coefficients& beta, const PenaltyParams& params) {
  return kkt_from_grad(grad_augmented(design, y, beta, params), beta, params.lambda);
}

EigRange restricted_eigs(const GroupedDesign& design, std::span<const Index> groups) {
  const Index q = design.q;
  const Index m = static_cast<Index>(groups.size());
  if (m == 0) throw std::invalid_argument("restricted_eigs: empty group set");
  for (const Index j : groups)
    if (j < 0 || j >= design.p) throw std::invalid_argument("restricted_eigs: group out of range");

  const Index n = design.rows();
  Eigen::MatrixXd raw(n, m * q);
  const bool has_bases = static_cast<Index>(design.bases.size()) == design.p;
  for (Index k = 0; k < m; ++k) {
    raw.middleCols(k * q, q) = design.block(groups[static_cast<std::size_t>(k)]);
    if (has_bases) {
      const auto& offsets = design.bases[static_cast<std::size_t>(groups[static_cast<std::size_t>(k)])].offsets();
      raw.middleCols(k * q, q).rowwise() += offsets.transpose();
    }
  }

  const Eigen::MatrixXd gram = raw.transpose() * raw / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  EigRange out;
  out.rho_min = solver.eigenvalues().minCoeff();
  out.rho_max = solver.eigenvalues().maxCoeff();
  out.overcomplete = m * q > n;
  return out;
}

}  // namespace tsspam
