#include "tsspam/penalty.hpp"

#include <stdexcept>

namespace tsspam {

namespace {

void check(const PenaltyParams& params, double group_norm) {
  if (group_norm < 0.0) throw std::invalid_argument("penalty: negative group norm");
  if (params.lambda < 0.0) throw std::invalid_argument("penalty: negative lambda");
  if (params.gamma <= 0.0) throw std::invalid_argument("penalty: gamma must be positive");
}

}  // namespace

double penalty_value(const PenaltyParams& params, double group_norm) {
  check(params, group_norm);
  const double z = group_norm;
  if (params.kind == PenaltyKind::GroupLasso) return params.lambda * z;
  if (z < params.lambda * params.gamma)
    return params.lambda * z - z * z / (2.0 * params.gamma);
  return params.lambda * params.lambda * params.gamma / 2.0;
}

double concave_value(const PenaltyParams& params, double group_norm) {
  check(params, group_norm);
  if (params.kind == PenaltyKind::GroupLasso) return 0.0;
  const double z = group_norm;
  if (z < params.lambda * params.gamma) return -z * z / (2.0 * params.gamma);
  return (params.lambda * params.lambda * params.gamma - 2.0 * params.lambda * z) / 2.0;
}

Eigen::VectorXd concave_grad(const PenaltyParams& params,
                             const Eigen::Ref<const Eigen::VectorXd>& beta_group) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(beta_group.size());
  add_concave_grad(params, beta_group, out);
  return out;
}

void add_concave_grad(const PenaltyParams& params,
                      const Eigen::Ref<const Eigen::VectorXd>& beta_group,
                      Eigen::Ref<Eigen::VectorXd> out) {
  if (params.kind == PenaltyKind::GroupLasso) return;
  check(params, 0.0);
  const double norm = beta_group.norm();
  if (norm == 0.0) return;
  if (norm < params.lambda * params.gamma) {
    out -= beta_group / params.gamma;
  } else {
    out -= (params.lambda / norm) * beta_group;
  }
}

}  // namespace tsspam
