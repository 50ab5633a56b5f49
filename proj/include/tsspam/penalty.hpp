#pragma once

#include <Eigen/Dense>

namespace tsspam {

enum class PenaltyKind { GroupMcp, GroupLasso };

struct PenaltyParams {
  double lambda = 0.0;
  double gamma = 1.0;
  PenaltyKind kind = PenaltyKind::GroupMcp;
};

/// Per-group regularizer r_lambda(z) on the group norm z >= 0.
/// GroupMcp: lambda*z - z^2/(2 gamma) below the saturation radius
/// z = lambda*gamma, constant lambda^2 gamma / 2 beyond it.
/// GroupLasso: lambda*z.
double penalty_value(const PenaltyParams& params, double group_norm);

/// Concave part w_lambda(z) = r_lambda(z) - lambda*z. Identically zero for
/// the group lasso.
double concave_value(const PenaltyParams& params, double group_norm);

/// Gradient of the concave part at a group vector: -beta/gamma below the
/// saturation radius, -lambda * beta/||beta|| beyond it, zero at the origin.
Eigen::VectorXd concave_grad(const PenaltyParams& params,
                             const Eigen::Ref<const Eigen::VectorXd>& beta_group);

/// In-place variant used by the solver: adds the concave gradient of one
/// group into `out`.
void add_concave_grad(const PenaltyParams& params,
                      const Eigen::Ref<const Eigen::VectorXd>& beta_group,
                      Eigen::Ref<Eigen::VectorXd> out);

}  // namespace tsspam
