#include "tsspam/model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "tsspam/metrics.hpp"
#include "tsspam/parallel.hpp"

namespace tsspam {

namespace {

std::vector<double> fixed_lambda_grid(const GroupedDesign& design,
                                      const Eigen::Ref<const Eigen::VectorXd>& y,
                                      const PistaConfig& path, double fixed) {
  if (fixed <= 0.0) throw std::invalid_argument("fit_target: fixed lambda must be positive");
  const double l0 = lambda_zero(design, y);
  std::vector<double> grid;
  double lam = l0;
  while (lam * path.decay > fixed) {
    lam *= path.decay;
    grid.push_back(lam);
  }
  grid.push_back(fixed);
  return grid;
}

Index select_entry(const TsSpamFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& series,
                   const FitConfig& config) {
  const auto& entries = fit.path.entries;
  switch (config.selection) {
    case SelectionRule::FixedLambda: {
      Index best = 0;
      for (Index i = 1; i < static_cast<Index>(entries.size()); ++i)
        if (std::abs(entries[static_cast<std::size_t>(i)].lambda - config.fixed_lambda) <
            std::abs(entries[static_cast<std::size_t>(best)].lambda - config.fixed_lambda))
          best = i;
      return best;
    }
    case SelectionRule::F1Truth: {
      if (config.truth.empty())
        throw std::invalid_argument("fit_target: F1 selection needs a non-empty truth set");
      const auto curve = f1_curve(fit.path, config.truth);
      Index best = 0;
      for (Index i = 1; i < static_cast<Index>(curve.size()); ++i)
        if (curve[static_cast<std::size_t>(i)].f1 > curve[static_cast<std::size_t>(best)].f1)
          best = i;  // ties keep the earlier (larger) lambda
      return best;
    }
    case SelectionRule::ForwardCv: {
      FitConfig cv_config = config;
      // Reuse the already computed grid so the selected lambda is on the path.
      cv_config.path.lambda_sequence.clear();
      cv_config.path.lambda_sequence.reserve(entries.size());
      for (const auto& e : entries) cv_config.path.lambda_sequence.push_back(e.lambda);
      const CvResult cv = forward_cv(series, fit.target, cv_config, config.cv_folds);
      for (Index i = 0; i < static_cast<Index>(entries.size()); ++i)
        if (entries[static_cast<std::size_t>(i)].lambda == cv.best_lambda) return i;
      return static_cast<Index>(entries.size()) - 1;
    }
  }
  throw std::logic_error("fit_target: unknown selection rule");
}

}  // namespace

TsSpamFit fit_target(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
                     const FitConfig& config) {
  DesignResult built = build_design(series, target, config.design);

  PistaConfig path_config = config.path;
  if (config.selection == SelectionRule::FixedLambda && path_config.lambda_sequence.empty())
    path_config.lambda_sequence =
        fixed_lambda_grid(built.design, built.response, path_config, config.fixed_lambda);

  TsSpamFit fit;
  fit.target = target;
  fit.response_mean = built.response_mean;
  fit.penalty = config.penalty;
  fit.path = pista_solve(built.design, built.response, path_config, config.penalty);
  fit.bases = std::move(built.design.bases);

  fit.selected_index = select_entry(fit, series, config);
  auto& chosen = fit.path.entries[static_cast<std::size_t>(fit.selected_index)];
  fit.selected_lambda = chosen.lambda;
  fit.beta_hat = chosen.beta;
  fit.support = chosen.support;

  if (!config.keep_path_betas)
    for (auto& entry : fit.path.entries) entry.beta.value.resize(0);
  return fit;
}

OracleSolution oracle_fit(const GroupedDesign& design,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const std::vector<Index>& support) {
  for (const Index j : support)
    if (j < 0 || j >= design.p) throw std::invalid_argument("oracle_fit: group out of range");

  OracleSolution out;
  out.support = support;
  out.beta = Coefficients::zero(design.p, design.q);
  if (support.empty()) {
    out.residual_norm = y.norm();
    return out;
  }

  const Index q = design.q;
  const Index m = static_cast<Index>(support.size());
  Eigen::MatrixXd restricted(design.rows(), m * q);
  for (Index k = 0; k < m; ++k)
    restricted.middleCols(k * q, q) = design.block(support[static_cast<std::size_t>(k)]);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  // Centering leaves each block with an exact null direction that floating
  // point renders as a ~1e-15 pivot; treat such directions as rank-deficient
  // so the minimum-norm solution stays finite.
  cod.setThreshold(1e-10);
  cod.compute(restricted);
  const Eigen::VectorXd solution = cod.solve(y);
  out.rank_deficient = cod.rank() < restricted.cols();
  for (Index k = 0; k < m; ++k)
    out.beta.group(support[static_cast<std::size_t>(k)]) = solution.segment(k * q, q);
  out.residual_norm = (y - restricted * solution).norm();
  return out;
}

OracleSolution oracle_fit(const Eigen::Ref<const Eigen::MatrixXd>& series, Index target,
                          const std::vector<Index>& support, const DesignOptions& options) {
  const DesignResult built = build_design(series, target, options);
  return oracle_fit(built.design, built.response, support);
}

Eigen::VectorXd reconstruct_function(const TsSpamFit& fit, Index j,
                                     const Eigen::Ref<const Eigen::VectorXd>& xs) {
  if (j < 0 || j >= static_cast<Index>(fit.bases.size()))
    throw std::invalid_argument("reconstruct_function: group out of range");
  const auto& basis = fit.bases[static_cast<std::size_t>(j)];
  const auto beta_j = fit.beta_hat.group(j);
  Eigen::VectorXd out(xs.size());
  for (Index i = 0; i < xs.size(); ++i) out[i] = basis.eval(xs[i]).dot(beta_j);
  return out;
}

double function_l2(const TsSpamFit& fit, Index j,
                   const std::function<double(double)>& reference, Index grid) {
  if (grid < 2) throw std::invalid_argument("function_l2: grid too small");
  const auto& basis = fit.bases[static_cast<std::size_t>(j)];
  const double a = basis.a();
  const double b = basis.b();
  Eigen::VectorXd xs(grid);
  for (Index i = 0; i < grid; ++i)
    xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid - 1);

  Eigen::VectorXd fitted = reconstruct_function(fit, j, xs);
  Eigen::VectorXd ref(grid);
  for (Index i = 0; i < grid; ++i) ref[i] = reference(xs[i]);

  // Trapezoid weights; both functions are mean-aligned before comparison.
  Eigen::VectorXd w = Eigen::VectorXd::Constant(grid, (b - a) / static_cast<double>(grid - 1));
  w[0] *= 0.5;
  w[grid - 1] *= 0.5;
  const double total = w.sum();
  fitted.array() -= w.dot(fitted) / total;
  ref.array() -= w.dot(ref) / total;
  return std::sqrt(w.dot((fitted - ref).cwiseAbs2()));
}

CausalGraph fit_all(const Eigen::Ref<const Eigen::MatrixXd>& series, const FitConfig& config,
                    std::vector<std::string> labels) {
  const Index p = series.cols();
  CausalGraph graph;
  graph.p = p;
  graph.labels = std::move(labels);

  std::vector<std::vector<CausalEdge>> per_target(static_cast<std::size_t>(p));
  parallel_for(p, [&](Index i) {
    const TsSpamFit fit = fit_target(series, i, config);
    auto& edges = per_target[static_cast<std::size_t>(i)];
    for (const Index j : fit.support)
      edges.push_back({j, i, fit.beta_hat.group_norm(j)});
  });

  for (auto& edges : per_target) {
    std::sort(edges.begin(), edges.end(), [](const CausalEdge& x, const CausalEdge& y) {
      if (x.weight != y.weight) return x.weight > y.weight;
      return x.from < y.from;
    });
    graph.edges.insert(graph.edges.end(), edges.begin(), edges.end());
  }
  return graph;
}

std::vector<CausalEdge> top_k_parents(const CausalGraph& graph, Index target, Index k) {
  std::vector<CausalEdge> incoming;
  for (const auto& e : graph.edges)
    if (e.to == target) incoming.push_back(e);
  std::sort(incoming.begin(), incoming.end(), [](const CausalEdge& x, const CausalEdge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.from < y.from;
  });
  if (static_cast<Index>(incoming.size()) > k) incoming.resize(static_cast<std::size_t>(k));
  return incoming;
}

}  // namespace tsspam
