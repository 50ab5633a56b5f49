// Command-line front end: simulate / fit / eval / graph / logreturn /
// replicate-synthetic.
//
// Exit codes: 0 success, 2 input error, 3 solver nonconvergence on a
// requested entry, 4 internal error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "tsspam/io.hpp"
#include "tsspam/metrics.hpp"
#include "tsspam/model.hpp"
#include "tsspam/parallel.hpp"
#include "tsspam/pista.hpp"
#include "tsspam/synth.hpp"

namespace fs = std::filesystem;
using namespace tsspam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitInternal = 4;

std::string prefixed(const std::string& prefix, const std::string& name) {
  if (prefix.empty()) return name;
  if (prefix.back() == '/' || prefix.back() == '_') return prefix + name;
  return prefix + "_" + name;
}

struct FitFlags {
  std::string input;
  std::string target = "1";
  Index q = 0;  // 0 = auto rule
  int order = 3;
  double smoothness_d = 2.0;
  double gamma = 1.0;
  std::string penalty = "mcp";
  double lambda_min = 0.0;
  double decay = 0.95;
  double epsilon = 1e-4;
  int n_lambdas = 100;
  double eta0 = 1.0;
  int max_inner = 10000;
  double sigma = 0.0;
  std::string select = "cv";
  std::string truth_path;
  int cv_folds = 3;
  std::string out;
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
  cmd->add_option("--input", flags.input, "input series CSV")->required();
  cmd->add_option("--target", flags.target, "1-based target index, or 'all'");
  cmd->add_option("--q", flags.q, "basis functions per predictor (0 = auto rule)");
  cmd->add_option("--order", flags.order, "spline order (degree + 1)");
  cmd->add_option("--d", flags.smoothness_d, "smoothness exponent for the auto q rule");
  cmd->add_option("--gamma", flags.gamma, "MCP concavity parameter");
  cmd->add_option("--penalty", flags.penalty, "mcp | glasso")
      ->check(CLI::IsMember({"mcp", "glasso"}));
  cmd->add_option("--lambda-min", flags.lambda_min, "path floor (0 = default)");
  cmd->add_option("--decay", flags.decay, "geometric decay of the lambda grid");
  cmd->add_option("--epsilon", flags.epsilon, "KKT tolerance factor");
  cmd->add_option("--n-lambdas", flags.n_lambdas, "maximum number of path stages");
  cmd->add_option("--eta0", flags.eta0, "initial inverse step size");
  cmd->add_option("--max-inner", flags.max_inner, "inner iteration cap per stage");
  cmd->add_option("--sigma", flags.sigma,
                  "noise scale; ends the path at the theoretical lambda when set");
  cmd->add_option("--select", flags.select, "f1 | cv | fixed:<lambda>");
  cmd->add_option("--truth", flags.truth_path, "truth JSON (required for --select f1)");
  cmd->add_option("--cv-folds", flags.cv_folds, "forward-chaining folds");
  cmd->add_option("--out", flags.out, "output fit JSON")->required();
}

FitConfig make_fit_config(const FitFlags& flags) {
  FitConfig config;
  if (flags.q > 0) config.design.q = flags.q;
  config.design.order = flags.order;
  config.design.smoothness_d = flags.smoothness_d;
  config.penalty.kind =
      flags.penalty == "mcp" ? PenaltyKind::GroupMcp : PenaltyKind::GroupLasso;
  config.penalty.gamma = flags.gamma;
  config.path.decay = flags.decay;
  config.path.epsilon = flags.epsilon;
  config.path.n_lambdas = flags.n_lambdas;
  config.path.eta0 = flags.eta0;
  config.path.max_inner_iters = flags.max_inner;
  if (flags.lambda_min > 0.0) config.path.lambda_min = flags.lambda_min;
  if (flags.sigma > 0.0) config.path.sigma = flags.sigma;
  config.cv_folds = flags.cv_folds;
  config.keep_path_betas = false;

  if (flags.select == "cv") {
    config.selection = SelectionRule::ForwardCv;
  } else if (flags.select == "f1") {
    config.selection = SelectionRule::F1Truth;
    if (flags.truth_path.empty())
      throw std::invalid_argument("--select f1 requires --truth");
    config.truth = load_truth_json(flags.truth_path).truth.active_set;
  } else if (flags.select.rfind("fixed:", 0) == 0) {
    config.selection = SelectionRule::FixedLambda;
    config.fixed_lambda = std::stod(flags.select.substr(6));
    if (!(config.fixed_lambda > 0.0))
      throw std::invalid_argument("--select fixed:<lambda> needs a positive lambda");
  } else {
    throw std::invalid_argument("unknown --select rule '" + flags.select + "'");
  }
  return config;
}

int run_simulate(const SynthConfig& synth, const std::string& out_prefix) {
  const SynthResult data = generate(synth);
  SeriesFile file;
  file.labels = default_labels(synth.p);
  file.values = data.series;
  write_series_csv(prefixed(out_prefix, "series.csv"), file);
  save_truth_json(prefixed(out_prefix, "truth.json"), synth, data.truth);
  if (data.reseeds > 0)
    std::cerr << "note: trajectory reseeded " << data.reseeds << " time(s)\n";
  return kExitOk;
}

int run_fit(const FitFlags& flags) {
  const SeriesFile file = read_series_csv(flags.input);
  const FitConfig config = make_fit_config(flags);

  std::vector<Index> targets;
  if (flags.target == "all") {
    for (Index i = 0; i < file.values.cols(); ++i) targets.push_back(i);
    if (config.selection == SelectionRule::F1Truth)
      throw std::invalid_argument("--select f1 needs a single target");
  } else {
    const Index t = static_cast<Index>(std::stoll(flags.target));
    if (t < 1 || t > file.values.cols())
      throw std::invalid_argument("--target out of range 1.." +
                                  std::to_string(file.values.cols()));
    targets.push_back(t - 1);
  }

  std::vector<TsSpamFit> fits(targets.size());
  parallel_for(static_cast<Index>(targets.size()), [&](Index k) {
    fits[static_cast<std::size_t>(k)] =
        fit_target(file.values, targets[static_cast<std::size_t>(k)], config);
  });

  save_fits_json(flags.out, fits, file.labels);

  bool all_ok = true;
  for (const auto& fit : fits) {
    all_ok = all_ok && fit.path.all_converged();
    for (const auto& warning : fit.path.warnings)
      std::cerr << "warning (target " << fit.target + 1 << "): " << warning << "\n";
  }
  if (!all_ok) {
    std::cerr << "error: solver failed to converge on at least one path entry\n";
    return kExitNonconvergence;
  }
  return kExitOk;
}

int run_eval(const std::string& fit_path, const std::string& truth_path,
             const std::string& out) {
  const LoadedFits loaded = load_fits_json(fit_path);
  const LoadedTruth truth = load_truth_json(truth_path);

  std::ostringstream csv;
  csv << "target,lambda,precision,recall,f1,empty_estimate\n";
  bool any = false;
  for (const auto& fit : loaded.fits) {
    // The generator drives dimension 1 by the active set; every other
    // dimension depends only on itself.
    std::vector<Index> target_truth;
    if (fit.target == 0) {
      target_truth = truth.truth.active_set;
    } else if (!truth.config.zero_dynamics) {
      target_truth = {fit.target};
    }
    if (target_truth.empty()) continue;
    any = true;
    for (const auto& entry : fit.path.entries) {
      const Prf prf = precision_recall_f1(entry.support, target_truth);
      csv << fit.target + 1 << ',' << format_double(entry.lambda) << ','
          << format_double(prf.precision) << ',' << format_double(prf.recall) << ','
          << format_double(prf.f1) << ',' << (prf.empty_estimate ? 1 : 0) << '\n';
    }
  }
  if (!any) throw std::invalid_argument("eval: no fit in the file has a known truth set");
  write_text_atomic(out, csv.str());
  return kExitOk;
}

int run_graph(const std::string& fit_path, Index top_k, const std::string& format,
              const std::string& out) {
  const LoadedFits loaded = load_fits_json(fit_path);
  Index p = 0;
  for (const auto& fit : loaded.fits) p = std::max(p, fit.beta_hat.p);
  CausalGraph graph = graph_from_fits(loaded.fits, p, loaded.labels);

  if (top_k > 0) {
    CausalGraph trimmed;
    trimmed.p = graph.p;
    trimmed.labels = graph.labels;
    for (const auto& fit : loaded.fits) {
      const auto top = top_k_parents(graph, fit.target, top_k);
      trimmed.edges.insert(trimmed.edges.end(), top.begin(), top.end());
    }
    graph = std::move(trimmed);
  }

  const std::string text =
      format == "dot" ? export_graph_dot(graph) : export_graph_json(graph);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_atomic(out, text);
  }
  return kExitOk;
}

int run_logreturn(const std::string& input, const std::string& out) {
  const SeriesFile file = read_series_csv(input);
  SeriesFile returns;
  returns.labels = file.labels;
  returns.values = log_returns(file.values);
  write_series_csv(out, returns);
  return kExitOk;
}

struct ReplicateFlags {
  int seeds = 100;
  std::uint64_t seed_base = 1;
  std::string out_dir;
  Index p = 300;
  Index n = 500;
  Index active = 10;
  Index q = 3;
  int order = 3;
  double gamma = 1.0;
  double epsilon = 1e-4;
  double decay = 0.95;
  double lambda_max = 0.35;
  double lambda_min = 0.014;
  double contraction = 0.9;
  double parent_scale = 1.0;
  std::string penalty = "both";
};

int run_replicate(const ReplicateFlags& flags) {
  fs::create_directories(flags.out_dir);

  std::vector<double> grid;
  for (double lam = flags.lambda_max; lam >= flags.lambda_min; lam *= flags.decay)
    grid.push_back(lam);
  if (grid.empty()) throw std::invalid_argument("replicate-synthetic: empty lambda grid");

  std::vector<PenaltyKind> kinds;
  if (flags.penalty == "both" || flags.penalty == "mcp")
    kinds.push_back(PenaltyKind::GroupMcp);
  if (flags.penalty == "both" || flags.penalty == "glasso")
    kinds.push_back(PenaltyKind::GroupLasso);
  if (kinds.empty())
    throw std::invalid_argument("replicate-synthetic: --penalty must be mcp, glasso, or both");

  std::vector<std::string> rows(static_cast<std::size_t>(flags.seeds));
  std::vector<bool> converged(static_cast<std::size_t>(flags.seeds), true);

  parallel_for(flags.seeds, [&](Index k) {
    SynthConfig synth;
    synth.p = flags.p;
    synth.n = flags.n;
    synth.n_active = flags.active;
    synth.contraction = flags.contraction;
    synth.parent_scale = flags.parent_scale;
    synth.seed = flags.seed_base + static_cast<std::uint64_t>(k);
    const SynthResult data = generate(synth);

    DesignOptions dopts;
    dopts.q = flags.q;
    dopts.order = flags.order;
    const DesignResult built = build_design(data.series, 0, dopts);

    std::ostringstream out;
    for (const PenaltyKind kind : kinds) {
      PistaConfig path_config;
      path_config.lambda_sequence = grid;
      path_config.epsilon = flags.epsilon;
      const SolutionPath path =
          pista_solve(built.design, built.response, path_config,
                      PenaltyParams{0.0, flags.gamma, kind});
      if (!path.all_converged()) converged[static_cast<std::size_t>(k)] = false;
      const auto curve = f1_curve(path, data.truth.active_set);
      const char* name = kind == PenaltyKind::GroupMcp ? "mcp" : "glasso";
      for (const auto& point : curve) {
        out << synth.seed << ',' << name << ',' << format_double(point.lambda)
            << ",precision," << format_double(point.precision) << '\n'
            << synth.seed << ',' << name << ',' << format_double(point.lambda) << ",recall,"
            << format_double(point.recall) << '\n'
            << synth.seed << ',' << name << ',' << format_double(point.lambda) << ",f1,"
            << format_double(point.f1) << '\n';
      }
    }
    rows[static_cast<std::size_t>(k)] = out.str();
  });

  std::ostringstream csv;
  csv << "seed,penalty,lambda,metric,value\n";
  for (const auto& row : rows) csv << row;
  write_text_atomic((fs::path(flags.out_dir) / "metrics.csv").string(), csv.str());

  for (const bool ok : converged)
    if (!ok) {
      std::cerr << "error: solver failed to converge on at least one path entry\n";
      return kExitNonconvergence;
    }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TS-SpAM: nonlinear Granger causality via sparse additive models"};
  app.require_subcommand(1);

  std::function<int()> action;

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic series with ground truth");
  SynthConfig synth;
  std::string out_prefix;
  simulate->add_option("--p", synth.p, "number of dimensions");
  simulate->add_option("--n", synth.n, "series length after burn-in");
  simulate->add_option("--active", synth.n_active, "number of parents of dimension 1");
  simulate->add_option("--seed", synth.seed, "random seed");
  simulate->add_option("--noise-half-width", synth.noise_half_width, "uniform noise half width");
  simulate->add_option("--burn-in", synth.burn_in, "discarded warm-up steps");
  simulate->add_option("--contraction", synth.contraction, "stability margin in (0,1)");
  simulate->add_option("--parent-scale", synth.parent_scale,
                       "multiplier on the driving cubics");
  simulate->add_flag("--zero-dynamics", synth.zero_dynamics, "zero all component functions");
  simulate->add_option("--out-prefix", out_prefix, "output path prefix")->required();
  simulate->callback([&] { action = [&] { return run_simulate(synth, out_prefix); }; });

  // fit
  auto* fit = app.add_subcommand("fit", "fit one or all targets along a lambda path");
  FitFlags fit_flags;
  add_fit_flags(fit, fit_flags);
  fit->callback([&] { action = [&] { return run_fit(fit_flags); }; });

  // eval
  auto* eval = app.add_subcommand("eval", "support-recovery metrics per path entry");
  std::string eval_fit, eval_truth, eval_out;
  eval->add_option("--fit", eval_fit, "fit JSON")->required();
  eval->add_option("--truth", eval_truth, "truth JSON")->required();
  eval->add_option("--out", eval_out, "output metrics CSV")->required();
  eval->callback([&] { action = [&] { return run_eval(eval_fit, eval_truth, eval_out); }; });

  // graph
  auto* graph = app.add_subcommand("graph", "export the recovered causal graph");
  std::string graph_fit, graph_format = "dot", graph_out;
  Index top_k = 0;
  graph->add_option("--fit", graph_fit, "fit JSON")->required();
  graph->add_option("--top-k", top_k, "keep only the k strongest parents per target (0 = all)");
  graph->add_option("--format", graph_format, "dot | json")
      ->check(CLI::IsMember({"dot", "json"}));
  graph->add_option("--out", graph_out, "output path (default: stdout)");
  graph->callback(
      [&] { action = [&] { return run_graph(graph_fit, top_k, graph_format, graph_out); }; });

  // logreturn
  auto* logreturn = app.add_subcommand("logreturn", "convert a price table to log returns");
  std::string lr_in, lr_out;
  logreturn->add_option("--input", lr_in, "price CSV (positive entries)")->required();
  logreturn->add_option("--out", lr_out, "output CSV")->required();
  logreturn->callback([&] { action = [&] { return run_logreturn(lr_in, lr_out); }; });

  // replicate-synthetic
  auto* replicate =
      app.add_subcommand("replicate-synthetic", "synthetic support-recovery experiment");
  ReplicateFlags rep;
  replicate->add_option("--seeds", rep.seeds, "number of training sets");
  replicate->add_option("--seed-base", rep.seed_base, "first seed");
  replicate->add_option("--out", rep.out_dir, "output directory")->required();
  replicate->add_option("--p", rep.p, "dimensions");
  replicate->add_option("--n", rep.n, "series length");
  replicate->add_option("--active", rep.active, "parents of dimension 1");
  replicate->add_option("--q", rep.q, "basis functions per predictor");
  replicate->add_option("--order", rep.order, "spline order");
  replicate->add_option("--gamma", rep.gamma, "MCP concavity parameter");
  replicate->add_option("--epsilon", rep.epsilon, "KKT tolerance factor");
  replicate->add_option("--decay", rep.decay, "lambda grid decay");
  replicate->add_option("--lambda-max", rep.lambda_max, "top of the shared lambda grid");
  replicate->add_option("--lambda-min", rep.lambda_min, "bottom of the shared lambda grid");
  replicate->add_option("--contraction", rep.contraction, "generator stability margin");
  replicate->add_option("--parent-scale", rep.parent_scale, "multiplier on driving cubics");
  replicate->add_option("--penalty", rep.penalty, "mcp | glasso | both")
      ->check(CLI::IsMember({"mcp", "glasso", "both"}));
  replicate->callback([&] { action = [&] { return run_replicate(rep); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    return action();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
