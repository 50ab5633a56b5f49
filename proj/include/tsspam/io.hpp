#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "tsspam/model.hpp"
#include "tsspam/synth.hpp"

namespace tsspam {

/// Rectangular labeled series: one header row, n time-ordered records.
struct SeriesFile {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};

/// Parse a UTF-8 CSV with a header row and decimal-point reals. Throws
/// std::invalid_argument naming the offending row/column on any non-numeric
/// cell, ragged row, or duplicate label.
SeriesFile read_series_csv(const std::string& path);

/// Write a series with a header row; numbers carry 17 significant digits so
/// doubles round-trip exactly. The write is atomic (temp file + rename).
void write_series_csv(const std::string& path, const SeriesFile& file);

/// Format a double with 17 significant digits.
std::string format_double(double value);

/// Atomically write text to a path (temp file in the same directory, then
/// rename).
void write_text_atomic(const std::string& path, const std::string& content);

/// Elementwise log returns log(1 + (X[t] - X[t-1]) / X[t-1]); output has one
/// row fewer. Throws naming the row/column of any nonpositive price.
Eigen::MatrixXd log_returns(const Eigen::Ref<const Eigen::MatrixXd>& prices);

/// DOT digraph with weight attributes; deterministic edge order (by target,
/// then weight descending, then source index).
std::string export_graph_dot(const CausalGraph& graph);

/// JSON {"edges": [{"from", "to", "weight"}, ...]} with the same ordering.
std::string export_graph_json(const CausalGraph& graph);

/// Serialize fits with full path diagnostics (per-entry supports and group
/// norms; the full coefficient vector only for the selected entry).
void save_fits_json(const std::string& path, const std::vector<TsSpamFit>& fits,
                    const std::vector<std::string>& labels);

struct LoadedFits {
  std::vector<TsSpamFit> fits;
  std::vector<std::string> labels;
};

LoadedFits load_fits_json(const std::string& path);

void save_truth_json(const std::string& path, const SynthConfig& config,
                     const GroundTruth& truth);

struct LoadedTruth {
  SynthConfig config;
  GroundTruth truth;
};

LoadedTruth load_truth_json(const std::string& path);

/// Build a causal graph from loaded fits (selected supports and weights).
CausalGraph graph_from_fits(const std::vector<TsSpamFit>& fits, Index p,
                            std::vector<std::string> labels);

/// Default column labels X1..Xp.
std::vector<std::string> default_labels(Index p);

}  // namespace tsspam
