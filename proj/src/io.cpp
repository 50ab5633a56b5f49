#include "tsspam/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tsspam {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col_no) {
  const std::string text = trim(cell);
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    fail("parse error at row " + std::to_string(line_no) + ", column " + std::to_string(col_no) +
         ": '" + text + "' is not a finite number");
  return value;
}

}  // namespace

SeriesFile read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) fail("'" + path + "': empty file");
  SeriesFile file;
  for (auto& cell : split_line(line)) file.labels.push_back(trim(cell));
  const std::size_t p = file.labels.size();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (file.labels[i] == file.labels[j])
        fail("'" + path + "': duplicate column label '" + file.labels[i] + "'");

  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != p)
      fail("'" + path + "': ragged row " + std::to_string(line_no) + " has " +
           std::to_string(cells.size()) + " cells, expected " + std::to_string(p));
    for (std::size_t c = 0; c < p; ++c) data.push_back(parse_cell(cells[c], line_no, c + 1));
    ++rows;
  }

  file.values.resize(static_cast<Index>(rows), static_cast<Index>(p));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < p; ++c)
      file.values(static_cast<Index>(r), static_cast<Index>(c)) = data[r * p + c];
  return file;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const std::string tmp = path + ".tmp" + std::to_string(rd() % 0xFFFFFF);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write '" + tmp + "'");
    out << content;
    if (!out) fail("write failed for '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

void write_series_csv(const std::string& path, const SeriesFile& file) {
  if (static_cast<Index>(file.labels.size()) != file.values.cols())
    fail("write_series_csv: label count does not match columns");
  std::ostringstream out;
  for (std::size_t c = 0; c < file.labels.size(); ++c) {
    if (c) out << ',';
    out << file.labels[c];
  }
  out << '\n';
  for (Index r = 0; r < file.values.rows(); ++r) {
    for (Index c = 0; c < file.values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(file.values(r, c));
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

Eigen::MatrixXd log_returns(const Eigen::Ref<const Eigen::MatrixXd>& prices) {
  const Index n = prices.rows();
  if (n < 2) fail("log_returns: need at least two rows of prices");
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < prices.cols(); ++c)
      if (!(prices(r, c) > 0.0))
        fail("log_returns: nonpositive price at row " + std::to_string(r + 1) + ", column " +
             std::to_string(c + 1));

  Eigen::MatrixXd out(n - 1, prices.cols());
  for (Index r = 1; r < n; ++r)
    for (Index c = 0; c < prices.cols(); ++c)
      out(r - 1, c) = std::log1p((prices(r, c) - prices(r - 1, c)) / prices(r - 1, c));
  return out;
}

namespace {

std::string label_of(const CausalGraph& graph, Index i) {
  if (i < static_cast<Index>(graph.labels.size())) return graph.labels[static_cast<std::size_t>(i)];
  return "X" + std::to_string(i + 1);
}

std::vector<CausalEdge> ordered_edges(const CausalGraph& graph) {
  std::vector<CausalEdge> edges = graph.edges;
  std::sort(edges.begin(), edges.end(), [](const CausalEdge& x, const CausalEdge& y) {
    if (x.to != y.to) return x.to < y.to;
    if (x.weight != y.weight) return x.weight > y.weight;
    return x.from < y.from;
  });
  return edges;
}

std::string quote_dot(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

json cubic_to_json(const Cubic& f) { return json{{"a", f.a}, {"b", f.b}, {"c", f.c}}; }

Cubic cubic_from_json(const json& j) {
  return Cubic{j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>()};
}

}  // namespace

std::string export_graph_dot(const CausalGraph& graph) {
  std::ostringstream out;
  out << "digraph causal {\n";
  for (const auto& e : ordered_edges(graph))
    out << "  " << quote_dot(label_of(graph, e.from)) << " -> " << quote_dot(label_of(graph, e.to))
        << " [weight=" << format_double(e.weight) << "];\n";
  out << "}\n";
  return out.str();
}

std::string export_graph_json(const CausalGraph& graph) {
  json edges = json::array();
  for (const auto& e : ordered_edges(graph))
    edges.push_back(json{{"from", label_of(graph, e.from)},
                         {"to", label_of(graph, e.to)},
                         {"weight", e.weight}});
  return json{{"edges", edges}}.dump(2) + "\n";
}

std::vector<std::string> default_labels(Index p) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) labels.push_back("X" + std::to_string(i + 1));
  return labels;
}

namespace {

json support_to_json(const std::vector<Index>& support) {
  json arr = json::array();
  for (const Index j : support) arr.push_back(j + 1);
  return arr;
}

std::vector<Index> support_from_json(const json& arr) {
  std::vector<Index> out;
  for (const auto& v : arr) out.push_back(v.get<Index>() - 1);
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

}  // namespace

void save_fits_json(const std::string& path, const std::vector<TsSpamFit>& fits,
                    const std::vector<std::string>& labels) {
  json root;
  root["format"] = "tsspam-fit-v1";
  root["labels"] = labels;
  json jfits = json::array();
  for (const auto& fit : fits) {
    json jf;
    jf["target"] = fit.target + 1;
    jf["p"] = fit.beta_hat.p;
    jf["q"] = fit.beta_hat.q;
    jf["response_mean"] = fit.response_mean;
    jf["penalty"] = {{"kind", fit.penalty.kind == PenaltyKind::GroupMcp ? "mcp" : "glasso"},
                     {"gamma", fit.penalty.gamma}};
    jf["selected_lambda"] = fit.selected_lambda;
    jf["selected_index"] = fit.selected_index;
    jf["support"] = support_to_json(fit.support);
    jf["beta"] = vector_to_json(fit.beta_hat.value);

    json jbases = json::array();
    for (const auto& basis : fit.bases) {
      const auto& kv = basis.base().knots();
      jbases.push_back(json{{"a", kv.a},
                            {"b", kv.b},
                            {"order", kv.order},
                            {"interior", kv.interior},
                            {"offsets", vector_to_json(basis.offsets())}});
    }
    jf["bases"] = jbases;

    json jpath = json::array();
    for (const auto& entry : fit.path.entries) {
      jpath.push_back(json{{"lambda", entry.lambda},
                           {"inner_iters", entry.inner_iters},
                           {"kkt", entry.final_kkt},
                           {"objective", entry.objective},
                           {"converged", entry.converged},
                           {"descent_violation", entry.descent_violation},
                           {"support", support_to_json(entry.support)},
                           {"group_norms", vector_to_json(entry.group_norms)}});
    }
    jf["path"] = jpath;
    jf["warnings"] = fit.path.warnings;
    jfits.push_back(std::move(jf));
  }
  root["fits"] = std::move(jfits);
  write_text_atomic(path, root.dump(1) + "\n");
}

LoadedFits load_fits_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    fail("'" + path + "': invalid JSON (" + e.what() + ")");
  }
  if (root.value("format", "") != "tsspam-fit-v1")
    fail("'" + path + "': not a tsspam fit file");

  LoadedFits out;
  out.labels = root.value("labels", std::vector<std::string>{});
  for (const auto& jf : root.at("fits")) {
    TsSpamFit fit;
    fit.target = jf.at("target").get<Index>() - 1;
    const Index p = jf.at("p").get<Index>();
    const Index q = jf.at("q").get<Index>();
    fit.response_mean = jf.at("response_mean").get<double>();
    const auto& jp = jf.at("penalty");
    fit.penalty.kind =
        jp.at("kind").get<std::string>() == "mcp" ? PenaltyKind::GroupMcp : PenaltyKind::GroupLasso;
    fit.penalty.gamma = jp.at("gamma").get<double>();
    fit.selected_lambda = jf.at("selected_lambda").get<double>();
    fit.selected_index = jf.at("selected_index").get<Index>();
    fit.support = support_from_json(jf.at("support"));
    fit.beta_hat = Coefficients{vector_from_json(jf.at("beta")), p, q};

    for (const auto& jb : jf.at("bases")) {
      KnotVector kv = build_uniform_knots(jb.at("a").get<double>(), jb.at("b").get<double>(),
                                          static_cast<Index>(jb.at("interior").size()),
                                          jb.at("order").get<int>());
      kv.interior = jb.at("interior").get<std::vector<double>>();
      std::copy(kv.interior.begin(), kv.interior.end(), kv.padded.begin() + kv.order);
      fit.bases.emplace_back(BSplineBasis(std::move(kv)), vector_from_json(jb.at("offsets")));
    }

    for (const auto& je : jf.at("path")) {
      PathEntry entry;
      entry.lambda = je.at("lambda").get<double>();
      entry.inner_iters = je.at("inner_iters").get<int>();
      entry.final_kkt = je.at("kkt").get<double>();
      entry.objective = je.at("objective").get<double>();
      entry.converged = je.at("converged").get<bool>();
      entry.descent_violation = je.at("descent_violation").get<double>();
      entry.support = support_from_json(je.at("support"));
      entry.group_norms = vector_from_json(je.at("group_norms"));
      entry.beta = Coefficients{Eigen::VectorXd(), p, q};
      fit.path.entries.push_back(std::move(entry));
    }
    fit.path.warnings = jf.value("warnings", std::vector<std::string>{});
    out.fits.push_back(std::move(fit));
  }
  return out;
}

void save_truth_json(const std::string& path, const SynthConfig& config,
                     const GroundTruth& truth) {
  json root;
  root["format"] = "tsspam-truth-v1";
  root["config"] = {{"p", config.p},
                    {"n", config.n},
                    {"n_active", config.n_active},
                    {"noise_half_width", config.noise_half_width},
                    {"seed", config.seed},
                    {"burn_in", config.burn_in},
                    {"contraction", config.contraction},
                    {"zero_dynamics", config.zero_dynamics},
                    {"parent_scale", config.parent_scale}};
  root["target"] = 1;
  root["active_set"] = support_to_json(truth.active_set);
  json parents = json::array();
  for (std::size_t k = 0; k < truth.active_set.size(); ++k) {
    json jf = cubic_to_json(truth.parent_fns[k]);
    jf["source"] = truth.active_set[k] + 1;
    parents.push_back(std::move(jf));
  }
  root["parent_fns"] = std::move(parents);
  json diagonals = json::array();
  for (Index i = 1; i < static_cast<Index>(truth.diagonal_fns.size()); ++i) {
    json jf = cubic_to_json(truth.diagonal_fns[static_cast<std::size_t>(i)]);
    jf["dim"] = i + 1;
    diagonals.push_back(std::move(jf));
  }
  root["diagonal_fns"] = std::move(diagonals);
  write_text_atomic(path, root.dump(1) + "\n");
}

LoadedTruth load_truth_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    fail("'" + path + "': invalid JSON (" + e.what() + ")");
  }
  if (root.value("format", "") != "tsspam-truth-v1")
    fail("'" + path + "': not a tsspam truth file");

  LoadedTruth out;
  const auto& jc = root.at("config");
  out.config.p = jc.at("p").get<Index>();
  out.config.n = jc.at("n").get<Index>();
  out.config.n_active = jc.at("n_active").get<Index>();
  out.config.noise_half_width = jc.at("noise_half_width").get<double>();
  out.config.seed = jc.at("seed").get<std::uint64_t>();
  out.config.burn_in = jc.at("burn_in").get<Index>();
  out.config.contraction = jc.at("contraction").get<double>();
  out.config.zero_dynamics = jc.value("zero_dynamics", false);
  out.config.parent_scale = jc.value("parent_scale", 1.0);

  out.truth.active_set = support_from_json(root.at("active_set"));
  for (const auto& jf : root.at("parent_fns")) out.truth.parent_fns.push_back(cubic_from_json(jf));
  out.truth.diagonal_fns.assign(static_cast<std::size_t>(out.config.p), Cubic{});
  for (const auto& jf : root.at("diagonal_fns"))
    out.truth.diagonal_fns[static_cast<std::size_t>(jf.at("dim").get<Index>() - 1)] =
        cubic_from_json(jf);
  return out;
}

CausalGraph graph_from_fits(const std::vector<TsSpamFit>& fits, Index p,
                            std::vector<std::string> labels) {
  CausalGraph graph;
  graph.p = p;
  graph.labels = std::move(labels);
  for (const auto& fit : fits) {
    const auto& entry = fit.path.entries[static_cast<std::size_t>(fit.selected_index)];
    for (std::size_t k = 0; k < entry.support.size(); ++k)
      graph.edges.push_back(
          {entry.support[k], fit.target, entry.group_norms[static_cast<Index>(k)]});
  }
  graph.edges = ordered_edges(graph);
  return graph;
}

}  // namespace tsspam
