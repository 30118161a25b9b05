// Copyright 2026 The NSM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// nsm: command-line front end for simulation, community detection, model
// fitting, prediction and evaluation of weighted bipartite networks.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsm/detection.hpp"
#include "nsm/error.hpp"
#include "nsm/estimation.hpp"
#include "nsm/evaluation.hpp"
#include "nsm/generator.hpp"
#include "nsm/jester.hpp"
#include "nsm/log.hpp"
#include "nsm/parallel.hpp"
#include "nsm/ratings.hpp"
#include "nsm/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string missing_token;
  bool header = false;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nsm::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a, 64 bit.
std::string checksum(const std::string& path) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : read_file(path)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << h;
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nsm::Error("cannot write '" + path + "'");
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Collects inputs and outputs of one run and writes manifest.json.
class Manifest {
 public:
  Manifest(std::string subcommand, const CLI::App* app) : subcommand_(std::move(subcommand)) {
    std::vector<const CLI::Option*> options = app->get_options();
    if (const CLI::App* parent = app->get_parent()) {
      const auto global = parent->get_options();
      options.insert(options.begin(), global.begin(), global.end());
    }
    for (const CLI::Option* opt : options) {
      const std::string key = opt->get_single_name();
      if (key.empty() || key == "help" || key == "version" || key == "settings") continue;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        std::string value;
        for (std::size_t k = 0; k < res.size(); ++k) value += (k ? "," : "") + res[k];
        config_[key] = value;
      } else if (opt->get_expected_min() != 0) {
        config_[key] = opt->get_default_str();
      } else {
        config_[key] = "false";
      }
    }
  }

  void input(const std::string& path) { inputs_.push_back({{"path", path}, {"fnv1a64", checksum(path)}}); }
  void artifact(const std::string& path) { artifacts_.push_back(path); }
  void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }

  void write(const std::string& path) const {
    write_json(path, {{"tool", "nsm"},
                      {"version", kVersion},
                      {"subcommand", subcommand_},
                      {"config", config_},
                      {"seeds", seeds_},
                      {"inputs", inputs_},
                      {"artifacts", artifacts_}});
  }

 private:
  std::string subcommand_;
  json config_ = json::object();
  json seeds_ = json::object();
  json inputs_ = json::array();
  json artifacts_ = json::array();
};

nsm::CsvOptions csv_options(const Common& c) { return {c.missing_token, c.header}; }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw nsm::Error("cannot create directory '" + dir + "': " + ec.message());
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--range", "expected lo,hi");
  try {
    const double lo = std::stod(text.substr(0, comma));
    const double hi = std::stod(text.substr(comma + 1));
    if (!(hi > lo)) throw CLI::ValidationError("--range", "hi must exceed lo");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--range", "expected two numbers lo,hi");
  }
}

nsm::CommunityAssignment load_assignment(const std::string& rows, const std::string& cols) {
  nsm::CommunityAssignment ca{nsm::load_labels(rows), nsm::load_labels(cols)};
  ca.validate();
  return ca;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  bool canonical = false;
  std::string config;
  double missing = 0.0;
  int duplicate = 1;
  std::string out = ".";
  bool export_mask = false;
};

void run_simulate(const SimulateArgs& a, const Common& c, const CLI::App* app) {
  if (a.canonical == !a.config.empty())
    throw CLI::ValidationError("simulate", "pass exactly one of --canonical or --config");
  Manifest manifest("simulate", app);
  nsm::GeneratorConfig cfg = nsm::canonical_config();
  if (!a.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(a.config));
    } catch (const json::parse_error& e) {
      throw nsm::FormatError(std::string("generator config: ") + e.what());
    }
    cfg = nsm::GeneratorConfig::from_json(j);
    manifest.input(a.config);
  }
  cfg.seed = c.seed;
  const auto net = nsm::sample_network(cfg);
  nsm::RatingsMatrix full = nsm::duplicate_nodes(net.matrix, a.duplicate);
  nsm::CommunityAssignment truth{nsm::duplicate_labels(net.truth.row_labels, a.duplicate),
                                 nsm::duplicate_labels(net.truth.col_labels, a.duplicate)};
  const nsm::RatingsMatrix masked = nsm::mcar_mask(full, a.missing, c.seed);

  ensure_dir(a.out);
  const auto opts = csv_options(c);
  auto save = [&](const std::string& name, auto&& writer) {
    const std::string path = join(a.out, name);
    writer(path);
    manifest.artifact(path);
  };
  save("matrix.csv", [&](const std::string& p) { nsm::write_csv(p, masked, opts); });
  save("complete.csv", [&](const std::string& p) { nsm::write_csv(p, full, opts); });
  save("truth_rows.csv", [&](const std::string& p) { nsm::write_labels(p, truth.row_labels); });
  save("truth_cols.csv", [&](const std::string& p) { nsm::write_labels(p, truth.col_labels); });
  const std::size_t kr = cfg.row_sizes.size(), kc = cfg.col_sizes.size();
  save("psi_rows.csv", [&](const std::string& p) {
    nsm::write_csv(p, nsm::RatingsMatrix::dense(net.matrix.rows(), kc, net.psi_rows), opts);
  });
  save("psi_cols.csv", [&](const std::string& p) {
    nsm::write_csv(p, nsm::RatingsMatrix::dense(net.matrix.cols(), kr, net.psi_cols), opts);
  });
  save("config.json", [&](const std::string& p) { write_json(p, cfg.to_json()); });
  if (a.export_mask) save("mask.csv", [&](const std::string& p) { nsm::write_mask_csv(p, masked); });
  manifest.seed("generator", c.seed);
  manifest.seed("mask", c.seed);
  manifest.write(join(a.out, "manifest.json"));
}

// ------------------------------------------------------------------ detect

struct DetectArgs {
  std::string matrix;
  std::string out = ".";
  std::string warm_rows, warm_cols;
  std::string trace;
  std::string transformation = "none";
  int max_cycles = 50;
  bool explain = false;
};

void run_detect(const DetectArgs& a, const Common& c, const CLI::App* app) {
  Manifest manifest("detect", app);
  const auto m = nsm::load_csv(a.matrix, csv_options(c));
  manifest.input(a.matrix);
  nsm::DetectionConfig cfg;
  cfg.seed = c.seed;
  cfg.max_repair_cycles = a.max_cycles;
  if (!a.warm_rows.empty()) {
    cfg.warm_rows = nsm::load_labels(a.warm_rows);
    manifest.input(a.warm_rows);
  }
  if (!a.warm_cols.empty()) {
    cfg.warm_cols = nsm::load_labels(a.warm_cols);
    manifest.input(a.warm_cols);
  }
  const auto t = nsm::apply_transformation(m, nsm::parse_transformation(a.transformation));
  const auto r = nsm::detect(t.matrix, cfg);

  ensure_dir(a.out);
  const std::string rows = join(a.out, "rows.csv"), cols = join(a.out, "cols.csv");
  nsm::write_labels(rows, r.assignment.row_labels);
  nsm::write_labels(cols, r.assignment.col_labels);
  manifest.artifact(rows);
  manifest.artifact(cols);
  json summary = r.breakdown.to_json();
  summary["agglomeration_measure"] = r.agglomeration_measure;
  summary["repair_cycles"] = r.cycles;
  const std::string measure = join(a.out, "measure.json");
  write_json(measure, summary);
  manifest.artifact(measure);
  if (!a.trace.empty()) {
    std::string lines;
    for (const auto& step : r.trace) lines += nsm::to_json(step).dump() + "\n";
    write_text(a.trace, lines);
    manifest.artifact(a.trace);
  }
  if (a.explain) std::cout << summary.dump(2) << "\n";
  manifest.seed("detection", c.seed);
  manifest.write(join(a.out, "manifest.json"));
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string matrix;
  std::string labels;
  std::string row_labels, col_labels;
  int iterations = 10;
  bool psi_sum = false;
  bool include_auxiliary = false;
  double tolerance = 0.0;
  std::string out_model, out_completed;
  std::string out = ".";
};

void resolve_labels(const std::string& dir, std::string& rows, std::string& cols) {
  if (!dir.empty()) {
    if (rows.empty()) rows = join(dir, "rows.csv");
    if (cols.empty()) cols = join(dir, "cols.csv");
  }
  if (rows.empty() || cols.empty())
    throw CLI::ValidationError("labels", "give --labels DIR or both --row-labels and --col-labels");
}

void run_fit(FitArgs a, const Common& c, const CLI::App* app) {
  resolve_labels(a.labels, a.row_labels, a.col_labels);
  Manifest manifest("fit", app);
  const auto m = nsm::load_csv(a.matrix, csv_options(c));
  manifest.input(a.matrix);
  const auto ca = load_assignment(a.row_labels, a.col_labels);
  manifest.input(a.row_labels);
  manifest.input(a.col_labels);
  nsm::FitOptions opts;
  opts.iterations = a.iterations;
  opts.aggregate = a.psi_sum ? nsm::PsiAggregate::kSum : nsm::PsiAggregate::kMean;
  opts.include_auxiliary = a.include_auxiliary;
  opts.tolerance = a.tolerance;
  const auto r = nsm::fit_model(m, ca, opts);

  ensure_dir(a.out);
  const std::string model = a.out_model.empty() ? join(a.out, "model.json") : a.out_model;
  const std::string completed = a.out_completed.empty() ? join(a.out, "completed.csv") : a.out_completed;
  write_json(model, r.model.to_json());
  nsm::write_csv(completed, r.completed, csv_options(c));
  manifest.artifact(model);
  manifest.artifact(completed);
  manifest.write(join(a.out, "manifest.json"));
}

// ----------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string query;
  std::string out = ".";
};

void run_predict(const PredictArgs& a, const Common& c, const CLI::App* app) {
  Manifest manifest("predict", app);
  json j;
  try {
    j = json::parse(read_file(a.model));
  } catch (const json::parse_error& e) {
    throw nsm::FormatError(std::string("model: ") + e.what());
  }
  manifest.input(a.model);
  const auto fit = nsm::ModelFit::from_json(j);
  const std::size_t nr = fit.assignment.row_labels.size(), nc = fit.assignment.col_labels.size();
  nsm::RatingsMatrix query = nsm::RatingsMatrix::dense(nr, nc, std::vector<double>(nr * nc, 0.0));
  if (!a.query.empty()) {
    query = nsm::load_csv(a.query, csv_options(c));
    manifest.input(a.query);
    if (query.rows() != nr || query.cols() != nc)
      throw nsm::DomainError("predict: query matrix dimensions do not match the model");
  }
  nsm::RatingsMatrix out(nr, nc);
  for (std::size_t u = 0; u < nr; ++u)
    for (std::size_t v = 0; v < nc; ++v)
      if (query.observed(u, v)) out.set(u, v, nsm::predict_edge(fit, u, v));
  ensure_dir(a.out);
  const std::string path = join(a.out, "predictions.csv");
  nsm::write_csv(path, out, csv_options(c));
  manifest.artifact(path);
  manifest.write(join(a.out, "manifest.json"));
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string matrix;
  std::string scheme = "edges";
  double fraction = 0.25;
  bool cv = false;
  int folds = 3;
  std::string range;
  std::string report;
  std::string truth_rows, truth_cols;
  std::string nmi = "arithmetic";
  int iterations = 10;
  bool psi_sum = false;
  int max_cycles = 50;
  std::string out = ".";
};

void run_evaluate(const EvaluateArgs& a, const Common& c, const CLI::App* app) {
  Manifest manifest("evaluate", app);
  const auto m = nsm::load_csv(a.matrix, csv_options(c));
  manifest.input(a.matrix);
  nsm::SplitSpec spec{nsm::parse_split_scheme(a.scheme), a.fraction, c.seed};
  nsm::EvaluateOptions opts;
  opts.cross_validate = a.cv;
  opts.folds = a.folds;
  if (!a.range.empty()) opts.range = parse_range(a.range);
  opts.detection.seed = c.seed;
  opts.detection.max_repair_cycles = a.max_cycles;
  opts.fit.iterations = a.iterations;
  opts.fit.aggregate = a.psi_sum ? nsm::PsiAggregate::kSum : nsm::PsiAggregate::kMean;
  opts.nmi_normalization = nsm::parse_nmi_normalization(a.nmi);
  if (!a.truth_rows.empty() || !a.truth_cols.empty()) {
    if (a.truth_rows.empty() || a.truth_cols.empty())
      throw CLI::ValidationError("truth", "give both --truth-rows and --truth-cols");
    opts.truth = load_assignment(a.truth_rows, a.truth_cols);
    manifest.input(a.truth_rows);
    manifest.input(a.truth_cols);
  }
  const auto e = nsm::evaluate_pipeline(m, spec, opts);

  ensure_dir(a.out);
  const std::string report = a.report.empty() ? join(a.out, "report.json") : a.report;
  write_json(report, e.report.to_json());
  const std::string rows = join(a.out, "rows.csv"), cols = join(a.out, "cols.csv");
  const std::string preds = join(a.out, "predictions.csv");
  nsm::write_labels(rows, e.assignment.row_labels);
  nsm::write_labels(cols, e.assignment.col_labels);
  nsm::write_csv(preds, e.predictions, csv_options(c));
  for (const auto& p : {report, rows, cols, preds}) manifest.artifact(p);
  manifest.seed("split", c.seed);
  manifest.seed("folds", c.seed);
  manifest.write(join(a.out, "manifest.json"));
  std::cout << "mse " << e.report.mse << "  rmse " << e.report.rmse << "  nmae " << e.report.nmae;
  if (e.report.nmi_rows) std::cout << "  nmi_rows " << *e.report.nmi_rows << "  nmi_cols " << *e.report.nmi_cols;
  std::cout << "\n";
}

// ----------------------------------------------------------- jester-ingest

struct JesterArgs {
  std::string raw;
  int rated_exactly = 74;
  double sentinel = 99.0;
  std::string out;
};

void run_jester(const JesterArgs& a, const Common& c, const CLI::App* app) {
  Manifest manifest("jester-ingest", app);
  nsm::JesterOptions opts;
  opts.rated_exactly = a.rated_exactly;
  opts.sentinel = a.sentinel;
  const auto m = nsm::jester_ingest_file(a.raw, opts);
  manifest.input(a.raw);
  const fs::path parent = fs::path(a.out).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  nsm::write_csv(a.out, m, csv_options(c));
  manifest.artifact(a.out);
  manifest.write(a.out + ".manifest.json");
  std::cout << m.rows() << " users x " << m.cols() << " jokes, density " << m.density() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community detection and edge-weight prediction for weighted bipartite networks "
               "under the H-Normal nonlinear sociability model.",
               "nsm"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--settings", "", "TOML/INI settings file; command-line flags take precedence");

  Common common;
  app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (0: NSM_THREADS or 1)")
      ->envname("NSM_THREADS")
      ->capture_default_str();
  app.add_option("--missing-token", common.missing_token,
                 "CSV token for an unobserved cell (default: empty cell)");
  app.add_flag("--header", common.header, "CSV files carry a header row");
  app.add_flag("--quiet", common.quiet, "Suppress warnings");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample a network from the model");
  simulate->add_flag("--canonical", sim.canonical, "4 x 3 communities of 73 nodes, sigma 0");
  simulate->add_option("--config", sim.config, "Generator config (JSON)")->check(CLI::ExistingFile);
  simulate->add_option("--missing", sim.missing, "MCAR probability of hiding an edge")
      ->check(CLI::Range(0.0, 0.999999))
      ->capture_default_str();
  simulate->add_option("--duplicate", sim.duplicate, "Replicate every node this many times")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("-o,--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_flag("--export-mask", sim.export_mask, "Also write the 0/1 observation mask");

  DetectArgs det;
  auto* detect = app.add_subcommand("detect", "Detect row and column communities");
  detect->add_option("matrix", det.matrix, "Ratings CSV")->required()->check(CLI::ExistingFile);
  detect->add_option("-o,--out", det.out, "Output directory")->capture_default_str();
  detect->add_option("--warm-rows", det.warm_rows, "Initial row labels")->check(CLI::ExistingFile);
  detect->add_option("--warm-cols", det.warm_cols, "Initial column labels")->check(CLI::ExistingFile);
  detect->add_option("--trace", det.trace, "Write repair steps as JSON lines");
  detect->add_option("--transformation", det.transformation,
                     "none|center-rows|center-cols|normalize-rows|normalize-cols")
      ->capture_default_str();
  detect->add_option("--max-cycles", det.max_cycles, "Cap on repair cycles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  detect->add_flag("--explain", det.explain, "Print the per-block measure breakdown");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model and impute missing edges");
  fit_cmd->add_option("matrix", fit.matrix, "Ratings CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--labels", fit.labels, "Directory holding rows.csv and cols.csv");
  fit_cmd->add_option("--row-labels", fit.row_labels, "Row label file")->check(CLI::ExistingFile);
  fit_cmd->add_option("--col-labels", fit.col_labels, "Column label file")->check(CLI::ExistingFile);
  fit_cmd->add_option("--iterations", fit.iterations, "Fit/impute iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_flag("--psi-sum", fit.psi_sum, "Rank nodes by the sum, not the mean");
  fit_cmd->add_flag("--include-auxiliary", fit.include_auxiliary,
                    "Also search the mixed-reflection H-functions");
  fit_cmd->add_option("--tolerance", fit.tolerance, "Stop when imputed cells move less (0: off)")
      ->capture_default_str();
  fit_cmd->add_option("--out-model", fit.out_model, "Model JSON (default: OUT/model.json)");
  fit_cmd->add_option("--out-completed", fit.out_completed, "Completed matrix CSV (default: OUT/completed.csv)");
  fit_cmd->add_option("-o,--out", fit.out, "Output directory")->capture_default_str();

  PredictArgs pred;
  auto* predict = app.add_subcommand("predict", "Predict edge weights from a fitted model");
  predict->add_option("model", pred.model, "Model JSON written by fit")->required()->check(CLI::ExistingFile);
  predict->add_option("--query", pred.query, "CSV whose observed cells select what to predict (default: all)")
      ->check(CLI::ExistingFile);
  predict->add_option("-o,--out", pred.out, "Output directory")->capture_default_str();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Split, detect, fit and score held-out data");
  evaluate->add_option("matrix", ev.matrix, "Ratings CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--scheme", ev.scheme, "edges|nodes|nodes-edges")
      ->check(CLI::IsMember({"edges", "nodes", "nodes-edges"}))
      ->capture_default_str();
  evaluate->add_option("--fraction", ev.fraction, "Held-out fraction")->capture_default_str();
  evaluate->add_flag("--cv", ev.cv, "Choose the transformation by cross-validation");
  evaluate->add_option("--folds", ev.folds, "Cross-validation folds")->capture_default_str();
  evaluate->add_option("--range", ev.range, "Rating range lo,hi for NMAE (default: observed)");
  evaluate->add_option("--report", ev.report, "Report JSON (default: OUT/report.json)");
  evaluate->add_option("--truth-rows", ev.truth_rows, "True row labels, for NMI")->check(CLI::ExistingFile);
  evaluate->add_option("--truth-cols", ev.truth_cols, "True column labels, for NMI")->check(CLI::ExistingFile);
  evaluate->add_option("--nmi", ev.nmi, "arithmetic|min|sqrt")
      ->check(CLI::IsMember({"arithmetic", "min", "sqrt"}))
      ->capture_default_str();
  evaluate->add_option("--iterations", ev.iterations, "Fit/impute iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_flag("--psi-sum", ev.psi_sum, "Rank nodes by the sum, not the mean");
  evaluate->add_option("--max-cycles", ev.max_cycles, "Cap on repair cycles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("-o,--out", ev.out, "Output directory")->capture_default_str();

  JesterArgs jes;
  auto* jester = app.add_subcommand("jester-ingest", "Extract a Jester cohort as a ratings CSV");
  jester->add_option("raw", jes.raw, "Raw Jester file")->required()->check(CLI::ExistingFile);
  jester->add_option("--rated-exactly", jes.rated_exactly, "Keep users with exactly this many ratings")
      ->capture_default_str();
  jester->add_option("--sentinel", jes.sentinel, "Value marking an unrated joke")->capture_default_str();
  jester->add_option("-o,--out", jes.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    nsm::set_thread_count(common.threads);
    nsm::set_warnings_enabled(!common.quiet);
    if (*simulate) run_simulate(sim, common, simulate);
    else if (*detect) run_detect(det, common, detect);
    else if (*fit_cmd) run_fit(fit, common, fit_cmd);
    else if (*predict) run_predict(pred, common, predict);
    else if (*evaluate) run_evaluate(ev, common, evaluate);
    else if (*jester) run_jester(jes, common, jester);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const nsm::ParseError& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
    return 1;
  } catch (const nsm::FormatError& e) {
    std::cerr << "error: format: " << e.what() << "\n";
    return 1;
  } catch (const nsm::ColdStartError& e) {
    std::cerr << "error: cold start: " << e.what() << "\n";
    return 1;
  } catch (const nsm::InsufficientDataError& e) {
    std::cerr << "error: insufficient data: " << e.what() << "\n";
    return 1;
  } catch (const nsm::DomainError& e) {
    std::cerr << "error: domain: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
