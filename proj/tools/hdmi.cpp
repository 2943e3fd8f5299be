// hdmi: command-line front end for screening, simulation, evaluation,
// format conversion and timing.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hdmi/hdmi.hpp"

namespace {

using nlohmann::ordered_json;

int exit_code(hdmi::ErrorKind kind) {
  switch (kind) {
    case hdmi::ErrorKind::usage: return 1;
    case hdmi::ErrorKind::data: return 2;
    case hdmi::ErrorKind::numeric: return 3;
  }
  return 3;
}

std::size_t default_workers() {
  const char* env = std::getenv("HDMI_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const long v = std::stol(env, &used);
    if (used == std::string(env).size() && v >= 1) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  hdmi::fail_usage(std::string("HDMI_WORKERS must be a positive integer, got '") + env + "'");
}

const std::map<std::string, hdmi::Method> kMethods{{"fftkde", hdmi::Method::fftkde},
                                                   {"binning", hdmi::Method::binning},
                                                   {"knn", hdmi::Method::knn},
                                                   {"pearson", hdmi::Method::pearson}};
const std::map<std::string, hdmi::OutcomeKind> kOutcomeKinds{{"continuous", hdmi::OutcomeKind::continuous},
                                                             {"binary", hdmi::OutcomeKind::binary}};
const std::map<std::string, hdmi::KernelKind> kKernels{{"epanechnikov", hdmi::KernelKind::epanechnikov},
                                                       {"gaussian", hdmi::KernelKind::gaussian}};
const std::map<std::string, hdmi::Association> kModes{{"linear", hdmi::Association::linear},
                                                      {"nonlinear", hdmi::Association::nonlinear},
                                                      {"null", hdmi::Association::null}};
const std::map<std::string, hdmi::OutcomeType> kOutcomeTypes{
    {"continuous", hdmi::OutcomeType::continuous},
    {"binary_original", hdmi::OutcomeType::binary_original},
    {"binary_translated", hdmi::OutcomeType::binary_translated}};

template <typename T>
std::vector<std::string> keys(const std::map<std::string, T>& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

template <typename T>
T lookup(const std::map<std::string, T>& m, const std::string& key, const char* what) {
  const auto it = m.find(key);
  if (it == m.end()) hdmi::fail_usage(std::string("unknown ") + what + " '" + key + "'");
  return it->second;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) hdmi::fail_data("cannot write " + path);
  return out;
}

void write_json(const std::string& path, const ordered_json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

/// A column given by name, or by zero-based index when no column has that name.
hdmi::ColumnRef column_ref(const hdmi::DatasetHandle& data, const std::string& text) {
  if (data.find(text)) return text;
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    return static_cast<std::size_t>(std::stoull(text));
  }
  return text;
}

// ---------------------------------------------------------------------------
// screen

struct ScreenFlags {
  std::string input;
  std::string outcome_col = "0";
  std::string outcome_file;
  std::string outcome_type = "continuous";
  std::string method = "fftkde";
  std::vector<std::string> exclude;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  std::size_t grid_size = hdmi::kDefaultGridSize2D;
  std::size_t k = 3;
  std::size_t bins = 0;
  std::string kernel = "epanechnikov";
  std::string output;
  std::string json;
  std::string timing;
};

hdmi::ScreeningConfig screening_config(const ScreenFlags& f) {
  hdmi::ScreeningConfig c;
  c.method = lookup(kMethods, f.method, "method");
  c.outcome_kind = lookup(kOutcomeKinds, f.outcome_type, "outcome type");
  c.exclusions = split_list(f.exclude);
  c.workers = f.workers == 0 ? default_workers() : f.workers;
  c.seed = f.seed;
  c.params.kernel = hdmi::Kernel{lookup(kKernels, f.kernel, "kernel")};
  c.params.grid_size_2d = f.grid_size;
  c.params.k = f.k;
  if (f.bins > 0) c.params.bins = f.bins;
  return c;
}

ordered_json config_json(const hdmi::ScreeningConfig& c, const std::string& outcome) {
  ordered_json j;
  j["method"] = std::string(hdmi::to_string(c.method));
  j["outcome_kind"] = std::string(hdmi::to_string(c.outcome_kind));
  j["outcome"] = outcome;
  j["exclusions"] = c.exclusions;
  j["workers"] = c.workers;
  j["seed"] = c.seed;
  j["kernel"] = c.params.kernel.kind == hdmi::KernelKind::epanechnikov ? "epanechnikov" : "gaussian";
  j["grid_size"] = c.params.grid_size_2d;
  j["k"] = c.params.k;
  if (c.params.bins) j["bins"] = *c.params.bins;
  return j;
}

hdmi::ScreeningReport run_screen_report(const ScreenFlags& f, const hdmi::ScreeningConfig& base) {
  const hdmi::DatasetHandle data = hdmi::open_dataset(f.input);
  hdmi::ScreeningConfig config = base;
  if (f.outcome_file.empty()) {
    config.outcome_column = column_ref(data, f.outcome_col);
    return hdmi::screen(data, config);
  }
  const hdmi::DatasetHandle outcome = hdmi::open_dataset(f.outcome_file);
  const std::size_t j = hdmi::detail::resolve_column(outcome, column_ref(outcome, f.outcome_col));
  return hdmi::screen(data, outcome.column_copy(j), config, outcome.column_names()[j]);
}

int run_screen(const ScreenFlags& f) {
  const hdmi::ScreeningConfig config = screening_config(f);
  const hdmi::ScreeningReport report = run_screen_report(f, config);
  {
    auto out = open_output(f.output);
    hdmi::write_report_csv(out, report);
  }
  if (!f.json.empty()) {
    ordered_json j;
    j["config"] = config_json(report.config, report.outcome_name);
    j["features"] = ordered_json::array();
    for (const auto& s : report.scores) {
      j["features"].push_back({{"index", s.column_index},
                               {"name", s.column_name},
                               {"score", s.score},
                               {"raw", s.raw},
                               {"n_used", s.n_used},
                               {"flag", std::string(hdmi::to_string(s.status))}});
    }
    write_json(f.json, j);
  }
  const std::string timing = f.timing.empty() ? f.output + ".timing.json" : f.timing;
  write_json(timing, {{"seconds", report.seconds}, {"workers_used", report.workers_used},
                      {"features", report.scores.size()}});
  std::size_t flagged = 0;
  for (const auto& s : report.scores) flagged += s.status != hdmi::ColumnStatus::ok;
  std::cerr << "screen: " << report.scores.size() << " features (" << flagged << " flagged), method "
            << f.method << ", " << report.workers_used << " workers, " << report.seconds << " s -> " << f.output
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateFlags {
  std::string design;
  std::size_t p_true = 10;
  std::string mode = "linear";
  std::string outcome = "continuous";
  double snr = 3.0;
  double rho = 0.6;
  std::uint64_t seed = 0;
  bool per_observation_snr = false;
  std::string output;
  std::string truth;
};

int run_simulate(const SimulateFlags& f) {
  const hdmi::DatasetHandle design = hdmi::open_dataset(f.design);
  hdmi::SimulationSpec spec;
  spec.p_true = f.p_true;
  spec.mode = lookup(kModes, f.mode, "mode");
  spec.outcome = lookup(kOutcomeTypes, f.outcome, "outcome");
  spec.snr = f.snr;
  spec.toeplitz_rho = f.rho;
  spec.seed = f.seed;
  spec.per_observation_snr = f.per_observation_snr;
  const hdmi::SimulatedDataset sim = hdmi::simulate(design, spec);
  {
    auto out = open_output(f.output);
    out << "y\n";
    for (double v : sim.y) out << hdmi::format_double(v) << '\n';
  }
  const std::string truth = f.truth.empty() ? f.output + ".truth.csv" : f.truth;
  {
    auto out = open_output(truth);
    out << "index,name,beta\n";
    for (std::size_t i = 0; i < sim.true_support.size(); ++i) {
      out << sim.true_support[i] << ',' << design.column_names()[sim.true_support[i]] << ','
          << hdmi::format_double(sim.beta_true[i]) << '\n';
    }
  }
  ordered_json meta;
  meta["p_true"] = spec.p_true;
  meta["mode"] = f.mode;
  meta["outcome"] = f.outcome;
  meta["snr"] = spec.snr;
  meta["toeplitz_rho"] = spec.toeplitz_rho;
  meta["seed"] = spec.seed;
  meta["per_observation_snr"] = spec.per_observation_snr;
  meta["sigma_true"] = std::isnan(sim.sigma_true) ? ordered_json(nullptr) : ordered_json(sim.sigma_true);
  meta["support"] = sim.true_support;
  meta["beta"] = sim.beta_true;
  write_json(f.output + ".json", meta);
  std::cerr << "simulate: " << sim.y.size() << " outcomes, " << spec.p_true << " true features, mode " << f.mode
            << ", outcome " << f.outcome << " -> " << f.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const std::string& path) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) hdmi::fail_data(path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

TextTable read_text_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) hdmi::fail_data("cannot open " + path);
  TextTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    for (auto f : hdmi::detail::split(line, ',')) fields.emplace_back(f);
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else {
      if (fields.size() != t.header.size()) hdmi::fail_data(path + ": ragged line " + std::to_string(line_no));
      t.rows.push_back(std::move(fields));
    }
  }
  if (t.header.empty()) hdmi::fail_data(path + ": empty file");
  return t;
}

struct EvaluateFlags {
  std::string scores;
  std::string truth;
  std::size_t k = 0;
  std::string output;
};

int run_evaluate(const EvaluateFlags& f) {
  const TextTable scores = read_text_table(f.scores);
  const TextTable truth = read_text_table(f.truth);
  const std::size_t name_col = scores.column("name", f.scores);
  const std::size_t score_col = scores.column("score", f.scores);
  const std::size_t truth_col = truth.column("name", f.truth);

  std::map<std::string, int> is_true;
  for (const auto& row : truth.rows) is_true[row[truth_col]] = 0;
  hdmi::LabeledScores ls;
  for (const auto& row : scores.rows) {
    double v = 0.0;
    const auto& text = row[score_col];
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      hdmi::fail_data(f.scores + ": score '" + text + "' is not a number");
    }
    ls.scores.push_back(v);
    const auto it = is_true.find(row[name_col]);
    ls.labels.push_back(it != is_true.end() ? 1 : 0);
    if (it != is_true.end()) it->second = 1;
  }
  for (const auto& [name, seen] : is_true) {
    if (!seen) hdmi::fail_data("true feature '" + name + "' is absent from " + f.scores);
  }
  const double area = hdmi::auroc(ls);
  std::size_t positives = 0;
  for (int l : ls.labels) positives += l;
  auto out = open_output(f.output);
  if (f.k > 0) {
    const auto c = hdmi::selection_confusion(ls, f.k);
    out << "auroc,features,true_features,k,true_positives,false_positives,false_negatives\n"
        << hdmi::format_double(area) << ',' << ls.scores.size() << ',' << positives << ',' << f.k << ','
        << c.true_positives << ',' << c.false_positives << ',' << c.false_negatives << '\n';
  } else {
    out << "auroc,features,true_features\n"
        << hdmi::format_double(area) << ',' << ls.scores.size() << ',' << positives << '\n';
  }
  std::cerr << "evaluate: auroc " << area << " over " << ls.scores.size() << " features -> " << f.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// replicate

struct ReplicateFlags {
  std::string design;
  std::vector<std::size_t> p_true{10};
  std::vector<std::string> modes{"linear"};
  std::string outcome = "continuous";
  std::vector<std::string> methods{"fftkde"};
  std::size_t replications = 20;
  double snr = 3.0;
  double rho = 0.6;
  bool per_observation_snr = false;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string output;
};

int run_replicate(const ReplicateFlags& f) {
  const hdmi::DatasetHandle design = hdmi::open_dataset(f.design);
  hdmi::ReplicationPlan plan;
  for (const auto& mode : split_list(f.modes)) {
    for (std::size_t p : f.p_true) {
      hdmi::SimulationSpec spec;
      spec.p_true = p;
      spec.mode = lookup(kModes, mode, "mode");
      spec.outcome = lookup(kOutcomeTypes, f.outcome, "outcome");
      spec.snr = f.snr;
      spec.toeplitz_rho = f.rho;
      spec.per_observation_snr = f.per_observation_snr;
      plan.cells.push_back(spec);
    }
  }
  plan.methods.clear();
  for (const auto& m : split_list(f.methods)) plan.methods.push_back(lookup(kMethods, m, "method"));
  plan.replications = f.replications;
  plan.root_seed = f.seed;
  plan.screening.workers = f.workers == 0 ? default_workers() : f.workers;
  const auto summary = hdmi::replicate_and_summarize(design, plan);
  auto out = open_output(f.output);
  hdmi::write_summary_csv(out, summary);
  std::size_t failed = 0;
  for (const auto& s : summary) failed += s.failed;
  std::cerr << "replicate: " << summary.size() << " cells (" << failed << " failed), R = " << f.replications
            << " -> " << f.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// convert, generate

struct ConvertFlags {
  std::string input;
  std::string output;
  std::string delimiter = ",";
  std::vector<std::string> na_tokens;
};

int run_convert(const ConvertFlags& f) {
  hdmi::CsvOptions options;
  if (f.delimiter.size() != 1) hdmi::fail_usage("--delimiter must be a single character");
  options.delimiter = f.delimiter.front();
  if (!f.na_tokens.empty()) options.na_tokens = f.na_tokens;
  const auto header = hdmi::convert_to_binary(f.input, f.output, options);
  std::cerr << "convert: " << header.rows << " rows x " << header.cols << " cols, payload "
            << header.payload_bytes() << " bytes at offset " << header.payload_offset() << " -> " << f.output
            << '\n';
  return 0;
}

struct GenerateFlags {
  std::size_t rows = 100;
  std::size_t cols = 100;
  double rho = 0.5;
  std::uint64_t seed = 0;
  bool binary = false;
  std::string output;
};

int run_generate(const GenerateFlags& f) {
  const auto data = hdmi::ar_design(f.rows, f.cols, f.rho, f.seed);
  if (f.binary) {
    hdmi::write_binary(data, f.output);
  } else {
    auto out = open_output(f.output);
    hdmi::write_csv(out, data);
  }
  std::cerr << "generate: " << f.rows << " x " << f.cols << " design, rho " << f.rho << " -> " << f.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchFlags {
  ScreenFlags screen;
  std::vector<std::string> methods{"fftkde", "pearson"};
  std::vector<double> fractions{0.25, 0.5, 0.75, 1.0};
  int replications = 3;
};

int run_bench(const BenchFlags& f) {
  if (f.replications < 1) hdmi::fail_usage("--replications must be at least 1");
  for (double fr : f.fractions) {
    if (!(fr > 0.0 && fr <= 1.0)) hdmi::fail_usage("fractions must lie in (0, 1]");
  }
  const hdmi::DatasetHandle data = hdmi::open_dataset(f.screen.input);
  hdmi::ScreeningConfig base = screening_config(f.screen);
  base.outcome_column = column_ref(data, f.screen.outcome_col);
  const std::size_t candidates = data.cols() - 1 - base.exclusions.size();

  auto out = open_output(f.screen.output);
  out << "method,fraction,columns,mean_seconds,ci_half_width,replications\n";
  for (const auto& name : split_list(f.methods)) {
    hdmi::ScreeningConfig config = base;
    config.method = lookup(kMethods, name, "method");
    for (double fr : f.fractions) {
      config.column_limit = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fr * candidates)));
      std::vector<double> seconds;
      for (int r = 0; r < f.replications; ++r) seconds.push_back(hdmi::screen(data, config).seconds);
      double mean = seconds.front(), half = 0.0;
      if (seconds.size() >= 2) std::tie(mean, half) = hdmi::mean_and_half_width(seconds);
      out << name << ',' << hdmi::format_double(fr) << ',' << *config.column_limit << ','
          << hdmi::format_double(mean) << ',' << hdmi::format_double(half) << ',' << f.replications << '\n';
      std::cerr << "bench: " << name << " fraction " << fr << ": " << mean << " s\n";
    }
  }
  return 0;
}

void add_screen_options(CLI::App* cmd, ScreenFlags& f, bool bench) {
  cmd->add_option("--input", f.input, "dataset (CSV or binary matrix)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--outcome-col", f.outcome_col, "outcome column name or zero-based index");
  cmd->add_option("--outcome-type", f.outcome_type)->check(CLI::IsMember(keys(kOutcomeKinds)));
  if (!bench) {
    cmd->add_option("--outcome-file", f.outcome_file, "take the outcome from this file; screen every input column")
        ->check(CLI::ExistingFile);
    cmd->add_option("--method", f.method)->check(CLI::IsMember(keys(kMethods)));
  }
  cmd->add_option("--exclude", f.exclude, "columns left out of the screen (repeatable or comma-separated)");
  cmd->add_option("--workers", f.workers, "worker threads (default: HDMI_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed);
  cmd->add_option("--grid-size", f.grid_size, "2D FFT-KDE grid points per axis")->check(CLI::PositiveNumber);
  cmd->add_option("--k", f.k, "nearest neighbours")->check(CLI::PositiveNumber);
  cmd->add_option("--bins", f.bins, "fixed bin count for the binning estimator")->check(CLI::PositiveNumber);
  cmd->add_option("--kernel", f.kernel)->check(CLI::IsMember(keys(kKernels)));
  cmd->add_option("--output", f.output, "result CSV")->required();
  if (!bench) {
    cmd->add_option("--json", f.json, "also write the report as JSON");
    cmd->add_option("--timing", f.timing, "timing JSON (default: <output>.timing.json)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional mutual-information feature screening"};
  app.require_subcommand(1);

  ScreenFlags screen;
  auto* screen_cmd = app.add_subcommand("screen", "score every feature against one outcome");
  add_screen_options(screen_cmd, screen, false);

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "draw a synthetic outcome from a design matrix");
  sim_cmd->add_option("--design", sim.design)->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--p-true", sim.p_true)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--mode", sim.mode)->check(CLI::IsMember(keys(kModes)));
  sim_cmd->add_option("--outcome", sim.outcome)->check(CLI::IsMember(keys(kOutcomeTypes)));
  sim_cmd->add_option("--snr", sim.snr)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--rho", sim.rho, "Toeplitz correlation of the coefficients")->check(CLI::Range(-0.999999, 0.999999));
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_flag("--per-observation-snr", sim.per_observation_snr, "divide the signal energy by N");
  sim_cmd->add_option("--output", sim.output, "outcome CSV")->required();
  sim_cmd->add_option("--truth", sim.truth, "ground-truth CSV (default: <output>.truth.csv)");

  EvaluateFlags eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "variable-selection AUROC of a screening report");
  eval_cmd->add_option("--scores", eval.scores)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", eval.truth)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--k", eval.k, "also report the confusion of the top k")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--output", eval.output)->required();

  ReplicateFlags rep;
  auto* rep_cmd = app.add_subcommand("replicate", "mean AUROC over replicated simulations");
  rep_cmd->add_option("--design", rep.design)->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--p-true", rep.p_true)->delimiter(',');
  rep_cmd->add_option("--modes", rep.modes);
  rep_cmd->add_option("--outcome", rep.outcome)->check(CLI::IsMember(keys(kOutcomeTypes)));
  rep_cmd->add_option("--methods", rep.methods);
  rep_cmd->add_option("--replications", rep.replications);
  rep_cmd->add_option("--snr", rep.snr)->check(CLI::PositiveNumber);
  rep_cmd->add_option("--rho", rep.rho)->check(CLI::Range(-0.999999, 0.999999));
  rep_cmd->add_flag("--per-observation-snr", rep.per_observation_snr);
  rep_cmd->add_option("--seed", rep.seed);
  rep_cmd->add_option("--workers", rep.workers)->check(CLI::PositiveNumber);
  rep_cmd->add_option("--output", rep.output)->required();

  ConvertFlags conv;
  auto* conv_cmd = app.add_subcommand("convert", "CSV to binary matrix");
  conv_cmd->add_option("--input", conv.input)->required()->check(CLI::ExistingFile);
  conv_cmd->add_option("--output", conv.output)->required();
  conv_cmd->add_option("--delimiter", conv.delimiter);
  conv_cmd->add_option("--na", conv.na_tokens, "tokens read as missing");

  GenerateFlags gen;
  auto* gen_cmd = app.add_subcommand("generate", "Gaussian design with AR(1) column correlation");
  gen_cmd->add_option("--rows", gen.rows)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", gen.cols)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--rho", gen.rho)->check(CLI::Range(-0.999999, 0.999999));
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_flag("--binary", gen.binary, "write the binary matrix format");
  gen_cmd->add_option("--output", gen.output)->required();

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "screening time against the fraction of features");
  add_screen_options(bench_cmd, bench.screen, true);
  bench_cmd->add_option("--methods", bench.methods);
  bench_cmd->add_option("--fractions", bench.fractions)->delimiter(',');
  bench_cmd->add_option("--replications", bench.replications);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*screen_cmd) return run_screen(screen);
    if (*sim_cmd) return run_simulate(sim);
    if (*eval_cmd) return run_evaluate(eval);
    if (*rep_cmd) return run_replicate(rep);
    if (*conv_cmd) return run_convert(conv);
    if (*gen_cmd) return run_generate(gen);
    if (*bench_cmd) return run_bench(bench);
  } catch (const hdmi::Error& e) {
    std::cerr << "hdmi: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "hdmi: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
