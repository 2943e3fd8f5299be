#ifndef HDMI_SCREENING_HPP
#define HDMI_SCREENING_HPP

// Marginal screening of every feature column against one outcome.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "hdmi/dataset.hpp"
#include "hdmi/error.hpp"
#include "hdmi/mi.hpp"
#include "hdmi/seed.hpp"

namespace hdmi {

struct EstimatorParams {
  Kernel kernel{};
  BandwidthScaling scaling = BandwidthScaling::direct;
  std::size_t grid_size_2d = kDefaultGridSize2D;
  std::size_t grid_size_1d = kDefaultGridSize1D;
  Marginals marginals = Marginals::from_joint;
  std::size_t k = 3;
  std::optional<std::size_t> bins;

  FftKdeOptions fftkde() const { return {kernel, scaling, grid_size_2d, grid_size_1d, marginals}; }
};

using ColumnRef = std::variant<std::string, std::size_t>;

struct ScreeningConfig {
  Method method = Method::fftkde;
  OutcomeKind outcome_kind = OutcomeKind::continuous;
  ColumnRef outcome_column = std::size_t{0};
  std::vector<std::string> exclusions;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  EstimatorParams params{};
  std::optional<std::size_t> column_limit;  // screen only the first N candidate columns
};

enum class ColumnStatus { ok, constant, too_few_pairs, estimator_error };

inline std::string_view to_string(ColumnStatus s) {
  switch (s) {
    case ColumnStatus::ok: return "ok";
    case ColumnStatus::constant: return "constant";
    case ColumnStatus::too_few_pairs: return "too_few_pairs";
    case ColumnStatus::estimator_error: return "estimator_error";
  }
  return "?";
}

struct FeatureScore {
  std::size_t column_index = 0;
  std::string column_name;
  double score = 0.0;
  double raw = 0.0;
  std::size_t n_used = 0;
  ColumnStatus status = ColumnStatus::ok;
};

struct ScreeningReport {
  ScreeningConfig config;
  std::string outcome_name;
  std::vector<FeatureScore> scores;  // dataset column order
  double seconds = 0.0;
  std::size_t workers_used = 1;
};

/// Dispatches one (outcome, feature) pair to the configured estimator.
/// `outcome_bandwidth`, when given, replaces the ISJ selection on the outcome
/// axis of the continuous FFT-KDE estimator.
inline MiEstimate estimate_association(Method method, OutcomeKind kind, std::span<const double> y,
                                       std::span<const double> x, const EstimatorParams& params,
                                       std::uint64_t jitter_seed = 0,
                                       std::optional<Bandwidth> outcome_bandwidth = std::nullopt) {
  switch (method) {
    case Method::fftkde:
      if (kind == OutcomeKind::binary) return mi_fftkde_bc(y, x, params.fftkde());
      if (outcome_bandwidth) {
        detail::require_pairs(y, x, "mi_fftkde_cc");
        if (!detail::has_two_distinct(x)) fail_data("mi_fftkde_cc: feature is constant");
        return mi_fftkde_cc(y, x, *outcome_bandwidth, select_bandwidth(x, params.kernel, params.scaling),
                            params.fftkde());
      }
      return mi_fftkde_cc(y, x, params.fftkde());
    case Method::binning:
      return mi_binning(y, x, kind, BinningOptions{params.bins});
    case Method::knn: {
      const NeighborQuery q{params.k, jitter_seed};
      return kind == OutcomeKind::binary ? mi_knn_bc(y, x, q) : mi_knn_cc(y, x, q);
    }
    case Method::pearson:
      return pearson_abs(y, x, kind);
  }
  fail_usage("unknown method");
}

/// Upper bound on the heap bytes one worker's estimator calls hold at once.
inline std::size_t estimator_workspace_bytes(const ScreeningConfig& config, std::size_t rows) {
  const std::size_t d = sizeof(double);
  const std::size_t per_row = 24 * rows * d;
  switch (config.method) {
    case Method::fftkde: {
      const std::size_t g2 = config.params.grid_size_2d, g1 = config.params.grid_size_1d;
      const std::size_t padded = 4 * g2;
      return 8 * g2 * g2 * d + 8 * padded * d + 24 * g1 * d + 8 * 1024 * d + per_row;
    }
    case Method::binning: {
      const double n = static_cast<double>(std::max<std::size_t>(rows, 3));
      const auto max_bins = static_cast<std::size_t>(std::ceil(n / std::log(n))) + 2;
      return max_bins * max_bins * d + 4 * max_bins * d + per_row;
    }
    case Method::knn:
      return per_row;
    case Method::pearson:
      return 0;
  }
  return per_row;
}

namespace detail {

struct PreparedOutcome {
  std::string name;
  std::vector<double> values;  // NaN where missing; binary coded 0/1
  bool complete = true;
  std::optional<Bandwidth> bandwidth;  // continuous FFT-KDE only, when complete
};

inline std::size_t resolve_column(const DatasetHandle& data, const ColumnRef& ref) {
  if (const auto* index = std::get_if<std::size_t>(&ref)) {
    if (*index >= data.cols()) fail_usage("outcome column index " + std::to_string(*index) + " out of range");
    return *index;
  }
  const auto& name = std::get<std::string>(ref);
  const auto found = data.find(name);
  if (!found) fail_usage("no column named '" + name + "'");
  return *found;
}

inline PreparedOutcome prepare_outcome(std::span<const double> raw, std::string name, const ScreeningConfig& config) {
  PreparedOutcome out;
  out.name = std::move(name);
  out.values.assign(raw.begin(), raw.end());
  std::vector<double> distinct;
  for (double v : out.values) {
    if (std::isnan(v)) {
      out.complete = false;
      continue;
    }
    if (!std::isfinite(v)) fail_data("outcome contains an infinite value");
    if (distinct.size() <= 2 && std::find(distinct.begin(), distinct.end(), v) == distinct.end()) {
      distinct.push_back(v);
    }
  }
  if (config.outcome_kind == OutcomeKind::binary) {
    if (distinct.size() != 2) fail_data("binary outcome must have exactly two distinct values");
    const double low = std::min(distinct[0], distinct[1]);
    for (double& v : out.values) {
      if (!std::isnan(v)) v = v == low ? 0.0 : 1.0;
    }
  } else if (distinct.size() < 2) {
    fail_data("continuous outcome has fewer than two distinct values");
  }
  if (config.method == Method::fftkde && config.outcome_kind == OutcomeKind::continuous && out.complete) {
    out.bandwidth = select_bandwidth(out.values, config.params.kernel, config.params.scaling);
  }
  return out;
}

inline std::size_t minimum_pairs(const ScreeningConfig& config) {
  switch (config.method) {
    case Method::binning: return 4;
    case Method::knn: return config.params.k + 1;
    default: return 2;
  }
}

struct WorkerScratch {
  std::vector<double> column;
  std::vector<double> y;
  std::vector<double> x;
};

inline FeatureScore score_column(const DatasetHandle& data, std::size_t j, const PreparedOutcome& outcome,
                                 const ScreeningConfig& config, WorkerScratch& scratch) {
  FeatureScore fs;
  fs.column_index = j;
  fs.column_name = data.column_names()[j];
  const std::span<const double> col = data.column(j, scratch.column);

  std::span<const double> y, x;
  bool all_rows = outcome.complete;
  if (all_rows) {
    for (double v : col) {
      if (std::isnan(v)) {
        all_rows = false;
        break;
      }
    }
  }
  if (all_rows) {
    y = outcome.values;
    x = col;
  } else {
    scratch.y.clear();
    scratch.x.clear();
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (std::isnan(outcome.values[i]) || std::isnan(col[i])) continue;
      scratch.y.push_back(outcome.values[i]);
      scratch.x.push_back(col[i]);
    }
    y = scratch.y;
    x = scratch.x;
  }
  fs.n_used = x.size();
  if (fs.n_used < minimum_pairs(config)) {
    fs.status = ColumnStatus::too_few_pairs;
    return fs;
  }
  if (!has_two_distinct(x)) {
    fs.status = ColumnStatus::constant;
    return fs;
  }
  try {
    const auto estimate =
        estimate_association(config.method, config.outcome_kind, y, x, config.params,
                             derive_seed(config.seed, {j}), all_rows ? outcome.bandwidth : std::nullopt);
    fs.raw = estimate.raw;
    fs.score = estimate.clamped;
  } catch (const Error&) {
    fs.status = ColumnStatus::estimator_error;
    fs.raw = 0.0;
    fs.score = 0.0;
  }
  return fs;
}

inline ScreeningReport run_screen(const DatasetHandle& data, const PreparedOutcome& outcome,
                                  std::vector<std::size_t> candidates, const ScreeningConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.column_limit) {
    if (*config.column_limit == 0) fail_usage("column limit must be positive");
    candidates.resize(std::min(candidates.size(), *config.column_limit));
  }
  ScreeningReport report;
  report.config = config;
  report.outcome_name = outcome.name;
  report.scores.resize(candidates.size());

  const std::size_t p = candidates.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, p));
  const std::size_t block = std::max<std::size_t>(1, p / (workers * 8));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    WorkerScratch scratch;
    try {
      while (true) {
        const std::size_t begin = next.fetch_add(block);
        if (begin >= p) break;
        const std::size_t end = std::min(p, begin + block);
        for (std::size_t c = begin; c < end; ++c) {
          report.scores[c] = score_column(data, candidates[c], outcome, config, scratch);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(p);
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  report.workers_used = workers;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline void validate_config(const ScreeningConfig& config) {
  if (config.workers < 1) fail_usage("workers must be at least 1");
  if (config.method == Method::knn && config.params.k < 1) fail_usage("k must be at least 1");
  if (config.params.bins && *config.params.bins == 0) fail_usage("bin override must be positive");
}

inline std::vector<std::size_t> excluded_indices(const DatasetHandle& data, const ScreeningConfig& config) {
  std::vector<std::size_t> out;
  for (const auto& name : config.exclusions) {
    const auto found = data.find(name);
    if (!found) fail_usage("excluded column '" + name + "' does not exist");
    out.push_back(*found);
  }
  return out;
}

}  // namespace detail

/// Screens every column except the outcome and the exclusions.
inline ScreeningReport screen(const DatasetHandle& data, const ScreeningConfig& config) {
  detail::validate_config(config);
  if (data.rows() < 2) fail_data("dataset needs at least 2 rows");
  const std::size_t outcome_index = detail::resolve_column(data, config.outcome_column);
  auto skip = detail::excluded_indices(data, config);
  skip.push_back(outcome_index);
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (std::find(skip.begin(), skip.end(), j) == skip.end()) candidates.push_back(j);
  }
  std::vector<double> buffer;
  const auto outcome = detail::prepare_outcome(data.column(outcome_index, buffer),
                                               data.column_names()[outcome_index], config);
  return detail::run_screen(data, outcome, std::move(candidates), config);
}

/// Screens every non-excluded column against an outcome held outside the
/// dataset; config.outcome_column is ignored.
inline ScreeningReport screen(const DatasetHandle& data, std::span<const double> outcome_values,
                              const ScreeningConfig& config, std::string outcome_name = "outcome") {
  detail::validate_config(config);
  if (data.rows() < 2) fail_data("dataset needs at least 2 rows");
  if (outcome_values.size() != data.rows()) fail_usage("outcome length differs from dataset rows");
  const auto skip = detail::excluded_indices(data, config);
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (std::find(skip.begin(), skip.end(), j) == skip.end()) candidates.push_back(j);
  }
  const auto outcome = detail::prepare_outcome(outcome_values, std::move(outcome_name), config);
  return detail::run_screen(data, outcome, std::move(candidates), config);
}

/// Order in which features rank: descending score, ascending column index.
inline bool ranks_before(const FeatureScore& a, const FeatureScore& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.column_index < b.column_index;
}

inline std::vector<FeatureScore> top_k(std::span<const FeatureScore> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) fail_usage("top_k: k must lie in [1, number of features]");
  std::vector<FeatureScore> sorted(scores.begin(), scores.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(), ranks_before);
  sorted.resize(k);
  return sorted;
}

inline std::vector<FeatureScore> top_k(const ScreeningReport& report, std::size_t k) {
  return top_k(report.scores, k);
}

/// CSV with header index,name,score,raw,n_used,flag; one row per feature.
inline void write_report_csv(std::ostream& out, const ScreeningReport& report) {
  out << "index,name,score,raw,n_used,flag\n";
  for (const auto& s : report.scores) {
    out << s.column_index << ',' << s.column_name << ',' << format_double(s.score) << ','
        << format_double(s.raw) << ',' << s.n_used << ',' << to_string(s.status) << '\n';
  }
}

}  // namespace hdmi

#endif  // HDMI_SCREENING_HPP
