#ifndef HDMI_EVALUATION_HPP
#define HDMI_EVALUATION_HPP

// Variable-selection AUROC and replicated screening studies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hdmi/dataset.hpp"
#include "hdmi/error.hpp"
#include "hdmi/screening.hpp"
#include "hdmi/seed.hpp"
#include "hdmi/simulation.hpp"

namespace hdmi {

struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;  // 1 marks a true covariate
};

namespace detail {

inline std::size_t count_positives(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) fail_usage("scores and labels differ in length");
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) fail_data("labels must be 0 or 1");
    pos += l == 1;
  }
  return pos;
}

}  // namespace detail

/// Mann-Whitney area under the ROC curve with midranks for ties.
inline double auroc(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t pos = detail::count_positives(scores, labels);
  const std::size_t n = scores.size();
  if (pos == 0 || pos == n) fail_data("auroc needs both label classes");
  for (double s : scores) {
    if (!std::isfinite(s)) fail_data("auroc needs finite scores");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    const double midrank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t i = start; i < end; ++i) {
      if (labels[order[i]] == 1) positive_rank_sum += midrank;
    }
    start = end;
  }
  const double np = static_cast<double>(pos), nn = static_cast<double>(n - pos);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

inline double auroc(const LabeledScores& ls) { return auroc(ls.scores, ls.labels); }

struct Confusion {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

/// Selects the k best scores (ties by lower index) and compares with labels.
inline Confusion selection_confusion(std::span<const double> scores, std::span<const int> labels, std::size_t k) {
  const std::size_t pos = detail::count_positives(scores, labels);
  if (k < 1 || k > scores.size()) fail_usage("selection_confusion: k must lie in [1, p]");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  Confusion c;
  for (std::size_t i = 0; i < k; ++i) {
    if (labels[order[i]] == 1) {
      ++c.true_positives;
    } else {
      ++c.false_positives;
    }
  }
  c.false_negatives = pos - c.true_positives;
  return c;
}

inline Confusion selection_confusion(const LabeledScores& ls, std::size_t k) {
  return selection_confusion(ls.scores, ls.labels, k);
}

/// Labels each screened feature by membership in the true support.
inline LabeledScores label_report(const ScreeningReport& report, std::span<const std::size_t> true_support) {
  LabeledScores ls;
  for (const auto& s : report.scores) {
    ls.scores.push_back(s.score);
    ls.labels.push_back(std::binary_search(true_support.begin(), true_support.end(), s.column_index) ? 1 : 0);
  }
  return ls;
}

// ---------------------------------------------------------------------------
// Replicated studies

struct ReplicationPlan {
  std::vector<SimulationSpec> cells;  // per-cell seeds are replaced by derived seeds
  std::vector<Method> methods{Method::fftkde};
  std::size_t replications = 20;
  std::uint64_t root_seed = 0;
  std::vector<std::uint64_t> explicit_seeds;  // when non-empty: one distinct seed per replication
  ScreeningConfig screening{};               // method and outcome kind are set per cell
};

struct CellSummary {
  SimulationSpec spec;
  Method method = Method::fftkde;
  std::vector<double> aurocs;  // one per replication
  double mean_auroc = std::numeric_limits<double>::quiet_NaN();
  double ci_half_width = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string error;
};

/// Mean and normal-approximation 95% half-width 1.96 * sd / sqrt(R).
inline std::pair<double, double> mean_and_half_width(std::span<const double> values) {
  if (values.size() < 2) fail_usage("need at least two values for a confidence interval");
  const double r = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= r;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, 1.96 * std::sqrt(ss / (r - 1.0)) / std::sqrt(r)};
}

inline std::uint64_t replication_seed(const ReplicationPlan& plan, std::size_t cell, std::size_t replication) {
  if (!plan.explicit_seeds.empty()) return derive_seed(plan.explicit_seeds[replication], {cell});
  return derive_seed(plan.root_seed, {cell, replication});
}

/// Runs simulate, screen and auroc R times per cell; every method sees the
/// same simulated outcomes within a replication.
inline std::vector<CellSummary> replicate_and_summarize(const DatasetHandle& design, const ReplicationPlan& plan) {
  if (plan.replications < 2) fail_usage("replications must be at least 2");
  if (plan.methods.empty()) fail_usage("no methods given");
  if (!plan.explicit_seeds.empty()) {
    if (plan.explicit_seeds.size() != plan.replications) fail_usage("need one explicit seed per replication");
    std::vector<std::uint64_t> sorted = plan.explicit_seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail_usage("replication seeds must be distinct");
    }
  }
  std::vector<CellSummary> out;
  for (std::size_t c = 0; c < plan.cells.size(); ++c) {
    std::vector<CellSummary> cell(plan.methods.size());
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      cell[m].spec = plan.cells[c];
      cell[m].spec.seed = 0;
      cell[m].method = plan.methods[m];
    }
    for (std::size_t r = 0; r < plan.replications; ++r) {
      SimulationSpec spec = plan.cells[c];
      spec.seed = replication_seed(plan, c, r);
      SimulatedDataset sim;
      try {
        sim = simulate(design, spec);
      } catch (const Error& e) {
        for (auto& s : cell) {
          s.failed = true;
          if (s.error.empty()) s.error = e.what();
        }
        continue;
      }
      for (std::size_t m = 0; m < plan.methods.size(); ++m) {
        if (cell[m].failed) continue;
        ScreeningConfig config = plan.screening;
        config.method = plan.methods[m];
        config.outcome_kind =
            spec.outcome == OutcomeType::continuous ? OutcomeKind::continuous : OutcomeKind::binary;
        config.seed = spec.seed;
        try {
          const auto report = screen(design, sim.y, config);
          cell[m].aurocs.push_back(auroc(label_report(report, sim.true_support)));
        } catch (const Error& e) {
          cell[m].failed = true;
          cell[m].error = e.what();
        }
      }
    }
    for (auto& s : cell) {
      if (!s.failed) std::tie(s.mean_auroc, s.ci_half_width) = mean_and_half_width(s.aurocs);
      out.push_back(std::move(s));
    }
  }
  return out;
}

inline void write_summary_csv(std::ostream& out, std::span<const CellSummary> rows) {
  out << "p_true,mode,outcome,snr,toeplitz_rho,method,mean_auroc,ci_half_width,R,status\n";
  for (const auto& s : rows) {
    out << s.spec.p_true << ',' << to_string(s.spec.mode) << ',' << to_string(s.spec.outcome) << ','
        << format_double(s.spec.snr) << ',' << format_double(s.spec.toeplitz_rho) << ',' << to_string(s.method)
        << ',' << format_double(s.mean_auroc) << ',' << format_double(s.ci_half_width) << ',' << s.aurocs.size()
        << ',' << (s.failed ? "failed" : "ok") << '\n';
  }
}

}  // namespace hdmi

#endif  // HDMI_EVALUATION_HPP
