#ifndef HDMI_SIMULATION_HPP
#define HDMI_SIMULATION_HPP

// Synthetic outcomes drawn from a design matrix with a sparse true support.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hdmi/dataset.hpp"
#include "hdmi/error.hpp"
#include "hdmi/seed.hpp"

namespace hdmi {

enum class Association {
  linear,
  nonlinear,  // true columns enter squared
  null,       // outcome drawn independently of the design
};

enum class OutcomeType { continuous, binary_original, binary_translated };

inline std::string_view to_string(Association a) {
  switch (a) {
    case Association::linear: return "linear";
    case Association::nonlinear: return "nonlinear";
    case Association::null: return "null";
  }
  return "?";
}

inline std::string_view to_string(OutcomeType o) {
  switch (o) {
    case OutcomeType::continuous: return "continuous";
    case OutcomeType::binary_original: return "binary_original";
    case OutcomeType::binary_translated: return "binary_translated";
  }
  return "?";
}

struct SimulationSpec {
  std::size_t p_true = 10;
  Association mode = Association::linear;
  OutcomeType outcome = OutcomeType::continuous;
  double snr = 3.0;
  double toeplitz_rho = 0.6;
  std::uint64_t seed = 0;
  bool per_observation_snr = false;  // divide the signal energy by N before applying snr
};

struct SimulatedDataset {
  std::vector<double> y;
  std::vector<std::size_t> true_support;  // ascending dataset column indices
  std::vector<double> beta_true;          // aligned with true_support
  double sigma_true = std::numeric_limits<double>::quiet_NaN();  // continuous outcomes only
};

/// Standardized columns of the true sub-matrix, each of length rows.
struct DesignSubmatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> support;
  std::vector<std::vector<double>> columns;
};

/// arctanh(sqrt(1/3)): the logit at which the logistic curve bends most.
inline const double kTranslationShift = std::atanh(std::sqrt(1.0 / 3.0));

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

namespace detail {

inline std::uint64_t substream(std::uint64_t seed, std::string_view role) {
  return derive_seed(seed, {stream_key(role)});
}

/// Population-denominator standardization in place; throws when constant.
inline void standardize(std::span<double> v, std::string_view what) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= n;
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || !std::isfinite(sd)) fail_numeric(std::string(what) + " is constant");
  for (double& a : v) a = (a - mean) / sd;
}

inline bool eligible(std::span<const double> column) {
  for (double v : column) {
    if (!std::isfinite(v)) return false;
  }
  return std::adjacent_find(column.begin(), column.end(), std::not_equal_to<>()) != column.end();
}

}  // namespace detail

/// beta ~ N(1, Sigma) with Sigma_ij = rho^|i-j|, via the Cholesky factor.
inline std::vector<double> sample_beta(std::size_t p_true, double rho, std::uint64_t seed) {
  if (p_true < 1) fail_usage("sample_beta: p_true must be positive");
  if (!(std::abs(rho) < 1.0)) fail_usage("sample_beta: toeplitz rho must lie in (-1, 1)");
  const auto p = static_cast<Eigen::Index>(p_true);
  Eigen::MatrixXd sigma(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) fail_numeric("sample_beta: covariance is not positive definite");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < p; ++i) z(i) = normal(rng);
  const Eigen::VectorXd beta = Eigen::VectorXd::Ones(p) + llt.matrixL() * z;
  return {beta.data(), beta.data() + p};
}

/// Picks p_true eligible columns uniformly, standardizes them and, for the
/// nonlinear mode, squares and standardizes again. Columns with missing or
/// non-finite values or a single distinct value are not eligible.
inline DesignSubmatrix build_design(const DatasetHandle& data, const SimulationSpec& spec) {
  if (spec.p_true < 1) fail_usage("p_true must be positive");
  std::vector<std::size_t> pool;
  std::vector<double> buffer;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (detail::eligible(data.column(j, buffer))) pool.push_back(j);
  }
  if (pool.size() < spec.p_true) {
    fail_data("design has " + std::to_string(pool.size()) + " eligible columns, fewer than p_true = " +
              std::to_string(spec.p_true));
  }
  std::mt19937_64 rng(detail::substream(spec.seed, "columns"));
  for (std::size_t i = 0; i < spec.p_true; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  DesignSubmatrix out;
  out.rows = data.rows();
  out.support.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(spec.p_true));
  std::sort(out.support.begin(), out.support.end());
  for (std::size_t j : out.support) {
    std::vector<double> c = data.column_copy(j);
    detail::standardize(c, "design column " + data.column_names()[j]);
    if (spec.mode == Association::nonlinear) {
      for (double& v : c) v *= v;
      detail::standardize(c, "squared design column " + data.column_names()[j]);
    }
    out.columns.push_back(std::move(c));
  }
  return out;
}

inline std::vector<double> linear_predictor(const DesignSubmatrix& x, std::span<const double> beta) {
  if (beta.size() != x.columns.size()) fail_usage("beta length differs from the true column count");
  std::vector<double> out(x.rows, 0.0);
  for (std::size_t j = 0; j < beta.size(); ++j) {
    for (std::size_t i = 0; i < x.rows; ++i) out[i] += x.columns[j][i] * beta[j];
  }
  return out;
}

struct ContinuousDraw {
  std::vector<double> y;
  double sigma_true = 0.0;
};

/// y = X beta + eps with sigma_true = sqrt(beta' X' X beta / snr), or with the
/// signal energy divided by N when per_observation is set.
inline ContinuousDraw simulate_continuous(const DesignSubmatrix& x, std::span<const double> beta, double snr,
                                          std::uint64_t seed, bool per_observation = false) {
  if (!(snr > 0.0)) fail_usage("snr must be positive");
  ContinuousDraw out;
  out.y = linear_predictor(x, beta);
  double energy = 0.0;
  for (double v : out.y) energy += v * v;
  if (!(energy > 0.0)) fail_numeric("signal vector is zero");
  if (per_observation) energy /= static_cast<double>(x.rows);
  out.sigma_true = std::sqrt(energy / snr);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, out.sigma_true);
  for (double& v : out.y) v += noise(rng);
  return out;
}

/// tau'': the standardized linear predictor, shifted by kTranslationShift
/// when translated.
inline std::vector<double> binary_logits(const DesignSubmatrix& x, std::span<const double> beta, bool translated) {
  std::vector<double> tau = linear_predictor(x, beta);
  detail::standardize(tau, "linear predictor");
  if (translated) {
    for (double& t : tau) t += kTranslationShift;
  }
  return tau;
}

/// 0/1 outcome with y_i ~ Bernoulli(logistic(tau''_i)).
inline std::vector<double> simulate_binary(const DesignSubmatrix& x, std::span<const double> beta, bool translated,
                                           std::uint64_t seed) {
  const std::vector<double> tau = binary_logits(x, beta, translated);
  std::mt19937_64 rng(seed);
  std::vector<double> y(tau.size());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    std::bernoulli_distribution draw(logistic(tau[i]));
    y[i] = draw(rng) ? 1.0 : 0.0;
    ones += y[i] == 1.0;
  }
  if (ones == 0 || ones == y.size()) fail_numeric("binary simulation produced a single class");
  return y;
}

/// Full procedure: support, coefficients, and outcome, each from its own
/// sub-stream of spec.seed.
inline SimulatedDataset simulate(const DatasetHandle& data, const SimulationSpec& spec) {
  if (!(spec.snr > 0.0)) fail_usage("snr must be positive");
  const DesignSubmatrix x = build_design(data, spec);
  SimulatedDataset out;
  out.true_support = x.support;
  out.beta_true = sample_beta(spec.p_true, spec.toeplitz_rho, detail::substream(spec.seed, "beta"));
  const std::uint64_t outcome_seed =
      detail::substream(spec.seed, spec.outcome == OutcomeType::continuous ? "noise" : "bernoulli");
  if (spec.mode == Association::null) {
    std::mt19937_64 rng(outcome_seed);
    out.y.resize(x.rows);
    if (spec.outcome == OutcomeType::continuous) {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (double& v : out.y) v = normal(rng);
      out.sigma_true = 1.0;
    } else {
      std::bernoulli_distribution coin(0.5);
      for (double& v : out.y) v = coin(rng) ? 1.0 : 0.0;
      if (std::all_of(out.y.begin(), out.y.end(), [&](double v) { return v == out.y.front(); })) {
        fail_numeric("binary simulation produced a single class");
      }
    }
    return out;
  }
  if (spec.outcome == OutcomeType::continuous) {
    auto draw = simulate_continuous(x, out.beta_true, spec.snr, outcome_seed, spec.per_observation_snr);
    out.y = std::move(draw.y);
    out.sigma_true = draw.sigma_true;
  } else {
    out.y = simulate_binary(x, out.beta_true, spec.outcome == OutcomeType::binary_translated, outcome_seed);
  }
  return out;
}

/// Gaussian design whose adjacent columns have correlation rho (AR(1) across
/// the column index); each column is marginally N(0, 1).
inline DatasetHandle ar_design(std::size_t rows, std::size_t cols, double rho, std::uint64_t seed) {
  if (rows < 1 || cols < 1) fail_usage("ar_design: empty shape");
  if (!(std::abs(rho) < 1.0)) fail_usage("ar_design: rho must lie in (-1, 1)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - rho * rho);
  std::vector<std::vector<double>> columns(cols, std::vector<double>(rows));
  std::vector<std::string> names(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double prev = normal(rng);
    columns[0][i] = prev;
    for (std::size_t j = 1; j < cols; ++j) {
      prev = rho * prev + innovation * normal(rng);
      columns[j][i] = prev;
    }
  }
  for (std::size_t j = 0; j < cols; ++j) names[j] = "x" + std::to_string(j);
  return DatasetHandle::from_columns(std::move(names), std::move(columns));
}

}  // namespace hdmi

#endif  // HDMI_SIMULATION_HPP
