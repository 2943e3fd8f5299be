#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "hdmi/simulation.hpp"

using hdmi::Association;
using hdmi::OutcomeType;
using hdmi::SimulationSpec;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s / static_cast<double>(v.size());
}

double population_sd(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double a : v) ss += (a - m) * (a - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

hdmi::ErrorKind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const hdmi::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no hdmi::Error thrown";
  return hdmi::ErrorKind::usage;
}

SimulationSpec spec_of(Association mode, OutcomeType outcome, std::uint64_t seed, std::size_t p_true = 10) {
  SimulationSpec s;
  s.p_true = p_true;
  s.mode = mode;
  s.outcome = outcome;
  s.seed = seed;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coefficients

TEST(SampleBeta, IndependentComponentsAtRhoZero) {
  const std::size_t draws = 100000, p = 4;
  std::vector<std::vector<double>> comp(p);
  for (std::size_t r = 0; r < draws; ++r) {
    const auto b = hdmi::sample_beta(p, 0.0, r);
    for (std::size_t j = 0; j < p; ++j) comp[j].push_back(b[j]);
  }
  for (std::size_t j = 0; j < p; ++j) {
    EXPECT_NEAR(mean_of(comp[j]), 1.0, 0.02);
    EXPECT_NEAR(population_sd(comp[j]), 1.0, 0.02);
    for (std::size_t k = j + 1; k < p; ++k) {
      double cov = 0.0;
      const double mj = mean_of(comp[j]), mk = mean_of(comp[k]);
      for (std::size_t r = 0; r < draws; ++r) cov += (comp[j][r] - mj) * (comp[k][r] - mk);
      EXPECT_LT(std::abs(cov / draws), 0.02);
    }
  }
}

TEST(SampleBeta, ToeplitzCorrelation) {
  const std::size_t draws = 100000;
  std::vector<double> a, b;
  for (std::size_t r = 0; r < draws; ++r) {
    const auto beta = hdmi::sample_beta(2, 0.6, 1000 + r);
    a.push_back(beta[0]);
    b.push_back(beta[1]);
  }
  EXPECT_NEAR(correlation(a, b), 0.6, 0.01);
}

TEST(SampleBeta, ThreeComponentLagCorrelations) {
  const std::size_t draws = 100000;
  std::vector<double> a, c;
  for (std::size_t r = 0; r < draws; ++r) {
    const auto beta = hdmi::sample_beta(3, 0.6, 5000000 + r);
    a.push_back(beta[0]);
    c.push_back(beta[2]);
  }
  EXPECT_NEAR(correlation(a, c), 0.36, 0.01);
}

TEST(SampleBeta, DeterministicAndGuarded) {
  EXPECT_TRUE(bitwise_equal(hdmi::sample_beta(5, 0.6, 42), hdmi::sample_beta(5, 0.6, 42)));
  EXPECT_FALSE(bitwise_equal(hdmi::sample_beta(5, 0.6, 42), hdmi::sample_beta(5, 0.6, 43)));
  EXPECT_EQ(hdmi::sample_beta(1, 0.6, 7).size(), 1u);
  EXPECT_EQ(error_kind([] { hdmi::sample_beta(3, 1.0, 0); }), hdmi::ErrorKind::usage);
  EXPECT_EQ(error_kind([] { hdmi::sample_beta(3, -1.5, 0); }), hdmi::ErrorKind::usage);
  EXPECT_EQ(error_kind([] { hdmi::sample_beta(0, 0.5, 0); }), hdmi::ErrorKind::usage);
}

// ---------------------------------------------------------------------------
// Design

TEST(BuildDesign, ColumnsAreStandardized) {
  const auto data = hdmi::ar_design(300, 50, 0.5, 1);
  for (Association mode : {Association::linear, Association::nonlinear}) {
    const auto x = hdmi::build_design(data, spec_of(mode, OutcomeType::continuous, 2));
    ASSERT_EQ(x.columns.size(), 10u);
    for (const auto& c : x.columns) {
      EXPECT_NEAR(mean_of(c), 0.0, 1e-10);
      EXPECT_NEAR(population_sd(c), 1.0, 1e-10);
    }
  }
}

TEST(BuildDesign, LinearIsStandardizedSelection) {
  const auto data = hdmi::ar_design(200, 30, 0.5, 3);
  const auto x = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, 4));
  for (std::size_t k = 0; k < x.support.size(); ++k) {
    auto expected = data.column_copy(x.support[k]);
    const double m = mean_of(expected), sd = population_sd(expected);
    for (double& v : expected) v = (v - m) / sd;
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(x.columns[k][i], expected[i], 1e-12);
  }
}

TEST(BuildDesign, SquaredColumnDecorrelatesFromOriginal) {
  double mean_r = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto data = hdmi::ar_design(1000, 1, 0.0, 1000 + s);
    const auto lin = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, 6, 1));
    const auto sq = hdmi::build_design(data, spec_of(Association::nonlinear, OutcomeType::continuous, 6, 1));
    mean_r += correlation(lin.columns[0], sq.columns[0]) / seeds;
  }
  EXPECT_LT(std::abs(mean_r), 0.05);

  const auto data = hdmi::ar_design(1000, 1, 0.0, 5);
  const auto lin = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, 6, 1));
  const auto sq = hdmi::build_design(data, spec_of(Association::nonlinear, OutcomeType::continuous, 6, 1));
  // Squaring then re-standardizing the linear column gives the nonlinear column.
  auto expected = lin.columns[0];
  for (double& v : expected) v *= v;
  const double m = mean_of(expected), sd = population_sd(expected);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(sq.columns[0][i], (expected[i] - m) / sd, 1e-12);
}

TEST(BuildDesign, SupportIsDistinctSortedAndEligible) {
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d(0.0, 1.0);
  for (std::size_t j = 0; j < 12; ++j) {
    std::vector<double> c(50);
    for (auto& v : c) v = d(rng);
    if (j % 3 == 0) std::fill(c.begin(), c.end(), 2.0);
    if (j == 4) c[3] = std::numeric_limits<double>::quiet_NaN();
    cols.push_back(c);
    names.push_back("c" + std::to_string(j));
  }
  const auto data = hdmi::DatasetHandle::from_columns(names, cols);
  const std::set<std::size_t> eligible{1, 2, 5, 7, 8, 10, 11};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto x = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, seed, 7));
    EXPECT_TRUE(std::is_sorted(x.support.begin(), x.support.end()));
    EXPECT_EQ(std::set<std::size_t>(x.support.begin(), x.support.end()), eligible);
  }
  EXPECT_EQ(error_kind([&] { hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, 0, 8)); }),
            hdmi::ErrorKind::data);
}

TEST(BuildDesign, SelectionIsRoughlyUniform) {
  const auto data = hdmi::ar_design(20, 10, 0.0, 8);
  std::vector<int> hits(10, 0);
  const int reps = 5000;
  for (int r = 0; r < reps; ++r) {
    for (std::size_t j : hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, r, 3)).support) {
      ++hits[j];
    }
  }
  // Each column is chosen with probability 3/10; binomial sd is about 32.
  for (int h : hits) EXPECT_NEAR(h, reps * 0.3, 160);
}

// ---------------------------------------------------------------------------
// Continuous outcome

TEST(SimulateContinuous, NoiselessLimit) {
  const auto data = hdmi::ar_design(400, 20, 0.5, 9);
  const auto x = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, 10));
  const auto beta = hdmi::sample_beta(10, 0.6, 11);
  const auto signal = hdmi::linear_predictor(x, beta);
  const auto draw = hdmi::simulate_continuous(x, beta, 1e12, 12);
  double dev = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) dev = std::max(dev, std::abs(draw.y[i] - signal[i]));
  EXPECT_LT(dev, 1e-4 * population_sd(signal));
}

TEST(SimulateContinuous, SigmaFollowsSignalEnergy) {
  const auto data = hdmi::ar_design(250, 20, 0.5, 13);
  const auto x = hdmi::build_design(data, spec_of(Association::nonlinear, OutcomeType::continuous, 14));
  const auto beta = hdmi::sample_beta(10, 0.6, 15);
  double energy = 0.0;
  for (double v : hdmi::linear_predictor(x, beta)) energy += v * v;
  EXPECT_NEAR(hdmi::simulate_continuous(x, beta, 3.0, 1).sigma_true, std::sqrt(energy / 3.0), 1e-12);
  EXPECT_NEAR(hdmi::simulate_continuous(x, beta, 3.0, 1, true).sigma_true, std::sqrt(energy / 250.0 / 3.0), 1e-12);
}

TEST(SimulateContinuous, SampleSnrIsThreeOverN) {
  const std::size_t n = 200;
  const auto data = hdmi::ar_design(n, 30, 0.5, 16);
  double ratio_sum = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto x = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, 100 + r));
    const auto beta = hdmi::sample_beta(10, 0.6, 300 + r);
    const auto signal = hdmi::linear_predictor(x, beta);
    const auto draw = hdmi::simulate_continuous(x, beta, 3.0, 500 + r);
    std::vector<double> eps(n);
    for (std::size_t i = 0; i < n; ++i) eps[i] = draw.y[i] - signal[i];
    ratio_sum += std::pow(population_sd(signal) / population_sd(eps), 2);
  }
  const double expected = 3.0 / static_cast<double>(n);
  EXPECT_NEAR(ratio_sum / reps, expected, 0.10 * expected);
}

TEST(SimulateContinuous, Guards) {
  const auto data = hdmi::ar_design(50, 5, 0.5, 17);
  const auto x = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::continuous, 1, 2));
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_EQ(error_kind([&] { hdmi::simulate_continuous(x, zero, 3.0, 0); }), hdmi::ErrorKind::numeric);
  EXPECT_EQ(error_kind([&] { hdmi::simulate_continuous(x, std::vector<double>{1.0, 1.0}, 0.0, 0); }),
            hdmi::ErrorKind::usage);
}

// ---------------------------------------------------------------------------
// Binary outcome

TEST(SimulateBinary, LogisticAndShift) {
  EXPECT_EQ(hdmi::logistic(0.0), 0.5);
  EXPECT_NEAR(hdmi::kTranslationShift, 0.65848, 1e-5);
  // The shift is where tanh has its largest absolute second derivative.
  double best_u = 0.0, best = 0.0;
  for (double u = 0.0; u < 3.0; u += 1e-6) {
    const double t = std::tanh(u), c = std::abs(-2.0 * t * (1.0 - t * t));
    if (c > best) {
      best = c;
      best_u = u;
    }
  }
  EXPECT_NEAR(best_u, hdmi::kTranslationShift, 1e-5);
}

TEST(SimulateBinary, TranslationOnlyInTranslatedVariant) {
  const auto data = hdmi::ar_design(300, 20, 0.5, 18);
  const auto x = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::binary_original, 19));
  const auto beta = hdmi::sample_beta(10, 0.6, 20);
  const auto plain = hdmi::binary_logits(x, beta, false), shifted = hdmi::binary_logits(x, beta, true);
  EXPECT_NEAR(mean_of(plain), 0.0, 1e-10);
  EXPECT_NEAR(population_sd(plain), 1.0, 1e-10);
  for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_EQ(shifted[i], plain[i] + hdmi::kTranslationShift);
}

TEST(SimulateBinary, ClassBalance) {
  const auto data = hdmi::ar_design(5000, 20, 0.5, 21);
  const auto x = hdmi::build_design(data, spec_of(Association::linear, OutcomeType::binary_original, 22));
  const auto beta = hdmi::sample_beta(10, 0.6, 23);
  const auto y0 = hdmi::simulate_binary(x, beta, false, 24), y1 = hdmi::simulate_binary(x, beta, true, 24);
  EXPECT_NEAR(mean_of(y0), 0.5, 0.05);
  // Monte-Carlo reference for E[logistic(Z + shift)], Z ~ N(0, 1).
  std::mt19937_64 rng(25);
  std::normal_distribution<double> d(0.0, 1.0);
  double ref = 0.0;
  for (int i = 0; i < 200000; ++i) ref += hdmi::logistic(d(rng) + hdmi::kTranslationShift);
  EXPECT_NEAR(mean_of(y1), ref / 200000, 0.03);
  for (double v : y0) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(SimulateBinary, SingleClassFailsLoudly) {
  const auto data = hdmi::ar_design(2, 3, 0.0, 26);
  bool saw_failure = false;
  for (std::uint64_t seed = 0; seed < 50 && !saw_failure; ++seed) {
    try {
      hdmi::simulate(data, spec_of(Association::linear, OutcomeType::binary_original, seed, 1));
    } catch (const hdmi::Error& e) {
      EXPECT_EQ(e.kind(), hdmi::ErrorKind::numeric);
      saw_failure = true;
    }
  }
  EXPECT_TRUE(saw_failure);
}

// ---------------------------------------------------------------------------
// Full procedure

TEST(Simulate, BitwiseDeterministicPerSeed) {
  const auto data = hdmi::ar_design(300, 40, 0.5, 27);
  for (auto outcome : {OutcomeType::continuous, OutcomeType::binary_original, OutcomeType::binary_translated}) {
    for (auto mode : {Association::linear, Association::nonlinear, Association::null}) {
      const auto a = hdmi::simulate(data, spec_of(mode, outcome, 99));
      const auto b = hdmi::simulate(data, spec_of(mode, outcome, 99));
      const auto c = hdmi::simulate(data, spec_of(mode, outcome, 100));
      EXPECT_TRUE(bitwise_equal(a.y, b.y));
      EXPECT_EQ(a.true_support, b.true_support);
      EXPECT_TRUE(bitwise_equal(a.beta_true, b.beta_true));
      EXPECT_FALSE(bitwise_equal(a.y, c.y));
    }
  }
}

TEST(Simulate, ResultShape) {
  const auto data = hdmi::ar_design(200, 40, 0.5, 28);
  const auto s = hdmi::simulate(data, spec_of(Association::nonlinear, OutcomeType::continuous, 1, 7));
  EXPECT_EQ(s.y.size(), 200u);
  EXPECT_EQ(s.true_support.size(), 7u);
  EXPECT_EQ(s.beta_true.size(), 7u);
  EXPECT_EQ(std::set<std::size_t>(s.true_support.begin(), s.true_support.end()).size(), 7u);
  EXPECT_GT(s.sigma_true, 0.0);
  for (double v : s.y) EXPECT_TRUE(std::isfinite(v));
  const auto b = hdmi::simulate(data, spec_of(Association::linear, OutcomeType::binary_translated, 1, 7));
  EXPECT_TRUE(std::isnan(b.sigma_true));
}

TEST(Simulate, NullOutcomeIgnoresDesign) {
  const auto data = hdmi::ar_design(2000, 20, 0.5, 29);
  const auto s = hdmi::simulate(data, spec_of(Association::null, OutcomeType::continuous, 3));
  EXPECT_NEAR(mean_of(s.y), 0.0, 0.1);
  EXPECT_NEAR(population_sd(s.y), 1.0, 0.1);
  for (std::size_t j : s.true_support) EXPECT_LT(std::abs(correlation(s.y, data.column_copy(j))), 0.1);
}

TEST(Simulate, SubstreamsAreIndependentOfOutcomeKind) {
  const auto data = hdmi::ar_design(200, 40, 0.5, 30);
  const auto c = hdmi::simulate(data, spec_of(Association::linear, OutcomeType::continuous, 5));
  const auto b = hdmi::simulate(data, spec_of(Association::linear, OutcomeType::binary_original, 5));
  EXPECT_EQ(c.true_support, b.true_support);
  EXPECT_TRUE(bitwise_equal(c.beta_true, b.beta_true));
}

TEST(ArDesign, AdjacentColumnCorrelation) {
  const auto data = hdmi::ar_design(20000, 3, 0.5, 31);
  const auto a = data.column_copy(0), b = data.column_copy(1), c = data.column_copy(2);
  EXPECT_NEAR(correlation(a, b), 0.5, 0.02);
  EXPECT_NEAR(correlation(a, c), 0.25, 0.02);
  EXPECT_NEAR(population_sd(c), 1.0, 0.02);
  EXPECT_EQ(data.column_names()[2], "x2");
}
