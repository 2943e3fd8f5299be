#ifndef HDMI_MI_HPP
#define HDMI_MI_HPP

// Association measures between one outcome and one feature. Mutual
// information is reported in nats; the Pearson measure shares the result type
// but is an absolute correlation in [0, 1].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "hdmi/error.hpp"
#include "hdmi/kde.hpp"
#include "hdmi/seed.hpp"

namespace hdmi {

enum class Method { fftkde, binning, knn, pearson };
enum class OutcomeKind { continuous, binary };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::fftkde: return "fftkde";
    case Method::binning: return "binning";
    case Method::knn: return "knn";
    case Method::pearson: return "pearson";
  }
  return "?";
}

inline std::string_view to_string(OutcomeKind k) {
  return k == OutcomeKind::continuous ? "continuous" : "binary";
}

struct MiEstimate {
  double raw = 0.0;
  double clamped = 0.0;  // max(0, raw); used for ranking
  Method method = Method::fftkde;
  OutcomeKind outcome_kind = OutcomeKind::continuous;
};

inline MiEstimate make_estimate(double raw, Method method, OutcomeKind kind) {
  if (!std::isfinite(raw)) fail_numeric("estimator produced a non-finite value");
  return {raw, std::max(0.0, raw), method, kind};
}

/// Counts of a two-way discrete sample.
class ContingencyTable {
 public:
  ContingencyTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), counts_(rows * cols, 0) {
    if (rows == 0 || cols == 0) fail_usage("contingency table needs at least one row and column");
  }

  ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::uint64_t> counts)
      : rows_(rows), cols_(cols), counts_(std::move(counts)) {
    if (rows == 0 || cols == 0 || counts_.size() != rows * cols) {
      fail_usage("contingency table shape does not match its counts");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t operator()(std::size_t r, std::size_t c) const { return counts_[r * cols_ + c]; }
  void add(std::size_t r, std::size_t c) { ++counts_[r * cols_ + c]; }

  std::uint64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> counts_;
};

/// Plug-in MI of the empirical joint distribution. Rounding can leave the sum
/// a few ulps below zero; the result is floored at zero.
inline MiEstimate mi_discrete(const ContingencyTable& table,
                              Method method = Method::binning,
                              OutcomeKind kind = OutcomeKind::continuous) {
  const std::uint64_t total = table.total();
  if (total == 0) fail_data("mi_discrete: table has no counts");
  const auto n = static_cast<double>(total);
  std::vector<double> p_row(table.rows(), 0.0), p_col(table.cols(), 0.0);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < table.cols(); ++c) s += table(r, c);
    p_row[r] = static_cast<double>(s) / n;
  }
  for (std::size_t c = 0; c < table.cols(); ++c) {
    std::uint64_t s = 0;
    for (std::size_t r = 0; r < table.rows(); ++r) s += table(r, c);
    p_col[c] = static_cast<double>(s) / n;
  }
  double raw = 0.0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (table(r, c) == 0) continue;
      const double p = static_cast<double>(table(r, c)) / n;
      raw += p * std::log(p / (p_row[r] * p_col[c]));
    }
  }
  return make_estimate(std::max(0.0, raw), method, kind);
}

namespace detail {

inline void require_pairs(std::span<const double> y, std::span<const double> x, std::string_view who) {
  if (y.size() != x.size()) fail_usage(std::string(who) + ": length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]) || !std::isfinite(x[i])) {
      fail_data(std::string(who) + ": non-finite input");
    }
  }
}

struct ClassSplit {
  std::vector<double> members[2];
};

inline ClassSplit split_by_class(std::span<const double> y01, std::span<const double> x,
                                 std::string_view who) {
  ClassSplit split;
  for (std::size_t i = 0; i < y01.size(); ++i) {
    if (y01[i] == 0.0) {
      split.members[0].push_back(x[i]);
    } else if (y01[i] == 1.0) {
      split.members[1].push_back(x[i]);
    } else {
      fail_data(std::string(who) + ": binary outcome must be coded 0/1");
    }
  }
  if (split.members[0].empty() || split.members[1].empty()) {
    fail_data(std::string(who) + ": outcome has a single class");
  }
  return split;
}

inline constexpr double kDensityFloor = 1e-12;

}  // namespace detail

// ---------------------------------------------------------------------------
// FFT kernel density estimators

enum class Marginals {
  from_joint,   // Riemann sums of the joint grid along each axis
  independent,  // separate 1D KDEs on the joint grid's axes
};

/// How a Gaussian-scale ISJ bandwidth is applied to the Epanechnikov kernel.
enum class BandwidthScaling {
  direct,     // ISJ value used as the kernel half-width
  canonical,  // multiplied by kEpanechnikovPerGaussian (equal AMISE smoothing)
};

struct FftKdeOptions {
  Kernel kernel{};
  BandwidthScaling scaling = BandwidthScaling::direct;
  std::size_t grid_size_2d = kDefaultGridSize2D;
  std::size_t grid_size_1d = kDefaultGridSize1D;
  Marginals marginals = Marginals::from_joint;
};

/// ISJ bandwidth for `kernel` under the chosen scaling.
inline Bandwidth select_bandwidth(std::span<const double> data, Kernel kernel,
                                  BandwidthScaling scaling = BandwidthScaling::direct) {
  const Bandwidth h = bandwidth_isj(data);
  return scaling == BandwidthScaling::canonical ? equivalent_bandwidth(h, kernel) : h;
}

/// Forward-Euler (left Riemann) evaluation of the MI integral on a joint grid.
inline double mi_from_density_grid(const DensityGrid2D& joint, std::span<const double> marginal_y,
                                   std::span<const double> marginal_x) {
  const double dy = joint.grid.axis_y.spacing;
  const double dx = joint.grid.axis_x.spacing;
  double raw = 0.0;
  for (std::size_t r = 0; r < joint.density.rows; ++r) {
    const auto row = joint.density.row(r);
    double row_sum = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double f = row[c];
      if (f <= detail::kDensityFloor) continue;
      const double product = marginal_y[r] * marginal_x[c];
      if (!(product > 0.0)) continue;
      row_sum += f * std::log(f / product);
    }
    raw += row_sum;
  }
  return raw * dy * dx;
}

/// FFT-KDE mutual information for two continuous variables using the given
/// per-axis bandwidths.
inline MiEstimate mi_fftkde_cc(std::span<const double> y, std::span<const double> x,
                               Bandwidth bandwidth_y, Bandwidth bandwidth_x,
                               const FftKdeOptions& options = {}) {
  detail::require_pairs(y, x, "mi_fftkde_cc");
  const DensityGrid2D joint =
      kde_2d(y, x, options.kernel, bandwidth_y, bandwidth_x, options.grid_size_2d);
  std::vector<double> fy(joint.density.rows, 0.0), fx(joint.density.cols, 0.0);
  if (options.marginals == Marginals::from_joint) {
    for (std::size_t r = 0; r < joint.density.rows; ++r) {
      const auto row = joint.density.row(r);
      double s = 0.0;
      for (std::size_t c = 0; c < row.size(); ++c) {
        s += row[c];
        fx[c] += row[c];
      }
      fy[r] = s * joint.grid.axis_x.spacing;
    }
    for (double& v : fx) v *= joint.grid.axis_y.spacing;
  } else {
    fy = kde_1d_on_grid(y, options.kernel, bandwidth_y, joint.grid.axis_y).density;
    fx = kde_1d_on_grid(x, options.kernel, bandwidth_x, joint.grid.axis_x).density;
  }
  return make_estimate(mi_from_density_grid(joint, fy, fx), Method::fftkde, OutcomeKind::continuous);
}

/// FFT-KDE mutual information with ISJ bandwidths selected per axis.
inline MiEstimate mi_fftkde_cc(std::span<const double> y, std::span<const double> x,
                               const FftKdeOptions& options = {}) {
  detail::require_pairs(y, x, "mi_fftkde_cc");
  if (!detail::has_two_distinct(y) || !detail::has_two_distinct(x)) {
    fail_data("mi_fftkde_cc: each axis needs at least two distinct values");
  }
  return mi_fftkde_cc(y, x, select_bandwidth(y, options.kernel, options.scaling),
                      select_bandwidth(x, options.kernel, options.scaling),
                      options);
}

/// FFT-KDE mutual information between a 0/1 outcome and a continuous feature:
///   sum_c pi_c * integral f(x|c) log(f(x|c) / f_mix(x)) dx,
/// with one KDE per class on a shared grid.
inline MiEstimate mi_fftkde_bc(std::span<const double> y01, std::span<const double> x,
                               const FftKdeOptions& options = {}) {
  detail::require_pairs(y01, x, "mi_fftkde_bc");
  const detail::ClassSplit split = detail::split_by_class(y01, x, "mi_fftkde_bc");
  Bandwidth h[2];
  for (int c = 0; c < 2; ++c) {
    if (!detail::has_two_distinct(split.members[c])) {
      fail_data("mi_fftkde_bc: feature is constant within a class");
    }
    h[c] = select_bandwidth(split.members[c], options.kernel, options.scaling);
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const Grid1D grid = detail::cushioned_grid(*lo, *hi, options.kernel, std::max(h[0].value, h[1].value),
                                             options.grid_size_1d);
  const double n = static_cast<double>(x.size());
  const double pi[2] = {static_cast<double>(split.members[0].size()) / n,
                        static_cast<double>(split.members[1].size()) / n};
  const DensityGrid1D f[2] = {kde_1d_on_grid(split.members[0], options.kernel, h[0], grid),
                              kde_1d_on_grid(split.members[1], options.kernel, h[1], grid)};
  double raw = 0.0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double mix = pi[0] * f[0].density[i] + pi[1] * f[1].density[i];
    for (int c = 0; c < 2; ++c) {
      const double fc = f[c].density[i];
      if (fc <= detail::kDensityFloor) continue;
      raw += pi[c] * fc * std::log(fc / mix);
    }
  }
  return make_estimate(raw * grid.spacing, Method::fftkde, OutcomeKind::binary);
}

// ---------------------------------------------------------------------------
// Binning

/// Birge-Rozenholc penalty D - 1 + (ln D)^2.5.
inline double bin_count_penalty(std::size_t bins) {
  const double d = static_cast<double>(bins);
  return d - 1.0 + std::pow(std::log(d), 2.5);
}

/// Number of equal-width bins on [min, max] maximizing the penalized
/// histogram log-likelihood sum_j n_j ln(D n_j / n) - pen(D) over
/// D in [1, ceil(n / ln n)]; ties go to the smaller D.
inline std::size_t select_bin_count(std::span<const double> x) {
  if (x.size() < 4) fail_data("select_bin_count: need at least 4 observations");
  detail::require_finite_data(x);
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, width = *hi_it - *lo_it;
  if (!(width > 0.0)) return 1;
  const double n = static_cast<double>(x.size());
  const auto max_bins = static_cast<std::size_t>(std::ceil(n / std::log(n)));

  std::vector<double> unit(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) unit[i] = (x[i] - lo) / width;

  std::size_t best = 1;
  double best_score = 0.0;  // L(1) - pen(1) = 0
  std::vector<std::uint32_t> counts;
  for (std::size_t d = 2; d <= max_bins; ++d) {
    counts.assign(d, 0);
    const double scale = static_cast<double>(d);
    for (double u : unit) {
      auto b = static_cast<std::size_t>(u * scale);
      if (b >= d) b = d - 1;
      ++counts[b];
    }
    double likelihood = 0.0;
    for (std::uint32_t c : counts) {
      if (c == 0) continue;
      const double nj = static_cast<double>(c);
      likelihood += nj * std::log(scale * nj / n);
    }
    const double score = likelihood - bin_count_penalty(d);
    if (score > best_score) {
      best_score = score;
      best = d;
    }
  }
  return best;
}

namespace detail {

inline std::vector<std::uint32_t> bin_indices(std::span<const double> x, std::size_t bins) {
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, width = *hi_it - *lo_it;
  std::vector<std::uint32_t> out(x.size(), 0);
  if (!(width > 0.0) || bins <= 1) return out;
  const double scale = static_cast<double>(bins);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto b = static_cast<std::size_t>((x[i] - lo) / width * scale);
    if (b >= bins) b = bins - 1;
    out[i] = static_cast<std::uint32_t>(b);
  }
  return out;
}

}  // namespace detail

struct BinningOptions {
  std::optional<std::size_t> bins;  // overrides select_bin_count on every continuous axis
};

/// Plug-in MI after equal-width discretization. A binary outcome keeps its two
/// classes; a continuous one is binned like the feature.
inline MiEstimate mi_binning(std::span<const double> y, std::span<const double> x, OutcomeKind kind,
                             const BinningOptions& options = {}) {
  detail::require_pairs(y, x, "mi_binning");
  if (x.size() < 4) fail_data("mi_binning: need at least 4 observations");
  if (!detail::has_two_distinct(x)) fail_data("mi_binning: feature is constant");
  if (options.bins && *options.bins == 0) fail_usage("mi_binning: bin override must be positive");
  const std::size_t bins_x = options.bins ? *options.bins : select_bin_count(x);
  const auto x_bins = detail::bin_indices(x, bins_x);
  if (kind == OutcomeKind::binary) {
    (void)detail::split_by_class(y, x, "mi_binning");
    ContingencyTable table(2, bins_x);
    for (std::size_t i = 0; i < y.size(); ++i) table.add(y[i] == 1.0 ? 1 : 0, x_bins[i]);
    return mi_discrete(table, Method::binning, OutcomeKind::binary);
  }
  if (!detail::has_two_distinct(y)) fail_data("mi_binning: outcome is constant");
  const std::size_t bins_y = options.bins ? *options.bins : select_bin_count(y);
  const auto y_bins = detail::bin_indices(y, bins_y);
  ContingencyTable table(bins_y, bins_x);
  for (std::size_t i = 0; i < y.size(); ++i) table.add(y_bins[i], x_bins[i]);
  return mi_discrete(table, Method::binning, OutcomeKind::continuous);
}

// ---------------------------------------------------------------------------
// Nearest neighbours

struct NeighborQuery {
  std::size_t k = 3;
  std::uint64_t jitter_seed = 0;  // seeds the tie-breaking perturbation
};

inline constexpr double kJitterScale = 1e-10;

namespace detail {

inline double population_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= n;
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  return std::sqrt(ss / n);
}

// Rescales `own` to unit standard deviation and perturbs each value by
// kJitterScale * u, with u in [-1, 1) a hash of (seed, own value, partner
// value, rank among identical pairs). The perturbation depends only on the
// multiset of pairs, never on row order or on which axis is which.
inline std::vector<double> standardize_and_jitter(std::span<const double> own,
                                                  std::span<const double> partner,
                                                  std::uint64_t seed) {
  const double sd = population_sd(own);
  if (!(sd > 0.0)) fail_data("knn: axis has fewer than two distinct values");
  const std::size_t n = own.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) { return std::pair{bits_of(own[i]), bits_of(partner[i])}; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<double> out(n);
  std::uint64_t rank = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t i = order[p];
    rank = (p > 0 && key(order[p - 1]) == key(i)) ? rank + 1 : 0;
    const auto [own_bits, partner_bits] = key(i);
    const double u = unit_symmetric(derive_seed(seed, {own_bits, partner_bits, rank}));
    out[i] = own[i] / sd + kJitterScale * u;
  }
  return out;
}

// Number of values in `sorted` strictly within `radius` of `center`.
// Membership uses |v - center| < radius exactly; the binary search only
// brackets the range and the edges are then corrected element by element.
inline std::size_t count_within(std::span<const double> sorted, double center, double radius) {
  auto inside = [&](double v) { return std::abs(v - center) < radius; };
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), center - radius);
  auto hi = std::upper_bound(lo, sorted.end(), center + radius);
  while (lo != sorted.begin() && inside(*std::prev(lo))) --lo;
  while (lo != hi && !inside(*lo)) ++lo;
  while (hi != sorted.end() && inside(*hi)) ++hi;
  while (hi != lo && !inside(*std::prev(hi))) --hi;
  return static_cast<std::size_t>(hi - lo);
}

// Max-norm distance from each point to its k-th nearest other point.
inline std::vector<double> kth_neighbor_distances(std::span<const double> xs, std::span<const double> ys,
                                                  std::size_t k) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] < xs[b] || (xs[a] == xs[b] && a < b);
  });
  std::vector<double> sx(n), sy(n);
  for (std::size_t p = 0; p < n; ++p) {
    sx[p] = xs[order[p]];
    sy[p] = ys[order[p]];
  }
  std::vector<double> out(n);
  std::priority_queue<double> heap;
  for (std::size_t p = 0; p < n; ++p) {
    heap = {};
    std::size_t left = p, right = p + 1;
    while (true) {
      const double dl = left > 0 ? sx[p] - sx[left - 1] : INFINITY;
      const double dr = right < n ? sx[right] - sx[p] : INFINITY;
      const double dx = std::min(dl, dr);
      if (!std::isfinite(dx)) break;
      if (heap.size() == k && dx >= heap.top()) break;
      std::size_t q;
      if (dl <= dr) {
        q = --left;
      } else {
        q = right++;
      }
      const double d = std::max(dx, std::abs(sy[q] - sy[p]));
      if (heap.size() < k) {
        heap.push(d);
      } else if (d < heap.top()) {
        heap.pop();
        heap.push(d);
      }
    }
    out[order[p]] = heap.top();
  }
  return out;
}

// Distance from each point of a sorted 1D sample to its k-th nearest other point.
inline std::vector<double> kth_neighbor_distances_1d(std::span<const double> sorted, std::size_t k) {
  const std::size_t n = sorted.size();
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t left = p, right = p + 1, taken = 0;
    double d = 0.0;
    while (taken < k) {
      const double dl = left > 0 ? sorted[p] - sorted[left - 1] : INFINITY;
      const double dr = right < n ? sorted[right] - sorted[p] : INFINITY;
      if (dl <= dr) {
        d = dl;
        --left;
      } else {
        d = dr;
        ++right;
      }
      ++taken;
    }
    out[p] = d;
  }
  return out;
}

inline double digamma(double v) { return boost::math::digamma(v); }

}  // namespace detail

/// Kraskov-Stoegbauer-Grassberger estimator (first algorithm):
///   psi(k) + psi(n) - mean_i [psi(n_x(i) + 1) + psi(n_y(i) + 1)],
/// with max-norm neighbourhoods on unit-variance, tie-jittered axes.
inline MiEstimate mi_knn_cc(std::span<const double> y, std::span<const double> x, const NeighborQuery& q = {}) {
  detail::require_pairs(y, x, "mi_knn_cc");
  const std::size_t n = y.size();
  if (q.k < 1 || q.k >= n) fail_usage("mi_knn_cc: need 1 <= k < n");
  const std::vector<double> ys = detail::standardize_and_jitter(y, x, q.jitter_seed);
  const std::vector<double> xs = detail::standardize_and_jitter(x, y, q.jitter_seed);
  const std::vector<double> radius = detail::kth_neighbor_distances(xs, ys, q.k);

  std::vector<double> sorted_x = xs, sorted_y = ys;
  std::sort(sorted_x.begin(), sorted_x.end());
  std::sort(sorted_y.begin(), sorted_y.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Counts include the point itself, i.e. they equal n_x(i) + 1.
    const auto nx = detail::count_within(sorted_x, xs[i], radius[i]);
    const auto ny = detail::count_within(sorted_y, ys[i], radius[i]);
    acc += detail::digamma(static_cast<double>(std::max<std::size_t>(nx, 1))) +
           detail::digamma(static_cast<double>(std::max<std::size_t>(ny, 1)));
  }
  const double raw = detail::digamma(static_cast<double>(q.k)) + detail::digamma(static_cast<double>(n)) -
                     acc / static_cast<double>(n);
  return make_estimate(raw, Method::knn, OutcomeKind::continuous);
}

/// Nearest-neighbour MI between a 0/1 outcome and a continuous feature:
///   psi(n) - mean psi(n_c) + psi(k) - mean psi(m_i),
/// where the radius of point i is its k-th neighbour distance within its own
/// class and m_i counts all points (self included) strictly inside it.
inline MiEstimate mi_knn_bc(std::span<const double> y01, std::span<const double> x, const NeighborQuery& q = {}) {
  detail::require_pairs(y01, x, "mi_knn_bc");
  const detail::ClassSplit split = detail::split_by_class(y01, x, "mi_knn_bc");
  if (q.k < 1) fail_usage("mi_knn_bc: k must be positive");
  for (const auto& members : split.members) {
    if (members.size() <= q.k) fail_data("mi_knn_bc: a class has k or fewer members");
  }
  const std::size_t n = x.size();
  const std::vector<double> xs = detail::standardize_and_jitter(x, y01, q.jitter_seed);
  std::vector<double> sorted_all = xs;
  std::sort(sorted_all.begin(), sorted_all.end());

  double class_term = 0.0, count_term = 0.0;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (y01[i] == static_cast<double>(c)) members.push_back(xs[i]);
    }
    std::sort(members.begin(), members.end());
    const std::vector<double> radius = detail::kth_neighbor_distances_1d(members, q.k);
    const double psi_class = detail::digamma(static_cast<double>(members.size()));
    for (std::size_t p = 0; p < members.size(); ++p) {
      const auto m = detail::count_within(sorted_all, members[p], radius[p]);
      count_term += detail::digamma(static_cast<double>(std::max<std::size_t>(m, 1)));
      class_term += psi_class;
    }
  }
  const double dn = static_cast<double>(n);
  const double raw = detail::digamma(dn) - class_term / dn + detail::digamma(static_cast<double>(q.k)) -
                     count_term / dn;
  return make_estimate(raw, Method::knn, OutcomeKind::binary);
}

// ---------------------------------------------------------------------------
// Pearson

/// |sum(y~ x~)| / n with population standardization; a correlation, not nats.
inline MiEstimate pearson_abs(std::span<const double> y, std::span<const double> x,
                              OutcomeKind kind = OutcomeKind::continuous) {
  detail::require_pairs(y, x, "pearson_abs");
  if (y.size() < 2) fail_data("pearson_abs: need at least 2 observations");
  const double n = static_cast<double>(y.size());
  double my = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mx += x[i];
  }
  my /= n;
  mx /= n;
  double syy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dy = y[i] - my, dx = x[i] - mx;
    syy += dy * dy;
    sxx += dx * dx;
    sxy += dy * dx;
  }
  if (!(syy > 0.0) || !(sxx > 0.0)) fail_data("pearson_abs: constant input");
  const double r = std::abs(sxy) / std::sqrt(syy * sxx);
  return make_estimate(std::min(1.0, r), Method::pearson, kind);
}

}  // namespace hdmi

#endif  // HDMI_MI_HPP
