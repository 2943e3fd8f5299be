#ifndef HDMI_KDE_HPP
#define HDMI_KDE_HPP

// Kernel density estimation on equispaced grids. Samples are linearly binned
// onto the grid, then convolved with the sampled kernel through the FFT.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "hdmi/error.hpp"
#include "hdmi/fft.hpp"

namespace hdmi {

enum class KernelKind { epanechnikov, gaussian };

struct Kernel {
  KernelKind kind = KernelKind::epanechnikov;

  double operator()(double u) const {
    if (kind == KernelKind::epanechnikov) {
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    }
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }

  // Half-width (in bandwidth units) beyond which the kernel is treated as zero.
  double support_radius() const { return kind == KernelKind::epanechnikov ? 1.0 : 4.0; }
};

enum class BandwidthRule { fixed, silverman, isj, isj_fallback };

struct Bandwidth {
  double value = 1.0;
  BandwidthRule rule = BandwidthRule::fixed;
};

inline Bandwidth make_bandwidth(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) fail_usage("bandwidth must be positive and finite");
  return {value, BandwidthRule::fixed};
}

/// Ratio of the Epanechnikov to the Gaussian canonical bandwidth,
/// (R(K) / mu2(K)^2)^(1/5) of each kernel. Multiplying a Gaussian bandwidth by
/// this gives an Epanechnikov bandwidth with the same amount of smoothing.
inline const double kEpanechnikovPerGaussian =
    std::pow(15.0, 0.2) / std::pow(1.0 / (2.0 * std::sqrt(std::numbers::pi)), 0.2);

/// Converts a bandwidth expressed for the Gaussian kernel to `kernel`.
inline Bandwidth equivalent_bandwidth(Bandwidth gaussian, Kernel kernel) {
  if (kernel.kind == KernelKind::epanechnikov) gaussian.value *= kEpanechnikovPerGaussian;
  return gaussian;
}

struct DensityGrid1D {
  Grid1D grid;
  std::vector<double> density;

  double integral() const {
    double s = 0.0;
    for (double v : density) s += v;
    return s * grid.spacing;
  }
};

struct DensityGrid2D {
  Grid2D grid;
  Array2D<double> density;  // rows follow axis_y, columns axis_x

  double integral() const {
    double s = 0.0;
    for (double v : density.data) s += v;
    return s * grid.axis_y.spacing * grid.axis_x.spacing;
  }
};

namespace detail {

inline void require_finite_data(std::span<const double> data) {
  for (double v : data) {
    if (!std::isfinite(v)) fail_data("density input contains a non-finite value");
  }
}

inline bool has_two_distinct(std::span<const double> data) {
  if (data.empty()) return false;
  for (double v : data) {
    if (v != data.front()) return true;
  }
  return false;
}

inline std::size_t count_distinct(std::span<const double> data) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// Type-7 (linear interpolation) quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// Rule-of-thumb bandwidth 0.9 * min(sd, IQR / 1.34) * n^(-1/5). The sample
/// standard deviation uses n - 1; when the IQR vanishes the sd is used alone.
inline Bandwidth bandwidth_silverman(std::span<const double> data) {
  detail::require_finite_data(data);
  if (!detail::has_two_distinct(data)) fail_data("bandwidth_silverman: data has zero spread");
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : data) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = detail::quantile_sorted(sorted, 0.75) - detail::quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  return {0.9 * spread * std::pow(n, -0.2), BandwidthRule::silverman};
}

namespace detail {

// Linear binning without range checks; positions are clamped onto the grid.
inline void bin_linear(std::span<const double> data, const Grid1D& grid, double mass,
                       std::span<double> out) {
  const auto last = static_cast<double>(grid.count - 1);
  for (double x : data) {
    double t = (x - grid.origin) / grid.spacing;
    t = std::clamp(t, 0.0, last);
    auto i = static_cast<std::size_t>(t);
    if (i >= grid.count - 1) i = grid.count - 2;
    const double frac = t - static_cast<double>(i);
    out[i] += mass * (1.0 - frac);
    out[i + 1] += mass * frac;
  }
}

// Botev's fixed-point map t - xi * gamma^[l](t) for the ISJ selector.
class IsjFixedPoint {
 public:
  IsjFixedPoint(std::span<const double> coefficients_sq, double distinct_count)
      : a2_(coefficients_sq.begin(), coefficients_sq.end()), n_(distinct_count) {
    i_sq_.resize(a2_.size());
    for (std::size_t k = 0; k < a2_.size(); ++k) {
      const double idx = static_cast<double>(k + 1);
      i_sq_[k] = idx * idx;
    }
    // weighted_[s][k] = (k+1)^(2s) * a2[k] for s = 2..7
    for (int s = 2; s <= 7; ++s) {
      auto& row = weighted_[static_cast<std::size_t>(s)];
      row.resize(a2_.size());
      for (std::size_t k = 0; k < a2_.size(); ++k) {
        double p = 1.0;
        for (int j = 0; j < s; ++j) p *= i_sq_[k];
        row[k] = p * a2_[k];
      }
    }
  }

  double operator()(double t) const {
    constexpr int ell = 7;
    double f = 2.0 * std::pow(std::numbers::pi, 2 * ell) * functional(ell, t);
    if (!(f > 0.0)) return -1.0;
    for (int s = ell - 1; s >= 2; --s) {
      double odd_product = 1.0;
      for (int j = 1; j <= 2 * s - 1; j += 2) odd_product *= j;
      const double k0 = odd_product / std::sqrt(2.0 * std::numbers::pi);
      const double c = (1.0 + std::pow(0.5, s + 0.5)) / 3.0;
      const double time = std::pow(2.0 * c * k0 / (n_ * f), 2.0 / (3.0 + 2.0 * s));
      f = 2.0 * std::pow(std::numbers::pi, 2 * s) * functional(s, time);
      if (!(f > 0.0)) return -1.0;
    }
    const double t_opt = std::pow(2.0 * n_ * std::sqrt(std::numbers::pi) * f, -0.4);
    return t - t_opt;
  }

 private:
  // sum_k (k^2)^power a2[k] exp(-k^2 pi^2 t), with exp(-k^2 pi^2 t) = q^(k^2)
  // advanced by the recurrence q^((k+1)^2) = q^(k^2) q^(2k+1).
  double functional(int power, double t) const {
    const double q = std::exp(-std::numbers::pi * std::numbers::pi * t);
    const double q2 = q * q;
    const auto& row = weighted_[static_cast<std::size_t>(power)];
    double term = q;  // q^(1^2)
    double step = q2 * q;  // q^(2*1+1)
    double sum = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (term < 1e-280) break;
      sum += row[k] * term;
      term *= step;
      step *= q2;
    }
    return sum;
  }

  std::vector<double> a2_;
  std::vector<double> i_sq_;
  std::array<std::vector<double>, 8> weighted_;
  double n_;
};

}  // namespace detail

inline constexpr std::size_t kDefaultIsjGridSize = 1024;

/// Improved Sheather-Jones plug-in bandwidth (Gaussian-kernel scale), found
/// as the root of Botev's fixed-point equation on the DCT of the binned data.
/// Falls back to bandwidth_silverman, with rule isj_fallback, whenever no
/// root can be bracketed.
inline Bandwidth bandwidth_isj(std::span<const double> data,
                               std::size_t grid_size = kDefaultIsjGridSize) {
  detail::require_finite_data(data);
  if (!detail::has_two_distinct(data)) fail_data("bandwidth_isj: data has zero spread");
  if (!is_power_of_two(grid_size) || grid_size < 256) {
    fail_usage("bandwidth_isj: grid size must be a power of two >= 256");
  }
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const double range = *hi_it - *lo_it;
  const double lo = *lo_it - range / 2.0;
  const double hi = *hi_it + range / 2.0;
  const double span_width = hi - lo;
  const Grid1D grid{lo, span_width / static_cast<double>(grid_size - 1), grid_size};

  std::vector<double> hist(grid_size, 0.0);
  detail::bin_linear(data, grid, 1.0 / static_cast<double>(data.size()), hist);
  const std::vector<double> a = dct2(hist);
  std::vector<double> a2(grid_size - 1);
  for (std::size_t k = 1; k < grid_size; ++k) a2[k - 1] = 0.25 * a[k] * a[k];

  const auto distinct = static_cast<double>(detail::count_distinct(data));
  const detail::IsjFixedPoint fixed_point(a2, distinct);

  const double n_clamped = std::clamp(distinct, 50.0, 1050.0);
  double tol = 1e-12 + 0.01 * (n_clamped - 50.0) / 1000.0;
  const double at_zero = fixed_point(0.0);
  while (tol < 1.0) {
    const double at_tol = fixed_point(tol);
    if (std::isfinite(at_zero) && std::isfinite(at_tol) && at_zero < 0.0 && at_tol > 0.0) {
      std::uintmax_t max_iter = 200;
      const auto [a_root, b_root] = boost::math::tools::toms748_solve(
          fixed_point, 0.0, tol, at_zero, at_tol, boost::math::tools::eps_tolerance<double>(48),
          max_iter);
      const double t_star = 0.5 * (a_root + b_root);
      const double h = std::sqrt(t_star) * span_width;
      if (t_star > 0.0 && std::isfinite(h) && h > 0.0) return {h, BandwidthRule::isj};
      break;
    }
    tol *= 2.0;
  }
  Bandwidth fallback = bandwidth_silverman(data);
  fallback.rule = BandwidthRule::isj_fallback;
  return fallback;
}

/// Spreads each point's mass (1/N, or its weight) onto the two flanking grid
/// nodes in proportion to proximity.
inline std::vector<double> linear_binning(std::span<const double> data, const Grid1D& grid,
                                          std::optional<std::span<const double>> weights = {}) {
  grid.validate();
  detail::require_finite_data(data);
  if (data.empty()) fail_data("linear_binning: no data");
  if (weights && weights->size() != data.size()) fail_usage("linear_binning: weight count mismatch");
  const double tolerance = 1e-9 * grid.spacing;
  std::vector<double> out(grid.count, 0.0);
  const double default_mass = 1.0 / static_cast<double>(data.size());
  const auto last = static_cast<double>(grid.count - 1);
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double x = data[j];
    if (x < grid.origin - tolerance || x > grid.last() + tolerance) {
      fail_data("linear_binning: data point outside the grid range");
    }
    const double mass = weights ? (*weights)[j] : default_mass;
    double t = std::clamp((x - grid.origin) / grid.spacing, 0.0, last);
    auto i = static_cast<std::size_t>(t);
    if (i >= grid.count - 1) i = grid.count - 2;
    const double frac = t - static_cast<double>(i);
    out[i] += mass * (1.0 - frac);
    out[i + 1] += mass * frac;
  }
  return out;
}

/// Bilinear binning of paired samples onto a 2D grid; each pair carries 1/N.
inline Array2D<double> linear_binning_2d(std::span<const double> y, std::span<const double> x,
                                         const Grid2D& grid) {
  grid.axis_y.validate();
  grid.axis_x.validate();
  if (y.size() != x.size()) fail_usage("linear_binning_2d: length mismatch");
  if (y.empty()) fail_data("linear_binning_2d: no data");
  Array2D<double> out(grid.axis_y.count, grid.axis_x.count, 0.0);
  const double mass = 1.0 / static_cast<double>(y.size());
  const auto last_y = static_cast<double>(grid.axis_y.count - 1);
  const auto last_x = static_cast<double>(grid.axis_x.count - 1);
  constexpr double tol = 1e-9;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double ty_raw = (y[j] - grid.axis_y.origin) / grid.axis_y.spacing;
    const double tx_raw = (x[j] - grid.axis_x.origin) / grid.axis_x.spacing;
    if (!(ty_raw >= -tol && ty_raw <= last_y + tol && tx_raw >= -tol &&
          tx_raw <= last_x + tol)) {
      fail_data("linear_binning_2d: data point outside the grid range");
    }
    const double ty = std::clamp(ty_raw, 0.0, last_y);
    const double tx = std::clamp(tx_raw, 0.0, last_x);
    auto iy = static_cast<std::size_t>(ty);
    auto ix = static_cast<std::size_t>(tx);
    if (iy >= grid.axis_y.count - 1) iy = grid.axis_y.count - 2;
    if (ix >= grid.axis_x.count - 1) ix = grid.axis_x.count - 2;
    const double fy = ty - static_cast<double>(iy);
    const double fx = tx - static_cast<double>(ix);
    out(iy, ix) += mass * (1.0 - fy) * (1.0 - fx);
    out(iy, ix + 1) += mass * (1.0 - fy) * fx;
    out(iy + 1, ix) += mass * fy * (1.0 - fx);
    out(iy + 1, ix + 1) += mass * fy * fx;
  }
  return out;
}

namespace detail {

// Kernel K_h sampled at offsets (i - center) * spacing, rescaled so that its
// Riemann sum is exactly one.
struct SampledKernel {
  std::vector<double> values;
  std::size_t center = 0;
};

inline SampledKernel sample_kernel(Kernel kernel, double bandwidth, double spacing,
                                   std::size_t max_half_width) {
  const double reach = kernel.support_radius() * bandwidth / spacing;
  const auto half = static_cast<std::size_t>(
      std::min(std::floor(reach), static_cast<double>(max_half_width)));
  SampledKernel out;
  out.center = half;
  out.values.resize(2 * half + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double offset = (static_cast<double>(i) - static_cast<double>(half)) * spacing;
    out.values[i] = kernel(offset / bandwidth) / bandwidth;
    sum += out.values[i];
  }
  if (!(sum > 0.0)) {
    // Bandwidth far below the grid spacing: the kernel is a point mass.
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.values[half] = 1.0 / spacing;
    return out;
  }
  const double scale = 1.0 / (sum * spacing);
  for (double& v : out.values) v *= scale;
  return out;
}

// Grid over [min - r h, max + r h] with r the kernel's support radius.
inline Grid1D cushioned_grid(double lo, double hi, Kernel kernel, double bandwidth,
                             std::size_t count) {
  const double cushion = kernel.support_radius() * bandwidth;
  const double origin = lo - cushion;
  return Grid1D{origin, (hi + cushion - origin) / static_cast<double>(count - 1), count};
}

inline void clamp_and_normalize(std::span<double> density, double cell_area) {
  double sum = 0.0;
  for (double& v : density) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (!(sum > 0.0)) fail_numeric("density estimate has no mass");
  const double scale = 1.0 / (sum * cell_area);
  for (double& v : density) v *= scale;
}

}  // namespace detail

inline constexpr std::size_t kDefaultGridSize1D = 1024;
inline constexpr std::size_t kDefaultGridSize2D = 256;

/// KDE of `data` on a caller-supplied grid that must cover the data.
inline DensityGrid1D kde_1d_on_grid(std::span<const double> data, Kernel kernel,
                                    Bandwidth bandwidth, const Grid1D& grid) {
  if (!(bandwidth.value > 0.0) || !std::isfinite(bandwidth.value)) {
    fail_usage("kde: bandwidth must be positive and finite");
  }
  std::vector<double> mass = linear_binning(data, grid);
  for (double& v : mass) v /= grid.spacing;
  const auto k = detail::sample_kernel(kernel, bandwidth.value, grid.spacing, grid.count - 1);
  DensityGrid1D out{grid, convolve_grid(mass, grid.spacing, k.values, grid.spacing, k.center)};
  detail::clamp_and_normalize(out.density, grid.spacing);
  return out;
}

/// 1D FFT KDE on a grid spanning the data plus one kernel support radius each side.
inline DensityGrid1D kde_1d(std::span<const double> data, Kernel kernel, Bandwidth bandwidth,
                            std::size_t grid_size = kDefaultGridSize1D) {
  if (!is_power_of_two(grid_size) || grid_size < 2) fail_usage("kde_1d: grid size must be a power of two");
  detail::require_finite_data(data);
  if (!detail::has_two_distinct(data)) fail_data("kde_1d: need at least two distinct values");
  if (!(bandwidth.value > 0.0) || !std::isfinite(bandwidth.value)) {
    fail_usage("kde_1d: bandwidth must be positive and finite");
  }
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const Grid1D grid = detail::cushioned_grid(*lo, *hi, kernel, bandwidth.value, grid_size);
  return kde_1d_on_grid(data, kernel, bandwidth, grid);
}

/// Joint KDE with the product kernel K(u / h_y) K(v / h_x) / (h_y h_x).
inline DensityGrid2D kde_2d(std::span<const double> data_y, std::span<const double> data_x,
                            Kernel kernel, Bandwidth bandwidth_y, Bandwidth bandwidth_x,
                            std::size_t grid_size = kDefaultGridSize2D) {
  if (data_y.size() != data_x.size()) fail_usage("kde_2d: length mismatch");
  if (!is_power_of_two(grid_size) || grid_size < 2) fail_usage("kde_2d: grid size must be a power of two");
  detail::require_finite_data(data_y);
  detail::require_finite_data(data_x);
  if (!detail::has_two_distinct(data_y) || !detail::has_two_distinct(data_x)) {
    fail_data("kde_2d: each axis needs at least two distinct values");
  }
  for (double h : {bandwidth_y.value, bandwidth_x.value}) {
    if (!(h > 0.0) || !std::isfinite(h)) fail_usage("kde_2d: bandwidth must be positive and finite");
  }
  const auto [ylo, yhi] = std::minmax_element(data_y.begin(), data_y.end());
  const auto [xlo, xhi] = std::minmax_element(data_x.begin(), data_x.end());
  const Grid2D grid{detail::cushioned_grid(*ylo, *yhi, kernel, bandwidth_y.value, grid_size),
                    detail::cushioned_grid(*xlo, *xhi, kernel, bandwidth_x.value, grid_size)};

  Array2D<double> mass = linear_binning_2d(data_y, data_x, grid);
  const double cell = grid.axis_y.spacing * grid.axis_x.spacing;
  for (double& v : mass.data) v /= cell;
  const auto ky = detail::sample_kernel(kernel, bandwidth_y.value, grid.axis_y.spacing, grid_size - 1);
  const auto kx = detail::sample_kernel(kernel, bandwidth_x.value, grid.axis_x.spacing, grid_size - 1);
  DensityGrid2D out{grid, convolve_separable(mass, {grid.axis_y.spacing, grid.axis_x.spacing},
                                             ky.values, ky.center, kx.values, kx.center)};
  detail::clamp_and_normalize(out.density.data, cell);
  return out;
}

}  // namespace hdmi

#endif  // HDMI_KDE_HPP
