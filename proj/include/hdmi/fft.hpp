#ifndef HDMI_FFT_HPP
#define HDMI_FFT_HPP

// Discrete Fourier transforms on equispaced grids.
//
// Normalization: the forward transform is unnormalized,
//   X[k] = sum_j x[j] exp(-2 pi i j k / N),
// and the inverse carries the full 1/N factor, so inverse(forward(x)) == x.
// Power-of-two lengths use an iterative radix-2 kernel; every other length
// goes through Bluestein's chirp-z reformulation onto a power-of-two size,
// so the result is the exact DFT of the input (no implicit zero padding).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdmi/error.hpp"

namespace hdmi {

using Complex = std::complex<double>;
using ComplexSequence = std::vector<Complex>;

enum class Direction { forward, inverse };

/// Equispaced 1D grid; node i sits at origin + i * spacing.
struct Grid1D {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 2;

  double at(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double last() const { return at(count - 1); }

  void validate() const {
    if (!(spacing > 0.0) || !std::isfinite(spacing) || !std::isfinite(origin)) {
      fail_usage("grid spacing must be positive and finite");
    }
    if (count < 2) fail_usage("grid needs at least 2 nodes");
  }
};

struct Grid2D {
  Grid1D axis_y;
  Grid1D axis_x;
};

/// Dense row-major 2D array; rows index the y axis, columns the x axis.
template <typename T>
struct Array2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Array2D() = default;
  Array2D(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<T> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const T> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

inline constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline constexpr std::size_t next_power_of_two(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

namespace detail {

/// Twiddles and bit-reversal permutation for one power-of-two length.
class Radix2Plan {
 public:
  explicit Radix2Plan(std::size_t n) : n_(n), reversed_(n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      reversed_[i] = r;
    }
    // Stage tables laid out back to back: stage with half-length h starts at h - 1.
    cos_.resize(n > 1 ? n - 1 : 0);
    sin_.resize(cos_.size());
    for (std::size_t half = 1; half < n; half <<= 1) {
      for (std::size_t j = 0; j < half; ++j) {
        const Complex w = std::polar(1.0, -std::numbers::pi * static_cast<double>(j) /
                                              static_cast<double>(half));
        cos_[half - 1 + j] = w.real();
        sin_[half - 1 + j] = w.imag();
      }
    }
  }

  std::size_t size() const { return n_; }

  // Unnormalized in-place transform; `inverse` conjugates the twiddles only.
  void execute(std::span<Complex> a, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < reversed_[i]) std::swap(a[i], a[reversed_[i]]);
    }
    auto* d = reinterpret_cast<double*>(a.data());
    const double sign = inverse ? -1.0 : 1.0;
    std::size_t first_general = 1;
    if (n_ >= 4) {
      // The first two stages have twiddles in {1, -i}; fused, multiplication free.
      for (std::size_t start = 0; start < n_; start += 4) {
        double* p = d + 2 * start;
        const double ar = p[0] + p[2], ai = p[1] + p[3];
        const double br = p[0] - p[2], bi = p[1] - p[3];
        const double cr = p[4] + p[6], ci = p[5] + p[7];
        const double dr = p[4] - p[6], di = p[5] - p[7];
        // d * (-i) forward, d * (+i) inverse
        const double er = sign * di, ei = -sign * dr;
        p[0] = ar + cr;
        p[1] = ai + ci;
        p[4] = ar - cr;
        p[5] = ai - ci;
        p[2] = br + er;
        p[3] = bi + ei;
        p[6] = br - er;
        p[7] = bi - ei;
      }
      first_general = 4;
    }
    for (std::size_t half = first_general; half < n_; half <<= 1) {
      const double* wc = cos_.data() + half - 1;
      const double* ws = sin_.data() + half - 1;
      for (std::size_t start = 0; start < n_; start += 2 * half) {
        double* lo = d + 2 * start;
        double* hi = d + 2 * (start + half);
        for (std::size_t j = 0; j < half; ++j) {
          const double c = wc[j], s = sign * ws[j];
          const double hr = hi[2 * j], hm = hi[2 * j + 1];
          const double vr = hr * c - hm * s;
          const double vi = hr * s + hm * c;
          const double ur = lo[2 * j], ui = lo[2 * j + 1];
          lo[2 * j] = ur + vr;
          lo[2 * j + 1] = ui + vi;
          hi[2 * j] = ur - vr;
          hi[2 * j + 1] = ui - vi;
        }
      }
    }
  }

  // Same transform on split real/imaginary arrays; this layout lets the
  // butterfly loop vectorize.
  void execute_split(double* __restrict re, double* __restrict im, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < reversed_[i]) {
        std::swap(re[i], re[reversed_[i]]);
        std::swap(im[i], im[reversed_[i]]);
      }
    }
    if (n_ < 2) return;
    for (std::size_t start = 0; start < n_; start += 2) {
      const double ar = re[start], br = re[start + 1];
      re[start] = ar + br;
      re[start + 1] = ar - br;
      const double ai = im[start], bi = im[start + 1];
      im[start] = ai + bi;
      im[start + 1] = ai - bi;
    }
    const double sign = inverse ? -1.0 : 1.0;
    for (std::size_t half = 2; half < n_; half <<= 1) {
      const double* wc = cos_.data() + half - 1;
      const double* ws = sin_.data() + half - 1;
      for (std::size_t start = 0; start < n_; start += 2 * half) {
        double* lr = re + start;
        double* li = im + start;
        double* hr = re + start + half;
        double* hi = im + start + half;
        for (std::size_t j = 0; j < half; ++j) {
          const double c = wc[j], s = sign * ws[j];
          const double vr = hr[j] * c - hi[j] * s;
          const double vi = hr[j] * s + hi[j] * c;
          const double ur = lr[j], ui = li[j];
          lr[j] = ur + vr;
          li[j] = ui + vi;
          hr[j] = ur - vr;
          hi[j] = ui - vi;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> reversed_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Chirp tables for Bluestein's algorithm at one arbitrary length.
struct BluesteinPlan {
  std::size_t n;
  std::size_t m;
  std::vector<Complex> chirp;          // exp(-i pi k^2 / n)
  std::vector<Complex> chirp_spectrum; // FFT of the conjugate chirp, wrapped to length m
};

inline const Radix2Plan& radix2_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Radix2Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Radix2Plan>(n);
  return *slot;
}

inline const BluesteinPlan& bluestein_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<BluesteinPlan>> cache;
  auto& slot = cache[n];
  if (!slot) {
    auto plan = std::make_unique<BluesteinPlan>();
    plan->n = n;
    plan->m = next_power_of_two(2 * n - 1);
    plan->chirp.resize(n);
    const std::size_t two_n = 2 * n;
    for (std::size_t k = 0; k < n; ++k) {
      // k^2 mod 2n keeps the phase argument small and exact.
      const std::size_t k2 = static_cast<std::size_t>(
          (static_cast<unsigned __int128>(k) * k) % two_n);
      plan->chirp[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(k2) /
                                           static_cast<double>(n));
    }
    plan->chirp_spectrum.assign(plan->m, Complex{});
    plan->chirp_spectrum[0] = std::conj(plan->chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
      plan->chirp_spectrum[k] = std::conj(plan->chirp[k]);
      plan->chirp_spectrum[plan->m - k] = std::conj(plan->chirp[k]);
    }
    radix2_plan(plan->m).execute(plan->chirp_spectrum, false);
    slot = std::move(plan);
  }
  return *slot;
}

// Unnormalized forward or inverse DFT of any length, in place.
inline void transform_in_place(std::span<Complex> a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (is_power_of_two(n)) {
    radix2_plan(n).execute(a, inverse);
    return;
  }
  if (inverse) {
    for (auto& v : a) v = std::conj(v);
    transform_in_place(a, false);
    for (auto& v : a) v = std::conj(v);
    return;
  }
  const BluesteinPlan& plan = bluestein_plan(n);
  std::vector<Complex> work(plan.m);
  for (std::size_t k = 0; k < n; ++k) work[k] = a[k] * plan.chirp[k];
  const Radix2Plan& big = radix2_plan(plan.m);
  big.execute(work, false);
  for (std::size_t k = 0; k < plan.m; ++k) work[k] *= plan.chirp_spectrum[k];
  big.execute(work, true);
  const double scale = 1.0 / static_cast<double>(plan.m);
  for (std::size_t k = 0; k < n; ++k) a[k] = work[k] * scale * plan.chirp[k];
}

inline void require_finite(std::span<const Complex> signal) {
  for (const Complex& v : signal) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      fail_data("transform input contains a non-finite value");
    }
  }
}

inline void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) fail_data("convolution input contains a non-finite value");
  }
}

inline void require_same_spacing(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || std::abs(a - b) > 1e-12 * std::max(a, b)) {
    fail_usage("kernel and values must be sampled with the same positive spacing");
  }
}

}  // namespace detail

/// Fast DFT of any length >= 1.
inline ComplexSequence fft_1d(std::span<const Complex> signal, Direction direction) {
  if (signal.empty()) fail_usage("fft_1d: empty input");
  detail::require_finite(signal);
  ComplexSequence out(signal.begin(), signal.end());
  const bool inverse = direction == Direction::inverse;
  detail::transform_in_place(out, inverse);
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
  }
  return out;
}

inline constexpr std::size_t kDirectDftMaxLength = 4096;

/// O(N^2) matrix-product DFT with the same normalization as fft_1d.
/// Intended as a reference for testing the fast path.
inline ComplexSequence dft_direct(std::span<const Complex> signal, Direction direction) {
  const std::size_t n = signal.size();
  if (n == 0) fail_usage("dft_direct: empty input");
  if (n > kDirectDftMaxLength) fail_usage("dft_direct: length exceeds 4096");
  detail::require_finite(signal);
  const bool inverse = direction == Direction::inverse;
  const double sign = inverse ? 1.0 : -1.0;
  ComplexSequence out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{};
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t phase = static_cast<std::size_t>(
          (static_cast<unsigned __int128>(j) * k) % n);
      acc += signal[j] * std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                             static_cast<double>(phase) / static_cast<double>(n));
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

/// Separable 2D DFT: every row, then every column. Inverse scales by 1/(rows*cols).
inline Array2D<Complex> fft_2d(const Array2D<Complex>& values, Direction direction) {
  if (values.rows < 2 || values.cols < 2) fail_usage("fft_2d: both dimensions must be >= 2");
  if (values.data.size() != values.rows * values.cols) fail_usage("fft_2d: non-rectangular input");
  detail::require_finite(values.data);
  const bool inverse = direction == Direction::inverse;
  Array2D<Complex> out = values;
  for (std::size_t r = 0; r < out.rows; ++r) detail::transform_in_place(out.row(r), inverse);
  std::vector<Complex> column(out.rows);
  for (std::size_t c = 0; c < out.cols; ++c) {
    for (std::size_t r = 0; r < out.rows; ++r) column[r] = out(r, c);
    detail::transform_in_place(column, inverse);
    for (std::size_t r = 0; r < out.rows; ++r) out(r, c) = column[r];
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(out.rows * out.cols);
    for (auto& v : out.data) v *= scale;
  }
  return out;
}

inline Array2D<Complex> fft_2d(const Array2D<double>& values, Direction direction) {
  Array2D<Complex> complex_values(values.rows, values.cols);
  if (values.data.size() != values.rows * values.cols) fail_usage("fft_2d: non-rectangular input");
  for (std::size_t i = 0; i < values.data.size(); ++i) complex_values.data[i] = values.data[i];
  return fft_2d(complex_values, direction);
}

/// Linear (non-circular) convolution approximating the continuous integral:
///   out[j] = spacing * sum_i values[i] * kernel[j - i + kernel_center],
/// for j in [0, values.size()). `kernel_center` is the kernel index that
/// represents offset zero. Inputs are zero-padded to the next power of two
/// >= N + M - 1, so no wrap-around occurs.
inline std::vector<double> convolve_grid(std::span<const double> values, double spacing,
                                         std::span<const double> kernel, double kernel_spacing,
                                         std::size_t kernel_center = 0) {
  if (values.empty() || kernel.empty()) fail_usage("convolve_grid: empty input");
  if (kernel_center >= kernel.size()) fail_usage("convolve_grid: kernel center out of range");
  detail::require_same_spacing(spacing, kernel_spacing);
  detail::require_finite(values);
  detail::require_finite(kernel);

  const std::size_t m = next_power_of_two(values.size() + kernel.size() - 1);
  std::vector<Complex> a(m), b(m);
  for (std::size_t i = 0; i < values.size(); ++i) a[i] = values[i];
  for (std::size_t i = 0; i < kernel.size(); ++i) b[i] = kernel[i];
  detail::transform_in_place(a, false);
  detail::transform_in_place(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  detail::transform_in_place(a, true);

  const double scale = spacing / static_cast<double>(m);
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = a[j + kernel_center].real() * scale;
  return out;
}

/// 2D counterpart of convolve_grid through fft_2d. Spacing pairs are (y, x).
inline Array2D<double> convolve_grid(const Array2D<double>& values, std::array<double, 2> spacing,
                                     const Array2D<double>& kernel,
                                     std::array<double, 2> kernel_spacing,
                                     std::array<std::size_t, 2> kernel_center = {0, 0}) {
  if (values.rows == 0 || values.cols == 0 || kernel.rows == 0 || kernel.cols == 0) {
    fail_usage("convolve_grid: empty input");
  }
  if (kernel_center[0] >= kernel.rows || kernel_center[1] >= kernel.cols) {
    fail_usage("convolve_grid: kernel center out of range");
  }
  detail::require_same_spacing(spacing[0], kernel_spacing[0]);
  detail::require_same_spacing(spacing[1], kernel_spacing[1]);
  detail::require_finite(values.data);
  detail::require_finite(kernel.data);

  const std::size_t mr = std::max<std::size_t>(2, next_power_of_two(values.rows + kernel.rows - 1));
  const std::size_t mc = std::max<std::size_t>(2, next_power_of_two(values.cols + kernel.cols - 1));
  Array2D<Complex> a(mr, mc), b(mr, mc);
  for (std::size_t r = 0; r < values.rows; ++r)
    for (std::size_t c = 0; c < values.cols; ++c) a(r, c) = values(r, c);
  for (std::size_t r = 0; r < kernel.rows; ++r)
    for (std::size_t c = 0; c < kernel.cols; ++c) b(r, c) = kernel(r, c);
  Array2D<Complex> fa = fft_2d(a, Direction::forward);
  const Array2D<Complex> fb = fft_2d(b, Direction::forward);
  for (std::size_t i = 0; i < fa.data.size(); ++i) fa.data[i] *= fb.data[i];
  const Array2D<Complex> prod = fft_2d(fa, Direction::inverse);

  const double scale = spacing[0] * spacing[1];
  Array2D<double> out(values.rows, values.cols);
  for (std::size_t r = 0; r < values.rows; ++r)
    for (std::size_t c = 0; c < values.cols; ++c)
      out(r, c) = prod(r + kernel_center[0], c + kernel_center[1]).real() * scale;
  return out;
}

namespace detail {

// Convolves `lines` strided real sequences of length `length` with one real
// kernel, two lines per complex transform (real and imaginary channels).
inline void convolve_lines(std::span<double> data, std::size_t length, std::size_t element_stride,
                           std::size_t lines, std::size_t line_stride,
                           std::span<const double> kernel, std::size_t kernel_center,
                           double spacing) {
  const std::size_t m = next_power_of_two(length + kernel.size() - 1);
  const Radix2Plan& plan = radix2_plan(m);
  std::vector<double> spec_re(m, 0.0), spec_im(m, 0.0);
  std::copy(kernel.begin(), kernel.end(), spec_re.begin());
  plan.execute_split(spec_re.data(), spec_im.data(), false);
  const double scale = spacing / static_cast<double>(m);

  std::vector<double> re(m), im(m);
  for (std::size_t line = 0; line < lines; line += 2) {
    const bool pair = line + 1 < lines;
    double* first = data.data() + line * line_stride;
    double* second = pair ? first + line_stride : nullptr;
    bool empty = true;
    for (std::size_t i = 0; i < length && empty; ++i) {
      empty = first[i * element_stride] == 0.0 && (!pair || second[i * element_stride] == 0.0);
    }
    if (empty) continue;  // convolution of zero lines is zero
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (std::size_t i = 0; i < length; ++i) {
      re[i] = first[i * element_stride];
      if (pair) im[i] = second[i * element_stride];
    }
    plan.execute_split(re.data(), im.data(), false);
    for (std::size_t i = 0; i < m; ++i) {
      const double r = re[i] * spec_re[i] - im[i] * spec_im[i];
      const double q = re[i] * spec_im[i] + im[i] * spec_re[i];
      re[i] = r;
      im[i] = q;
    }
    plan.execute_split(re.data(), im.data(), true);
    for (std::size_t j = 0; j < length; ++j) {
      first[j * element_stride] = re[j + kernel_center] * scale;
      if (pair) second[j * element_stride] = im[j + kernel_center] * scale;
    }
  }
}

}  // namespace detail

/// Convolution with a separable (product) kernel k_y(v) * k_x(u). Equivalent to
/// convolve_grid with the outer-product kernel, but transforms only the occupied
/// lines along each axis.
inline Array2D<double> convolve_separable(const Array2D<double>& values, std::array<double, 2> spacing,
                                          std::span<const double> kernel_y, std::size_t center_y,
                                          std::span<const double> kernel_x, std::size_t center_x) {
  if (values.rows == 0 || values.cols == 0 || kernel_y.empty() || kernel_x.empty()) {
    fail_usage("convolve_separable: empty input");
  }
  if (center_y >= kernel_y.size() || center_x >= kernel_x.size()) {
    fail_usage("convolve_separable: kernel center out of range");
  }
  Array2D<double> out = values;
  // Rows (x direction), then columns (y direction).
  detail::convolve_lines(out.data, out.cols, 1, out.rows, out.cols, kernel_x, center_x, spacing[1]);
  detail::convolve_lines(out.data, out.rows, out.cols, out.cols, 1, kernel_y, center_y, spacing[0]);
  return out;
}

/// Unnormalized type-II DCT: X[k] = 2 * sum_j x[j] cos(pi k (2j + 1) / (2N)).
inline std::vector<double> dct2(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) fail_usage("dct2: empty input");
  if (n == 1) return {2.0 * values[0]};
  // Even/odd reordering turns the DCT into a single length-N complex DFT.
  std::vector<Complex> v(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t j = 0; j < half; ++j) v[j] = values[2 * j];
  for (std::size_t j = 0; j < n / 2; ++j) v[n - 1 - j] = values[2 * j + 1];
  detail::transform_in_place(v, false);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex w = std::polar(1.0, -std::numbers::pi * static_cast<double>(k) /
                                          (2.0 * static_cast<double>(n)));
    out[k] = 2.0 * (w * v[k]).real();
  }
  return out;
}

}  // namespace hdmi

#endif  // HDMI_FFT_HPP
