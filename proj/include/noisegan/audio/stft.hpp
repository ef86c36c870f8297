#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "noisegan/core/error.hpp"
#include "noisegan/core/matrix.hpp"

namespace noisegan {

struct StftParams {
  int n_fft = 510;
  int hop = 128;
  int window_length = 510;
  std::string window = "hann";
  bool center = true;

  int n_freq() const noexcept { return n_fft / 2 + 1; }
  bool operator==(const StftParams&) const = default;
};

inline void validate(const StftParams& p) {
  if (p.n_fft <= 1 || p.hop <= 0 || p.window_length <= 0) throw ConfigError("STFT sizes must be positive");
  if (p.window_length > p.n_fft) throw ConfigError("n_fft must be >= window_length");
  if (p.window != "hann" && p.window != "rect") throw ConfigError("unsupported window type: " + p.window);
}

// Magnitude and phase of one STFT. phase lies in (-pi, pi].
struct SpectrogramPair {
  Matrix<double> magnitude;
  Matrix<double> phase;
  StftParams params;

  std::size_t n_freq() const noexcept { return magnitude.rows(); }
  std::size_t n_frames() const noexcept { return magnitude.cols(); }
};

namespace detail {

// FFTW planning is not thread-safe; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan p) const noexcept {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

// One real FFT size with its scratch buffers.
class RealFft {
 public:
  explicit RealFft(int n)
      : n_(n),
        real_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        spec_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    std::lock_guard lock(fftw_planner_mutex());
    forward_.reset(fftw_plan_dft_r2c_1d(n, real_.get(), spec_.get(), FFTW_ESTIMATE));
    inverse_.reset(fftw_plan_dft_c2r_1d(n, spec_.get(), real_.get(), FFTW_ESTIMATE));
  }

  double* real() noexcept { return real_.get(); }
  fftw_complex* spectrum() noexcept { return spec_.get(); }
  void forward() { fftw_execute(forward_.get()); }
  // Unnormalized: the result is n times the inverse DFT.
  void inverse() { fftw_execute(inverse_.get()); }
  int size() const noexcept { return n_; }

 private:
  int n_;
  RealBuffer real_;
  ComplexBuffer spec_;
  Plan forward_;
  Plan inverse_;
};

// Reflect-pad index (numpy "reflect" mode, applied repeatedly for short inputs).
inline std::size_t reflect_index(long long i, long long n) {
  if (n == 1) return 0;
  const long long period = 2 * (n - 1);
  long long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - m);
}

}  // namespace detail

// Periodic window of window_length, zero-padded (centered) to n_fft.
inline std::vector<double> analysis_window(const StftParams& p) {
  std::vector<double> w(static_cast<std::size_t>(p.n_fft), 0.0);
  const int offset = (p.n_fft - p.window_length) / 2;
  for (int i = 0; i < p.window_length; ++i) {
    const double v = p.window == "hann" ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / p.window_length) : 1.0;
    w[static_cast<std::size_t>(offset + i)] = v;
  }
  return w;
}

inline std::size_t stft_frame_count(std::size_t n_samples, const StftParams& p) {
  const std::size_t pad = p.center ? static_cast<std::size_t>(p.n_fft / 2) : 0;
  const std::size_t padded = n_samples + 2 * pad;
  if (padded < static_cast<std::size_t>(p.n_fft)) return 0;
  return 1 + (padded - static_cast<std::size_t>(p.n_fft)) / static_cast<std::size_t>(p.hop);
}

inline SpectrogramPair stft(const std::vector<double>& x, const StftParams& p) {
  validate(p);
  if (x.size() < static_cast<std::size_t>(p.window_length)) {
    throw TooShort("signal of " + std::to_string(x.size()) + " samples is shorter than one window (" +
                   std::to_string(p.window_length) + ")");
  }
  const auto window = analysis_window(p);
  const std::size_t n_frames = stft_frame_count(x.size(), p);
  const auto n_freq = static_cast<std::size_t>(p.n_freq());
  const long long pad = p.center ? p.n_fft / 2 : 0;
  const auto n = static_cast<long long>(x.size());

  SpectrogramPair out{Matrix<double>(n_freq, n_frames), Matrix<double>(n_freq, n_frames), p};
  detail::RealFft fft(p.n_fft);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const long long start = static_cast<long long>(f) * p.hop - pad;
    for (int i = 0; i < p.n_fft; ++i) {
      const long long idx = start + i;
      const double s = p.center ? x[detail::reflect_index(idx, n)] : x[static_cast<std::size_t>(idx)];
      fft.real()[i] = s * window[static_cast<std::size_t>(i)];
    }
    fft.forward();
    for (std::size_t k = 0; k < n_freq; ++k) {
      const double re = fft.spectrum()[k][0];
      const double im = fft.spectrum()[k][1];
      out.magnitude(k, f) = std::hypot(re, im);
      double ph = std::atan2(im, re);
      if (ph <= -std::numbers::pi) ph = std::numbers::pi;
      out.phase(k, f) = ph;
    }
  }
  return out;
}

// Weighted overlap-add inverse. Uses `spec.phase` unchanged and returns exactly
// `out_length` samples.
inline std::vector<double> istft(const SpectrogramPair& spec, const StftParams& p, std::size_t out_length) {
  validate(p);
  if (!spec.magnitude.same_shape(spec.phase)) {
    throw ShapeError("magnitude " + shape_string(spec.magnitude.rows(), spec.magnitude.cols()) +
                     " and phase " + shape_string(spec.phase.rows(), spec.phase.cols()) + " differ");
  }
  if (spec.magnitude.rows() != static_cast<std::size_t>(p.n_freq())) {
    throw ShapeError("spectrogram has " + std::to_string(spec.magnitude.rows()) + " bins, config expects " +
                     std::to_string(p.n_freq()));
  }
  const std::size_t n_frames = spec.magnitude.cols();
  const auto n_freq = static_cast<std::size_t>(p.n_freq());
  const auto window = analysis_window(p);
  const std::size_t pad = p.center ? static_cast<std::size_t>(p.n_fft / 2) : 0;
  const std::size_t total = n_frames == 0 ? 0 : static_cast<std::size_t>(p.n_fft) + (n_frames - 1) * p.hop;

  std::vector<double> acc(total, 0.0);
  std::vector<double> norm(total, 0.0);
  detail::RealFft fft(p.n_fft);
  const double scale = 1.0 / p.n_fft;
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (std::size_t k = 0; k < n_freq; ++k) {
      const double m = spec.magnitude(k, f);
      const double ph = spec.phase(k, f);
      fft.spectrum()[k][0] = m * std::cos(ph);
      fft.spectrum()[k][1] = m * std::sin(ph);
    }
    // c2r needs real DC (and Nyquist for even sizes)
    fft.spectrum()[0][1] = 0.0;
    if (p.n_fft % 2 == 0) fft.spectrum()[n_freq - 1][1] = 0.0;
    fft.inverse();
    const std::size_t start = f * static_cast<std::size_t>(p.hop);
    for (int i = 0; i < p.n_fft; ++i) {
      const double w = window[static_cast<std::size_t>(i)];
      acc[start + i] += fft.real()[i] * scale * w;
      norm[start + i] += w * w;
    }
  }

  std::vector<double> y(out_length, 0.0);
  for (std::size_t i = 0; i < out_length; ++i) {
    const std::size_t j = i + pad;
    if (j >= total) break;
    y[i] = norm[j] > 1e-10 ? acc[j] / norm[j] : 0.0;
  }
  return y;
}

}  // namespace noisegan
