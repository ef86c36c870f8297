#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "noisegan/audio/clip.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan {

// Band-limited resampling with a Kaiser-windowed sinc kernel. The kernel is
// tabulated at `kTableDensity` points per zero crossing and linearly
// interpolated.
inline std::vector<double> resample(const std::vector<double>& x, int from_rate, int to_rate,
                                    int zero_crossings = 24, double kaiser_beta = 8.0) {
  if (from_rate <= 0 || to_rate <= 0) throw ConfigError("resample: rates must be positive");
  if (from_rate == to_rate || x.empty()) return x;

  constexpr int kTableDensity = 512;
  std::vector<double> table(static_cast<std::size_t>(zero_crossings * kTableDensity + 2));
  const double i0_beta = std::cyl_bessel_i(0.0, kaiser_beta);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double z = static_cast<double>(i) / kTableDensity;  // in zero crossings
    const double u = std::min(1.0, z / zero_crossings);
    const double window = std::cyl_bessel_i(0.0, kaiser_beta * std::sqrt(1.0 - u * u)) / i0_beta;
    const double arg = std::numbers::pi * z;
    table[i] = (i == 0 ? 1.0 : std::sin(arg) / arg) * window;
  }
  table.back() = 0.0;

  const double ratio = static_cast<double>(to_rate) / from_rate;
  const double cutoff = std::min(1.0, ratio) * 0.97;
  const double half_width = zero_crossings / cutoff;  // input samples
  const auto out_len = static_cast<std::size_t>(std::floor(x.size() * ratio));
  const auto n_in = static_cast<long long>(x.size());

  std::vector<double> y(out_len);
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = n / ratio;
    const auto lo = std::max(static_cast<long long>(std::ceil(t - half_width)), 0LL);
    const auto hi = std::min(static_cast<long long>(std::floor(t + half_width)), n_in - 1);
    double acc = 0.0;
    for (long long k = lo; k <= hi; ++k) {
      const double pos = std::abs(t - static_cast<double>(k)) * cutoff * kTableDensity;
      const auto idx = static_cast<std::size_t>(pos);
      if (idx + 1 >= table.size()) continue;
      const double frac = pos - static_cast<double>(idx);
      acc += x[static_cast<std::size_t>(k)] * (table[idx] + frac * (table[idx + 1] - table[idx]));
    }
    y[n] = acc * cutoff;
  }
  return y;
}

inline AudioClip resample(const AudioClip& clip, int to_rate) {
  AudioClip out = clip.with_samples(resample(clip.samples, clip.sample_rate, to_rate));
  out.sample_rate = to_rate;
  return out;
}

}  // namespace noisegan
