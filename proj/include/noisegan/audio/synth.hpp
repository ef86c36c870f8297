#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "noisegan/audio/clip.hpp"

namespace noisegan::synth {

// Voiced, speech-like test signal: a harmonic source with a drifting pitch,
// two moving formant resonances, syllable-rate amplitude modulation and short
// pauses. Used wherever licensed speech corpora are unavailable.
inline AudioClip speech_like(double seconds, int sample_rate, std::uint64_t seed, double base_f0 = 140.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  const double nyquist = sample_rate / 2.0;
  const double f0_rate = 0.5 + u(rng);
  const double syl_rate = 3.0 + 2.0 * u(rng);
  const double f1_base = 400.0 + 300.0 * u(rng);
  const double f2_base = 1200.0 + 800.0 * u(rng);
  const double ph1 = 2 * std::numbers::pi * u(rng);
  const double ph2 = 2 * std::numbers::pi * u(rng);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<double> x(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double f0 = base_f0 * (1.0 + 0.15 * std::sin(2 * std::numbers::pi * f0_rate * t + ph1));
    phase += 2 * std::numbers::pi * f0 / sample_rate;
    const double f1 = f1_base * (1.0 + 0.3 * std::sin(2 * std::numbers::pi * syl_rate * 0.5 * t + ph2));
    const double f2 = f2_base * (1.0 + 0.2 * std::cos(2 * std::numbers::pi * syl_rate * 0.3 * t + ph1));
    double v = 0.0;
    for (int h = 1; h * f0 < nyquist * 0.9; ++h) {
      const double fh = h * f0;
      const double g = std::exp(-std::pow((fh - f1) / 150.0, 2)) + 0.6 * std::exp(-std::pow((fh - f2) / 250.0, 2)) +
                       0.02;
      v += g * std::sin(h * phase) / std::sqrt(static_cast<double>(h));
    }
    double env = 0.5 * (1.0 - std::cos(2 * std::numbers::pi * syl_rate * t));
    if (std::sin(2 * std::numbers::pi * 0.4 * t + ph2) > 0.85) env *= 0.02;  // pauses
    x[i] = 0.1 * env * v + 1e-4 * noise(rng);
  }
  return AudioClip{std::move(x), sample_rate, "", ""};
}

// Sum of a few steady sinusoids whose set changes every `segment_seconds`.
inline AudioClip sine_mixture(double seconds, int sample_rate, std::uint64_t seed, double segment_seconds = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(200.0, 3000.0);
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2 * std::numbers::pi);
  std::uniform_int_distribution<int> count(2, 5);
  const auto n = static_cast<std::size_t>(seconds * sample_rate);
  const auto seg = static_cast<std::size_t>(segment_seconds * sample_rate);

  std::vector<double> x(n, 0.0);
  for (std::size_t start = 0; start < n; start += seg) {
    const int k = count(rng);
    std::vector<double> f(k), a(k), p(k);
    for (int j = 0; j < k; ++j) {
      f[j] = freq(rng);
      a[j] = amp(rng);
      p[j] = ph(rng);
    }
    for (std::size_t i = start; i < std::min(n, start + seg); ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      double v = 0.0;
      for (int j = 0; j < k; ++j) v += a[j] * std::sin(2 * std::numbers::pi * f[j] * t + p[j]);
      x[i] = 0.1 * v;
    }
  }
  return AudioClip{std::move(x), sample_rate, "", ""};
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double stddev = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, stddev);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

// Slowly fluctuating, band-shaped noise (helicopter-like rotor modulation).
inline std::vector<double> modulated_noise(std::size_t n, int sample_rate, std::uint64_t seed, double mod_hz = 12.0) {
  auto x = white_noise(n, seed);
  double lp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lp = 0.9 * lp + 0.1 * x[i];
    const double t = static_cast<double>(i) / sample_rate;
    x[i] = lp * (0.6 + 0.4 * std::sin(2 * std::numbers::pi * mod_hz * t));
  }
  return x;
}

}  // namespace noisegan::synth
