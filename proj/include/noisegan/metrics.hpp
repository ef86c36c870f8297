#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "noisegan/audio/clip.hpp"
#include "noisegan/audio/stft.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan::metrics {

struct MetricConfig {
  int lsd_n_fft = 512;
  int lsd_hop = 128;
  double lsd_epsilon = 1e-9;
  std::vector<int> mssl_fft_sizes{2048, 1024, 512, 256, 128, 64};
  double mssl_hop_ratio = 0.25;
  double mssl_alpha = 1.0;
  double mssl_epsilon = 1e-7;
};

inline void validate(const MetricConfig& cfg) {
  if (cfg.mssl_fft_sizes.empty()) throw ConfigError("mssl_fft_sizes must not be empty");
  for (int s : cfg.mssl_fft_sizes) {
    if (s < 2 || (s & (s - 1)) != 0) throw ConfigError("MSSL FFT sizes must be powers of two");
  }
  if (cfg.mssl_alpha < 0) throw ConfigError("mssl_alpha must be >= 0");
  if (!(cfg.mssl_hop_ratio > 0 && cfg.mssl_hop_ratio <= 1)) throw ConfigError("mssl_hop_ratio must be in (0, 1]");
  if (cfg.lsd_n_fft < 2 || cfg.lsd_hop < 1) throw ConfigError("invalid LSD analysis parameters");
}

// Lower is better for both.
struct Scores {
  double lsd = 0.0;
  double mssl = 0.0;
};

namespace detail {

inline std::pair<std::span<const double>, std::span<const double>> overlap(const AudioClip& a, const AudioClip& b) {
  if (a.sample_rate != b.sample_rate) throw DataError("metric inputs have different sample rates");
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) throw DataError("metric inputs have no overlapping samples");
  return {std::span(a.samples).first(n), std::span(b.samples).first(n)};
}

inline Matrix<double> magnitude(std::span<const double> x, int n_fft, int hop) {
  return stft(std::vector<double>(x.begin(), x.end()), StftParams{n_fft, hop, n_fft, "hann", true}).magnitude;
}

}  // namespace detail

// Mean over frames of the RMS (over bins) of the dB difference of magnitudes.
inline double lsd(const AudioClip& reference, const AudioClip& candidate, const MetricConfig& cfg = {}) {
  auto [r, c] = detail::overlap(reference, candidate);
  if (r.size() < static_cast<std::size_t>(cfg.lsd_n_fft)) {
    throw DataError("clip shorter than the LSD analysis window");
  }
  const auto R = detail::magnitude(r, cfg.lsd_n_fft, cfg.lsd_hop);
  const auto C = detail::magnitude(c, cfg.lsd_n_fft, cfg.lsd_hop);
  double total = 0.0;
  for (std::size_t f = 0; f < R.cols(); ++f) {
    double acc = 0.0;
    for (std::size_t k = 0; k < R.rows(); ++k) {
      const double d = 20.0 * std::log10((R(k, f) + cfg.lsd_epsilon) / (C(k, f) + cfg.lsd_epsilon));
      acc += d * d;
    }
    total += std::sqrt(acc / static_cast<double>(R.rows()));
  }
  return total / static_cast<double>(R.cols());
}

// Sum over FFT sizes of mean |S_r - S_c| + alpha * mean |log(S_r + eps) - log(S_c + eps)|.
inline double mssl(const AudioClip& reference, const AudioClip& candidate, const MetricConfig& cfg = {}) {
  validate(cfg);
  auto [r, c] = detail::overlap(reference, candidate);
  const int largest = *std::max_element(cfg.mssl_fft_sizes.begin(), cfg.mssl_fft_sizes.end());
  if (r.size() < static_cast<std::size_t>(largest)) {
    throw DataError("clip of " + std::to_string(r.size()) + " samples is shorter than the largest MSSL FFT size (" +
                    std::to_string(largest) + ")");
  }
  double total = 0.0;
  for (int size : cfg.mssl_fft_sizes) {
    const int hop = std::max(1, static_cast<int>(size * cfg.mssl_hop_ratio));
    const auto R = detail::magnitude(r, size, hop);
    const auto C = detail::magnitude(c, size, hop);
    double lin = 0.0, log_term = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) {
      const double a = R.data()[i], b = C.data()[i];
      lin += std::abs(a - b);
      log_term += std::abs(std::log(a + cfg.mssl_epsilon) - std::log(b + cfg.mssl_epsilon));
    }
    const auto n = static_cast<double>(R.size());
    total += lin / n + cfg.mssl_alpha * log_term / n;
  }
  return total;
}

inline Scores score(const AudioClip& reference, const AudioClip& candidate, const MetricConfig& cfg = {}) {
  return {lsd(reference, candidate, cfg), mssl(reference, candidate, cfg)};
}

inline Scores mean_scores(std::span<const Scores> per_clip) {
  if (per_clip.empty()) throw DataError("cannot average metrics over an empty set");
  Scores out;
  for (const auto& s : per_clip) {
    out.lsd += s.lsd;
    out.mssl += s.mssl;
  }
  out.lsd /= static_cast<double>(per_clip.size());
  out.mssl /= static_cast<double>(per_clip.size());
  return out;
}

// Arithmetic means of LSD and MSSL over (reference, candidate) pairs.
inline Scores mean_metrics(std::span<const std::pair<AudioClip, AudioClip>> pairs, const MetricConfig& cfg = {}) {
  if (pairs.empty()) throw DataError("mean_metrics needs at least one clip pair");
  std::vector<Scores> each;
  each.reserve(pairs.size());
  for (const auto& [ref, cand] : pairs) each.push_back(score(ref, cand, cfg));
  return mean_scores(each);
}

// Scale-invariant SNR in dB of `estimate` against `reference`.
inline double si_snr_db(std::span<const double> reference, std::span<const double> estimate) {
  const std::size_t n = std::min(reference.size(), estimate.size());
  if (n == 0) throw DataError("si_snr on empty signals");
  double mr = 0, me = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mr += reference[i];
    me += estimate[i];
  }
  mr /= n;
  me /= n;
  double dot = 0, rr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += (estimate[i] - me) * (reference[i] - mr);
    rr += (reference[i] - mr) * (reference[i] - mr);
  }
  if (rr == 0) throw DegenerateInput("si_snr reference is constant");
  const double alpha = dot / rr;
  double target = 0, noise = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = alpha * (reference[i] - mr);
    const double e = (estimate[i] - me) - t;
    target += t * t;
    noise += e * e;
  }
  if (noise == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(target / noise);
}

}  // namespace noisegan::metrics
