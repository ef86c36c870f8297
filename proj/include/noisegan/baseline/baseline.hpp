#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "noisegan/audio/clip.hpp"
#include "noisegan/baseline/g726.hpp"
#include "noisegan/core/error.hpp"
#include "noisegan/dataset/codec.hpp"
#include "noisegan/dataset/mix.hpp"

// Non-learned reference augmenter: aggregated noise added to clean speech,
// followed by G.726 coding.
namespace noisegan::baseline {

struct BaselineConfig {
  g726::Rate rate = g726::Rate::k32;
  double crossfade_seconds = 0.02;
  double snr_min_db = 0.0;
  double snr_max_db = 10.0;
};

// Concatenates the clips in a seeded random order, joining neighbours with an
// equal-power (sin/cos) crossfade, cycling until target_length samples exist.
template <typename Rng>
AudioClip aggregate_noise(std::span<const AudioClip> clips, std::size_t target_length, std::size_t crossfade,
                          Rng& rng) {
  if (clips.empty()) throw DataError("aggregate_noise needs at least one noise clip");
  const int rate = clips.front().sample_rate;
  for (const auto& c : clips) {
    if (c.samples.empty()) throw DataError("noise clip '" + c.clip_id + "' is empty");
    if (c.sample_rate != rate) throw DataError("noise clips have mixed sample rates");
  }

  std::vector<double> out;
  out.reserve(target_length + crossfade);
  std::vector<std::size_t> order(clips.size());
  while (out.size() < target_length) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const auto& src = clips[idx].samples;
      const std::size_t xf = out.empty() ? 0 : std::min({crossfade, src.size() / 2, out.size()});
      const std::size_t base = out.size() - xf;
      for (std::size_t i = 0; i < xf; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(xf);
        const double fade_in = std::sin(0.5 * std::numbers::pi * t);
        const double fade_out = std::cos(0.5 * std::numbers::pi * t);
        out[base + i] = out[base + i] * fade_out + src[i] * fade_in;
      }
      out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(xf), src.end());
      if (out.size() >= target_length) break;
    }
  }
  out.resize(target_length);
  AudioClip agg{std::move(out), rate, "", "aggregated-noise"};
  return agg;
}

// Resample to 8 kHz, G.726 encode and decode, resample back. Output length
// equals input length.
inline AudioClip g726_roundtrip(const AudioClip& clip, g726::Rate rate) {
  return dataset::apply_codec(clip, dataset::G726Client(rate));
}

template <typename Rng>
AudioClip baseline_simulate(const AudioClip& clean, std::span<const AudioClip> noise_clips, double snr_db,
                            const BaselineConfig& cfg, Rng& rng) {
  const auto crossfade = static_cast<std::size_t>(cfg.crossfade_seconds * clean.sample_rate);
  const AudioClip noise = aggregate_noise(noise_clips, clean.size(), crossfade, rng);
  const AudioClip mixed = dataset::mix_noise(clean, noise, snr_db, rng);
  return g726_roundtrip(mixed, cfg.rate);
}

}  // namespace noisegan::baseline
