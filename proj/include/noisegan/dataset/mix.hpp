#pragma once

#include <cmath>
#include <limits>
#include <random>

#include "noisegan/audio/clip.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan::dataset {

struct MixResult {
  AudioClip mixed;
  double noise_gain = 0.0;      // g applied to the noise segment before back-off
  double backoff = 1.0;         // overall scale applied to avoid clipping
  std::size_t noise_offset = 0;
};

// clean + g * noise_segment with g chosen so the clean-to-noise power ratio is
// snr_db. The noise is read cyclically from a random offset. If the sum would
// clip, the whole mix is scaled down, which leaves the SNR unchanged.
template <typename Rng>
MixResult mix_noise_detailed(const AudioClip& clean, const AudioClip& noise, double snr_db, Rng& rng) {
  if (noise.samples.empty() || rms(noise.samples) == 0.0) {
    throw DegenerateInput("noise clip '" + noise.clip_id + "' is silent");
  }
  if (noise.sample_rate != clean.sample_rate) throw DataError("clean and noise sample rates differ");
  std::uniform_int_distribution<std::size_t> offset_dist(0, noise.size() - 1);
  const std::size_t offset = offset_dist(rng);

  std::vector<double> segment(clean.size());
  for (std::size_t i = 0; i < segment.size(); ++i) segment[i] = noise.samples[(offset + i) % noise.size()];

  const double pc = std::pow(rms(clean.samples), 2);
  const double pn = std::pow(rms(segment), 2);
  if (pn == 0.0) throw DegenerateInput("selected noise segment is silent");
  const double g = std::isinf(snr_db) && snr_db > 0 ? 0.0 : std::sqrt(pc / (pn * std::pow(10.0, snr_db / 10.0)));

  std::vector<double> out(clean.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = clean.samples[i] + g * segment[i];
  const double p = peak(out);
  double backoff = 1.0;
  if (p > 1.0) {
    backoff = 1.0 / p;
    for (double& v : out) v *= backoff;
  }
  return {clean.with_samples(std::move(out)), g, backoff, offset};
}

template <typename Rng>
AudioClip mix_noise(const AudioClip& clean, const AudioClip& noise, double snr_db, Rng& rng) {
  return mix_noise_detailed(clean, noise, snr_db, rng).mixed;
}

}  // namespace noisegan::dataset
