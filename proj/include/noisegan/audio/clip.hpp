#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "noisegan/core/error.hpp"

namespace noisegan {

// Mono waveform in [-1, 1] plus where it came from.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;
  std::string speaker_id;
  std::string clip_id;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_seconds() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }

  // Same identity, new samples.
  AudioClip with_samples(std::vector<double> s) const {
    AudioClip out{std::move(s), sample_rate, speaker_id, clip_id};
    return out;
  }
};

inline void validate(const AudioClip& clip) {
  if (clip.sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  for (double s : clip.samples) {
    if (!std::isfinite(s)) throw NumericalError("clip '" + clip.clip_id + "' has non-finite samples");
  }
}

inline double rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  long double acc = 0;
  for (double v : x) acc += static_cast<long double>(v) * v;
  return std::sqrt(static_cast<double>(acc / x.size()));
}

inline double rms_dbfs(const std::vector<double>& x) { return 20.0 * std::log10(rms(x)); }

inline double peak(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

}  // namespace noisegan
