#pragma once

#include <cmath>

#include "noisegan/audio/clip.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan {

// Scales the clip by one positive gain so its RMS equals target_rms_dbfs.
inline AudioClip normalize_loudness(const AudioClip& clip, double target_rms_dbfs) {
  const double current = rms(clip.samples);
  if (!(current > 0.0)) throw DegenerateInput("cannot normalize loudness of a silent clip '" + clip.clip_id + "'");
  const double gain = std::pow(10.0, target_rms_dbfs / 20.0) / current;
  AudioClip out = clip;
  if (std::abs(gain - 1.0) < 1e-12) return out;
  for (double& s : out.samples) s *= gain;
  return out;
}

}  // namespace noisegan
