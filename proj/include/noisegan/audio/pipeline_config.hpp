#pragma once

#include <string>

#include "noisegan/audio/stft.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan {

// Parameters of the clean-audio -> model-space -> audio pipeline.
struct PipelineConfig {
  int sample_rate = 16000;
  int n_fft = 510;
  int hop_length = 128;
  int window_length = 510;
  int component_width = 256;
  double target_rms_dbfs = -20.0;
  double db_floor = 80.0;  // dynamic range kept below the per-clip maximum
  double epsilon = 1e-9;
  // How 0..255 components are presented to networks. "pm1" maps v -> v / 127.5 - 1.
  std::string model_input_range = "pm1";

  StftParams stft() const { return StftParams{n_fft, hop_length, window_length, "hann", true}; }
  int n_freq() const noexcept { return n_fft / 2 + 1; }
  bool operator==(const PipelineConfig&) const = default;
};

inline void validate(const PipelineConfig& cfg) {
  if (cfg.sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (cfg.n_fft < cfg.window_length) throw ConfigError("n_fft must be >= window_length");
  if (cfg.hop_length <= 0) throw ConfigError("hop_length must be positive");
  if (cfg.component_width <= 0) throw ConfigError("component_width must be positive");
  if (!(cfg.db_floor > 0)) throw ConfigError("db_floor must be positive");
  if (!(cfg.epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (cfg.model_input_range != "pm1") throw ConfigError("model_input_range must be 'pm1'");
  validate(cfg.stft());
}

}  // namespace noisegan
