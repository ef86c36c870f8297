#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisegan/audio/pipeline_config.hpp"
#include "noisegan/core/error.hpp"
#include "noisegan/core/hash.hpp"
#include "noisegan/dataset/splits.hpp"
#include "noisegan/metrics.hpp"

namespace noisegan::metrics {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MetricConfig, lsd_n_fft, lsd_hop, lsd_epsilon, mssl_fft_sizes,
                                                mssl_hop_ratio, mssl_alpha, mssl_epsilon)
}  // namespace noisegan::metrics

namespace noisegan {

inline const std::vector<std::string>& model_families() {
  static const std::vector<std::string> f{"speech_attention", "mask_cyclegan", "simugan", "speech2speech"};
  return f;
}

inline void check_family(const std::string& family) {
  for (const auto& f : model_families()) {
    if (f == family) return;
  }
  throw ConfigError("unknown model family '" + family +
                    "' (speech_attention, mask_cyclegan, simugan, speech2speech)");
}

inline bool family_is_parallel(const std::string& family) { return family == "speech2speech"; }
inline bool family_uses_fif(const std::string& family) {
  return family == "speech_attention" || family == "mask_cyclegan";
}

// Network sizes. A zero base_channels picks the family's upstream default.
struct ModelConfig {
  std::string family = "speech_attention";
  int base_channels = 0;
  int disc_channels = 64;
  int disc_layers = 3;
  int attention_masks = 10;
  int residual_blocks = 9;
  int mcg_residual_blocks = 6;
  int unet_depth = 8;
  bool unet_dropout = true;
  int nce_patches = 256;
  int nce_dim = 256;
  bool second_adversarial = true;  // mask_cyclegan only; speech_attention always uses it
  bool identity_nce = false;       // simugan only

  int generator_channels() const {
    if (base_channels > 0) return base_channels;
    return family == "mask_cyclegan" ? 128 : 64;
  }
};

struct LossWeights {
  double adv = 1.0;
  double adv2 = 1.0;
  double cycle = 10.0;
  double identity = 5.0;
  long identity_steps = 10000;  // identity term is dropped after this many steps
  double nce = 1.0;
  double nce_temperature = 0.07;
  double l1 = 100.0;
};

struct TrainConfig {
  int epochs = 1000;
  int checkpoint_interval = 50;
  int batch_size = 1;
  double lr_g = 2e-4;
  double lr_d = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::uint64_t seed = 0;
  long max_steps = 0;  // 0 = no cap
  int fif_max_band = 64;
  int threads = 1;
  std::string manifest;
};

struct DatasetConfig {
  std::string noise_type = "stationary";
  std::string mode = "parallel";
  double snr_min_db = 0.0;
  double snr_max_db = 10.0;
  double train_seconds = 180.0;
  double val_seconds = 100.0;
  double test_seconds = 200.0;
  double tolerance = 0.2;
  std::string codec = "codec2";
  std::string codec_dir;  // falls back to NOISEGAN_CODEC2_DIR
  std::string g726_rate = "32k";
  std::uint64_t seed = 0;
};

struct RunConfig {
  PipelineConfig pipeline;
  ModelConfig model;
  LossWeights losses;
  TrainConfig train;
  metrics::MetricConfig metrics;
  DatasetConfig dataset;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PipelineConfig, sample_rate, n_fft, hop_length, window_length,
                                                component_width, target_rms_dbfs, db_floor, epsilon, model_input_range)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModelConfig, family, base_channels, disc_channels, disc_layers,
                                                attention_masks, residual_blocks, mcg_residual_blocks, unet_depth,
                                                unet_dropout, nce_patches, nce_dim, second_adversarial, identity_nce)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LossWeights, adv, adv2, cycle, identity, identity_steps, nce,
                                                nce_temperature, l1)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, epochs, checkpoint_interval, batch_size, lr_g, lr_d,
                                                beta1, beta2, seed, max_steps, fif_max_band, threads, manifest)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DatasetConfig, noise_type, mode, snr_min_db, snr_max_db,
                                                train_seconds, val_seconds, test_seconds, tolerance, codec, codec_dir,
                                                g726_rate, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, pipeline, model, losses, train, metrics, dataset)

inline void validate(const LossWeights& w) {
  for (double v : {w.adv, w.adv2, w.cycle, w.identity, w.nce, w.l1}) {
    if (!(v >= 0)) throw ConfigError("loss weights must be >= 0");
  }
  if (!(w.nce_temperature > 0)) throw ConfigError("nce_temperature must be > 0");
  if (w.identity_steps < 0) throw ConfigError("identity_steps must be >= 0");
}

inline void validate(const RunConfig& cfg) {
  validate(cfg.pipeline);
  check_family(cfg.model.family);
  validate(cfg.losses);
  metrics::validate(cfg.metrics);
  const auto& t = cfg.train;
  if (t.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (t.checkpoint_interval < 1) throw ConfigError("checkpoint_interval must be >= 1");
  if (t.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(t.lr_g > 0 && t.lr_d > 0)) throw ConfigError("learning rates must be > 0");
  if (t.max_steps < 0) throw ConfigError("max_steps must be >= 0");
  if (t.fif_max_band < 0 || t.fif_max_band > cfg.pipeline.component_width) {
    throw ConfigError("fif_max_band must lie in [0, component_width]");
  }
  const auto& m = cfg.model;
  if (m.disc_channels < 1 || m.disc_layers < 1 || m.attention_masks < 1 || m.residual_blocks < 1 ||
      m.mcg_residual_blocks < 1 || m.nce_patches < 2 || m.nce_dim < 1 || m.unet_depth < 1) {
    throw ConfigError("model sizes must be positive (nce_patches >= 2)");
  }
  dataset::noise_type_from_string(cfg.dataset.noise_type);
  dataset::mode_from_string(cfg.dataset.mode);
  if (cfg.dataset.snr_min_db > cfg.dataset.snr_max_db) throw ConfigError("snr_min_db exceeds snr_max_db");
}

// Applies "dotted.key=value" overrides. Values are parsed as JSON when
// possible and kept as strings otherwise; unknown keys are rejected.
inline RunConfig apply_overrides(const RunConfig& base, const std::vector<std::string>& overrides) {
  nlohmann::json j = base;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not key=value");
    std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    std::string pointer = "/";
    for (char c : key) pointer += c == '.' ? '/' : c;
    const nlohmann::json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) throw ConfigError("unknown config key '" + key + "'");
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;
    }
    if (j.at(ptr).is_string() && !value.is_string()) value = raw;
    j[ptr] = value;
  }
  RunConfig out;
  try {
    out = j.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad override value: ") + e.what());
  }
  return out;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  try {
    return nlohmann::json::parse(in).get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid config " + path.string() + ": " + e.what());
  }
}

inline void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path.string());
  out << nlohmann::json(cfg).dump(2) << "\n";
}

// FNV-1a over the canonical JSON dump; identifies a configuration.
inline std::string fingerprint(const RunConfig& cfg) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(nlohmann::json(cfg).dump());
  return out.str();
}

}  // namespace noisegan
