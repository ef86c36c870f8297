#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "noisegan/audio/pipeline_config.hpp"
#include "noisegan/core/error.hpp"
#include "noisegan/core/matrix.hpp"

namespace noisegan {

// dB range used for the 0..255 mapping of one clip.
struct ScaleMeta {
  double min_db = 0.0;
  double max_db = 0.0;
  bool operator==(const ScaleMeta&) const = default;
};

// Fixed-width, 8-bit-scaled, vertically flipped slices of one spectrogram.
struct ComponentBatch {
  std::vector<Matrix<float>> components;
  std::size_t pad_frames = 0;
  ScaleMeta scale_meta;
  bool flipped = true;

  std::size_t component_width() const { return components.empty() ? 0 : components.front().cols(); }
  std::size_t total_frames() const { return components.size() * component_width(); }
};

// Full-length model-space matrix (before slicing).
struct ModelSpaceSpectrogram {
  Matrix<float> values;
  ScaleMeta scale_meta;
};

// Splits frames into ceil(n / width) slices. The tail of the last slice is
// filled with frames taken from the start of the spectrogram (cyclically when
// the whole spectrogram is shorter than the padding).
template <typename T>
std::pair<std::vector<Matrix<T>>, std::size_t> componentize(const Matrix<T>& spec, std::size_t width) {
  if (width == 0) throw ConfigError("component_width must be positive");
  if (spec.cols() == 0) throw ShapeError("cannot componentize a spectrogram with no frames");
  const std::size_t n = spec.cols();
  const std::size_t count = (n + width - 1) / width;
  const std::size_t pad = (width - n % width) % width;

  std::vector<Matrix<T>> parts;
  parts.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    Matrix<T> part(spec.rows(), width);
    for (std::size_t r = 0; r < spec.rows(); ++r) {
      for (std::size_t j = 0; j < width; ++j) {
        const std::size_t frame = c * width + j;
        part(r, j) = spec(r, frame < n ? frame : (frame - n) % n);
      }
    }
    parts.push_back(std::move(part));
  }
  return {std::move(parts), pad};
}

template <typename T>
Matrix<T> decomponentize(const std::vector<Matrix<T>>& parts, std::size_t pad_frames) {
  if (parts.empty()) throw ShapeError("decomponentize: empty component list");
  const std::size_t width = parts.front().cols();
  const std::size_t rows = parts.front().rows();
  if (pad_frames >= width) throw ShapeError("pad_frames must be smaller than the component width");
  for (const auto& p : parts) {
    if (p.rows() != rows || p.cols() != width) throw ShapeError("components have differing shapes");
  }
  const std::size_t total = parts.size() * width - pad_frames;
  Matrix<T> out(rows, total);
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const std::size_t start = c * width;
    const std::size_t take = std::min(width, total - start);
    out.set_columns(start, parts[c].columns(0, take));
  }
  return out;
}

// magnitude -> dB -> clamp to [max - floor, max] -> 0..255 -> flip rows.
inline ModelSpaceSpectrogram to_model_matrix(const Matrix<double>& magnitude, const PipelineConfig& cfg,
                                             bool quantize = true) {
  if (magnitude.empty()) throw ShapeError("empty magnitude spectrogram");
  std::vector<double> db(magnitude.size());
  double max_db = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < db.size(); ++i) {
    const double m = magnitude.data()[i];
    if (m < 0.0 || !std::isfinite(m)) throw NumericalError("magnitude must be finite and nonnegative");
    db[i] = 20.0 * std::log10(m + cfg.epsilon);
    max_db = std::max(max_db, db[i]);
  }
  const ScaleMeta meta{max_db - cfg.db_floor, max_db};
  Matrix<float> scaled(magnitude.rows(), magnitude.cols());
  for (std::size_t i = 0; i < db.size(); ++i) {
    const double clamped = std::clamp(db[i], meta.min_db, meta.max_db);
    double v = (clamped - meta.min_db) / (meta.max_db - meta.min_db) * 255.0;
    if (quantize) v = std::round(v);
    scaled.data()[i] = static_cast<float>(v);
  }
  return {scaled.flipped_rows(), meta};
}

inline Matrix<double> from_model_matrix(const Matrix<float>& values, const ScaleMeta& meta, const PipelineConfig& cfg) {
  const Matrix<float> unflipped = values.flipped_rows();
  Matrix<double> mag(unflipped.rows(), unflipped.cols());
  const double range = meta.max_db - meta.min_db;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    const double v = std::clamp(static_cast<double>(unflipped.data()[i]), 0.0, 255.0);
    const double db = meta.min_db + v / 255.0 * range;
    mag.data()[i] = std::max(std::pow(10.0, db / 20.0) - cfg.epsilon, 0.0);
  }
  return mag;
}

inline ComponentBatch to_model_space(const Matrix<double>& magnitude, const PipelineConfig& cfg) {
  auto model = to_model_matrix(magnitude, cfg);
  auto [parts, pad] = componentize(model.values, static_cast<std::size_t>(cfg.component_width));
  return ComponentBatch{std::move(parts), pad, model.scale_meta, true};
}

inline Matrix<double> from_model_space(const ComponentBatch& batch, std::size_t original_n_frames,
                                       const PipelineConfig& cfg) {
  if (!batch.flipped) throw ShapeError("component batch is not in model space (flipped = false)");
  if (original_n_frames == 0 || original_n_frames > batch.total_frames()) {
    throw ShapeError("original frame count " + std::to_string(original_n_frames) + " inconsistent with " +
                     std::to_string(batch.total_frames()) + " component frames");
  }
  if (batch.total_frames() - batch.pad_frames != original_n_frames) {
    throw ShapeError("original frame count " + std::to_string(original_n_frames) +
                     " does not match components minus padding (" +
                     std::to_string(batch.total_frames() - batch.pad_frames) + ")");
  }
  const Matrix<float> joined = decomponentize(batch.components, batch.pad_frames);
  return from_model_matrix(joined, batch.scale_meta, cfg);
}

}  // namespace noisegan
