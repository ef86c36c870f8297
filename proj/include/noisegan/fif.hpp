#pragma once

#include <cstdint>
#include <random>

#include "noisegan/core/error.hpp"
#include "noisegan/core/matrix.hpp"

// Filling-in-Frames masks: one contiguous band of time frames zeroed across
// every frequency bin.
namespace noisegan::fif {

struct FIFMask {
  Matrix<float> mask;  // n_freq x component_width, entries 0 or 1
  std::size_t band_start = 0;
  std::size_t band_width = 0;
};

inline FIFMask make_mask(std::size_t n_freq, std::size_t width, std::size_t band_start, std::size_t band_width) {
  if (band_start + band_width > width) throw ShapeError("mask band exceeds component width");
  FIFMask m{Matrix<float>(n_freq, width, 1.0f), band_start, band_width};
  for (std::size_t r = 0; r < n_freq; ++r) {
    for (std::size_t c = band_start; c < band_start + band_width; ++c) m.mask(r, c) = 0.0f;
  }
  return m;
}

// Draws (start, width) from the caller's generator:
// width ~ U{0..max_band_width}, start ~ U{0..component_width - width}.
template <typename Rng>
FIFMask sample_mask(std::size_t n_freq, std::size_t component_width, std::size_t max_band_width, Rng& rng) {
  if (max_band_width > component_width) {
    throw ConfigError("max_band_width (" + std::to_string(max_band_width) + ") exceeds component width (" +
                      std::to_string(component_width) + ")");
  }
  std::uniform_int_distribution<std::size_t> width_dist(0, max_band_width);
  const std::size_t width = width_dist(rng);
  std::uniform_int_distribution<std::size_t> start_dist(0, component_width - width);
  const std::size_t start = start_dist(rng);
  return make_mask(n_freq, component_width, start, width);
}

inline FIFMask sample_mask(std::size_t n_freq, std::size_t component_width, std::size_t max_band_width,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_mask(n_freq, component_width, max_band_width, rng);
}

inline FIFMask inference_mask(std::size_t n_freq, std::size_t component_width) {
  return make_mask(n_freq, component_width, 0, 0);
}

inline Matrix<float> apply(const FIFMask& m, const Matrix<float>& component) {
  if (!m.mask.same_shape(component)) {
    throw ShapeError("mask " + shape_string(m.mask.rows(), m.mask.cols()) + " vs component " +
                     shape_string(component.rows(), component.cols()));
  }
  Matrix<float> out = component;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= m.mask.data()[i];
  return out;
}

}  // namespace noisegan::fif
