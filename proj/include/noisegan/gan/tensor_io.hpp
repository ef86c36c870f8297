#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <vector>

#include <torch/torch.h>

#include "noisegan/audio/pipeline.hpp"
#include "noisegan/core/error.hpp"
#include "noisegan/core/matrix.hpp"
#include "noisegan/fif.hpp"

namespace noisegan::gan {

// 0..255 model-space values <-> network range [-1, 1].
inline torch::Tensor to_network(const Matrix<float>& m) {
  auto t = torch::from_blob(const_cast<float*>(m.data().data()),
                            {1, 1, static_cast<int64_t>(m.rows()), static_cast<int64_t>(m.cols())}, torch::kFloat)
               .clone();
  return t / 127.5 - 1.0;
}

inline Matrix<float> from_network(const torch::Tensor& t) {
  if (t.dim() != 4 || t.size(0) != 1 || t.size(1) != 1) throw ShapeError("expected a 1 x 1 x H x W network output");
  const auto v = ((t.detach().to(torch::kFloat).contiguous() + 1.0) * 127.5).clamp(0.0, 255.0);
  Matrix<float> m(static_cast<std::size_t>(v.size(2)), static_cast<std::size_t>(v.size(3)));
  std::copy_n(v.data_ptr<float>(), m.size(), m.data().begin());
  return m;
}

// Full-length model-space spectrograms of the two training domains. In
// parallel data clean[i] and noisy[i] come from the same utterance.
struct TrainingData {
  std::vector<Matrix<float>> clean;
  std::vector<Matrix<float>> noisy;
  bool parallel = false;

  std::size_t frames(const std::vector<Matrix<float>>& v) const {
    std::size_t n = 0;
    for (const auto& m : v) n += m.cols();
    return n;
  }
  std::size_t total_frames() const { return frames(clean); }
};

inline TrainingData make_training_data(std::span<const AudioClip> clean, std::span<const AudioClip> noisy,
                                       const PipelineConfig& cfg, bool parallel) {
  if (clean.empty() || noisy.empty()) throw DataError("training data needs clips in both domains");
  if (parallel && clean.size() != noisy.size()) throw DataError("parallel data needs one noisy clip per clean clip");
  TrainingData d;
  d.parallel = parallel;
  for (const auto& c : clean) d.clean.push_back(clip_to_model_matrix(c, cfg).values);
  for (const auto& n : noisy) d.noisy.push_back(clip_to_model_matrix(n, cfg).values);
  if (parallel) {
    for (std::size_t i = 0; i < d.clean.size(); ++i) {
      if (d.clean[i].cols() != d.noisy[i].cols()) {
        throw DataError("misaligned pair " + std::to_string(i) + ": " + std::to_string(d.clean[i].cols()) + " vs " +
                        std::to_string(d.noisy[i].cols()) + " frames");
      }
    }
  }
  return d;
}

// Copies `width` frames starting at `offset`, wrapping around the end.
inline void copy_crop(const Matrix<float>& src, std::size_t offset, std::size_t width, float* dst) {
  const std::size_t rows = src.rows(), cols = src.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) dst[r * width + c] = src(r, (offset + c) % cols);
  }
}

// Random fixed-width crops; clips are picked in proportion to their length.
class CropSampler {
 public:
  explicit CropSampler(std::size_t width) : width_(width) {}

  torch::Tensor draw(const std::vector<Matrix<float>>& pool, int batch, std::mt19937_64& rng) const {
    return draw_impl(pool, nullptr, batch, rng).first;
  }

  // Same clip index and offset in both domains.
  std::pair<torch::Tensor, torch::Tensor> draw_pair(const std::vector<Matrix<float>>& a,
                                                    const std::vector<Matrix<float>>& b, int batch,
                                                    std::mt19937_64& rng) const {
    return draw_impl(a, &b, batch, rng);
  }

 private:
  std::pair<torch::Tensor, torch::Tensor> draw_impl(const std::vector<Matrix<float>>& pool,
                                                    const std::vector<Matrix<float>>* twin, int batch,
                                                    std::mt19937_64& rng) const {
    if (pool.empty()) throw DataError("empty training pool");
    std::vector<double> weights;
    for (const auto& m : pool) weights.push_back(static_cast<double>(m.cols()));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const auto rows = static_cast<int64_t>(pool.front().rows());
    auto out = torch::empty({batch, 1, rows, static_cast<int64_t>(width_)});
    torch::Tensor out_twin = twin ? torch::empty_like(out) : torch::Tensor();
    const std::size_t plane = static_cast<std::size_t>(rows) * width_;
    for (int i = 0; i < batch; ++i) {
      const std::size_t k = pick(rng);
      const auto& m = pool[k];
      const std::size_t span = m.cols() > width_ ? m.cols() - width_ : 0;
      const std::size_t offset = std::uniform_int_distribution<std::size_t>(0, span)(rng);
      copy_crop(m, offset, width_, out.data_ptr<float>() + i * plane);
      if (twin) copy_crop((*twin)[k], offset, width_, out_twin.data_ptr<float>() + i * plane);
    }
    out = out / 127.5 - 1.0;
    if (twin) out_twin = out_twin / 127.5 - 1.0;
    return {out, out_twin};
  }

  std::size_t width_;
};

// One FIF mask per batch element, B x 1 x H x W of {0, 1}.
inline torch::Tensor sample_masks(int64_t batch, std::size_t n_freq, std::size_t width, std::size_t max_band,
                                  std::mt19937_64& rng) {
  auto out = torch::empty({batch, 1, static_cast<int64_t>(n_freq), static_cast<int64_t>(width)});
  for (int64_t i = 0; i < batch; ++i) {
    const auto m = fif::sample_mask(n_freq, width, max_band, rng);
    std::copy_n(m.mask.data().begin(), m.mask.size(), out.data_ptr<float>() + i * m.mask.size());
  }
  return out;
}

}  // namespace noisegan::gan
