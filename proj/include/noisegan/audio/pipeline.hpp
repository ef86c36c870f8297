#pragma once

#include <concepts>
#include <vector>

#include "noisegan/audio/clip.hpp"
#include "noisegan/audio/loudness.hpp"
#include "noisegan/audio/model_space.hpp"
#include "noisegan/audio/pipeline_config.hpp"
#include "noisegan/audio/resample.hpp"
#include "noisegan/audio/stft.hpp"

namespace noisegan {

// Anything that maps one model-space component (0..255, flipped) to another
// of the same shape: a trained generator, the identity, a test double.
template <typename F>
concept ComponentTranslator = requires(F f, const Matrix<float>& component) {
  { f(component) } -> std::convertible_to<Matrix<float>>;
};

struct IdentityTranslator {
  Matrix<float> operator()(const Matrix<float>& c) const { return c; }
};

struct ZeroTranslator {
  Matrix<float> operator()(const Matrix<float>& c) const { return Matrix<float>(c.rows(), c.cols(), 0.0f); }
};

// Brings a clip to the pipeline rate and loudness.
inline AudioClip condition_clip(const AudioClip& clip, const PipelineConfig& cfg) {
  validate(clip);
  const AudioClip at_rate = clip.sample_rate == cfg.sample_rate ? clip : resample(clip, cfg.sample_rate);
  return normalize_loudness(at_rate, cfg.target_rms_dbfs);
}

// Model-space view of a whole clip, as used for training crops.
inline ModelSpaceSpectrogram clip_to_model_matrix(const AudioClip& clip, const PipelineConfig& cfg) {
  validate(cfg);
  const AudioClip conditioned = condition_clip(clip, cfg);
  const SpectrogramPair spec = stft(conditioned.samples, cfg.stft());
  return to_model_matrix(spec.magnitude, cfg);
}

// clean -> normalize -> STFT -> model space -> translator per component ->
// back to magnitude -> inverse STFT with the clean clip's phase.
template <ComponentTranslator F>
AudioClip simulate(const AudioClip& clean, F&& model, const PipelineConfig& cfg) {
  validate(cfg);
  const AudioClip conditioned = condition_clip(clean, cfg);
  const StftParams params = cfg.stft();
  const SpectrogramPair spec = stft(conditioned.samples, params);

  ComponentBatch batch = to_model_space(spec.magnitude, cfg);
  for (auto& component : batch.components) {
    Matrix<float> generated = model(component);
    if (!generated.same_shape(component)) {
      throw ShapeError("model changed component shape from " + shape_string(component.rows(), component.cols()) +
                       " to " + shape_string(generated.rows(), generated.cols()));
    }
    component = std::move(generated);
  }

  SpectrogramPair generated{from_model_space(batch, spec.n_frames(), cfg), spec.phase, params};
  AudioClip out = conditioned.with_samples(istft(generated, params, conditioned.size()));
  out.sample_rate = cfg.sample_rate;
  return out;
}

}  // namespace noisegan
