#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "noisegan/audio/resample.hpp"
#include "noisegan/audio/wav.hpp"
#include "noisegan/dataset/splits.hpp"
#include "noisegan/eval/harness.hpp"

// Glue between manifests on disk and the in-memory APIs.
namespace noisegan::workflow {

inline AudioClip read_at(const std::string& path, int sample_rate) {
  if (!std::filesystem::exists(path)) throw DataError("missing audio file " + path);
  AudioClip c = wav::read(path);
  if (c.sample_rate != sample_rate) c = resample(c, sample_rate);
  c.clip_id = std::filesystem::path(path).stem().string();
  return c;
}

// Clean/noisy pairs of one split; every row must carry its noisy twin.
inline std::vector<eval::EvalPair> load_pairs(const dataset::SplitManifest& m, const std::string& split,
                                              int sample_rate) {
  std::vector<eval::EvalPair> out;
  for (const auto& r : m.split(split, "pair")) {
    if (!r.pair_path) throw DataError("record " + r.path + " in split '" + split + "' has no noisy twin");
    AudioClip clean = read_at(r.path, sample_rate);
    clean.speaker_id = r.speaker;
    AudioClip noisy = read_at(*r.pair_path, sample_rate);
    out.push_back({r.speaker + "/" + r.utterance_id, std::move(clean), std::move(noisy)});
  }
  if (out.empty()) throw DataError("split '" + split + "' has no clean/noisy pairs");
  return out;
}

struct TrainClips {
  std::vector<AudioClip> clean;
  std::vector<AudioClip> noisy;
  bool parallel = false;
};

inline TrainClips load_training_clips(const dataset::SplitManifest& m, int sample_rate) {
  TrainClips t;
  t.parallel = m.mode == dataset::Mode::parallel;
  if (t.parallel) {
    for (auto& p : load_pairs(m, "train", sample_rate)) {
      t.clean.push_back(std::move(p.clean));
      t.noisy.push_back(std::move(p.noisy));
    }
  } else {
    for (const auto& r : m.split("train", "clean")) t.clean.push_back(read_at(r.path, sample_rate));
    for (const auto& r : m.split("train", "noisy")) t.noisy.push_back(read_at(r.path, sample_rate));
  }
  if (t.clean.empty() || t.noisy.empty()) throw DataError("manifest has no training clips in one of the domains");
  return t;
}

}  // namespace noisegan::workflow
