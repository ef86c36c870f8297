#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "noisegan/audio/pipeline.hpp"
#include "noisegan/core/error.hpp"
#include "noisegan/metrics.hpp"

namespace noisegan::eval {

// A clean clip and the true noisy recording it should turn into.
struct EvalPair {
  std::string id;
  AudioClip clean;
  AudioClip noisy;
};

// Validation metrics of one saved checkpoint.
struct CheckpointScore {
  int epoch = 0;
  std::string path;
  metrics::Scores scores;
};

// Lowest mean MSSL wins; ties go to the earlier epoch.
inline CheckpointScore select_best(std::span<const CheckpointScore> table) {
  if (table.empty()) throw DataError("no checkpoints to select from");
  const CheckpointScore* best = &table.front();
  for (const auto& c : table) {
    if (c.scores.mssl < best->scores.mssl || (c.scores.mssl == best->scores.mssl && c.epoch < best->epoch)) best = &c;
  }
  return *best;
}

inline metrics::Scores average_over(std::span<const CheckpointScore> table) {
  if (table.empty()) throw DataError("no checkpoints to average");
  std::vector<metrics::Scores> s;
  s.reserve(table.size());
  for (const auto& c : table) s.push_back(c.scores);
  return metrics::mean_scores(s);
}

// Both sides are brought to the pipeline rate and loudness before scoring so
// the metrics compare spectral shape rather than playback level.
inline AudioClip align_for_scoring(const AudioClip& clip, const PipelineConfig& cfg) {
  return condition_clip(clip, cfg);
}

template <ComponentTranslator F>
std::vector<metrics::Scores> score_pairs(std::span<const EvalPair> pairs, F&& model, const PipelineConfig& pipeline,
                                         const metrics::MetricConfig& mcfg = {}) {
  if (pairs.empty()) throw DataError("evaluation set is empty");
  std::vector<metrics::Scores> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const AudioClip generated = align_for_scoring(simulate(p.clean, model, pipeline), pipeline);
    const AudioClip target = align_for_scoring(p.noisy, pipeline);
    out.push_back(metrics::score(target, generated, mcfg));
  }
  return out;
}

// Simulates every clean clip and scores it against its noisy twin.
template <ComponentTranslator F>
metrics::Scores evaluate_pairs(std::span<const EvalPair> pairs, F&& model, const PipelineConfig& pipeline,
                               const metrics::MetricConfig& mcfg = {}) {
  const auto per_clip = score_pairs(pairs, std::forward<F>(model), pipeline, mcfg);
  return metrics::mean_scores(per_clip);
}

// Scores a precomputed candidate (e.g. the codec baseline) against the targets.
inline metrics::Scores evaluate_candidates(std::span<const EvalPair> pairs, std::span<const AudioClip> candidates,
                                           const PipelineConfig& pipeline, const metrics::MetricConfig& mcfg = {}) {
  if (pairs.empty()) throw DataError("evaluation set is empty");
  if (pairs.size() != candidates.size()) throw DataError("candidate count does not match evaluation set");
  std::vector<metrics::Scores> s;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    s.push_back(metrics::score(align_for_scoring(pairs[i].noisy, pipeline), align_for_scoring(candidates[i], pipeline),
                               mcfg));
  }
  return metrics::mean_scores(s);
}

// Scores every checkpoint on the validation set. `load` maps a checkpoint
// path to a ComponentTranslator.
template <typename Loader>
std::vector<CheckpointScore> score_checkpoints(const std::vector<std::pair<int, std::string>>& checkpoints,
                                               std::span<const EvalPair> validation, Loader&& load,
                                               const PipelineConfig& pipeline, const metrics::MetricConfig& mcfg = {}) {
  if (checkpoints.empty()) throw DataError("no checkpoints found");
  std::vector<CheckpointScore> table;
  for (const auto& [epoch, path] : checkpoints) {
    auto model = load(path);
    table.push_back({epoch, path, evaluate_pairs(validation, model, pipeline, mcfg)});
  }
  return table;
}

}  // namespace noisegan::eval
