#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "noisegan/eval/harness.hpp"
#include "noisegan/eval/report.hpp"
#include "noisegan/gan/run.hpp"

namespace noisegan::gan {

struct RunEvaluation {
  eval::ReportRow row;
  std::vector<eval::CheckpointScore> validation;  // per checkpoint
  std::vector<metrics::Scores> per_clip;          // test clips, best-checkpoint protocol only
};

// Validation scores of every checkpoint in a run directory.
inline std::vector<eval::CheckpointScore> score_run(const std::filesystem::path& run_dir,
                                                    std::span<const eval::EvalPair> validation) {
  const auto checkpoints = list_checkpoints(run_dir);
  if (checkpoints.empty()) throw DataError("no checkpoints in " + run_dir.string());
  std::vector<eval::CheckpointScore> table;
  for (const auto& [epoch, path] : checkpoints) {
    auto loaded = load_generator(path);
    table.push_back({epoch, path,
                     eval::evaluate_pairs(validation, loaded.translator, loaded.config.pipeline, loaded.config.metrics)});
  }
  return table;
}

// Best checkpoint: pick by validation MSSL, report its test metrics.
// Checkpoint average: mean validation metrics over all checkpoints.
inline RunEvaluation evaluate_run(const std::filesystem::path& run_dir, std::span<const eval::EvalPair> validation,
                                  std::span<const eval::EvalPair> test, eval::Protocol protocol,
                                  const std::string& dataset_name) {
  const RunConfig cfg = load_config(run_dir / "config.json");
  RunEvaluation out;
  out.validation = score_run(run_dir, validation);
  out.row.dataset = dataset_name;
  out.row.model = cfg.model.family;
  out.row.mode = family_is_parallel(cfg.model.family) ? "parallel" : "non_parallel";
  if (protocol == eval::Protocol::best_checkpoint) {
    const auto best = eval::select_best(out.validation);
    auto loaded = load_generator(best.path);
    out.per_clip = eval::score_pairs(test, loaded.translator, loaded.config.pipeline, loaded.config.metrics);
    const auto mean = metrics::mean_scores(out.per_clip);
    out.row.mean_lsd = mean.lsd;
    out.row.mean_mssl = mean.mssl;
    out.row.epoch = best.epoch;
  } else {
    const auto mean = eval::average_over(out.validation);
    out.row.mean_lsd = mean.lsd;
    out.row.mean_mssl = mean.mssl;
  }
  return out;
}

}  // namespace noisegan::gan
