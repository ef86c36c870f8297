#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "noisegan/config.hpp"
#include "noisegan/core/run_lock.hpp"
#include "noisegan/gan/trainers.hpp"

namespace noisegan::gan {

namespace fs = std::filesystem;

struct CheckpointInfo {
  int epoch = 0;
  long step = 0;
  std::string path;
};

struct TrainResult {
  std::vector<CheckpointInfo> checkpoints;
  long steps = 0;
  int last_epoch = 0;
};

inline std::size_t steps_per_epoch(const RunConfig& cfg, const TrainingData& data) {
  const std::size_t per_step =
      static_cast<std::size_t>(cfg.pipeline.component_width) * static_cast<std::size_t>(cfg.train.batch_size);
  return std::max<std::size_t>(1, (data.total_frames() + per_step - 1) / per_step);
}

inline fs::path checkpoint_path(const fs::path& run_dir, int epoch) {
  char name[32];
  std::snprintf(name, sizeof name, "epoch_%05d.pt", epoch);
  return run_dir / "checkpoints" / name;
}

// (epoch, path) of every checkpoint in a run directory, by epoch.
inline std::vector<std::pair<int, std::string>> list_checkpoints(const fs::path& run_dir) {
  std::vector<std::pair<int, std::string>> out;
  const fs::path dir = run_dir / "checkpoints";
  if (!fs::exists(dir)) return out;
  static const std::regex pattern(R"(epoch_(\d+)\.pt)");
  for (const auto& e : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, pattern)) out.emplace_back(std::stoi(m[1]), e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline void write_nan_snapshot(const fs::path& run_dir, Trainer& trainer, int epoch, long step,
                               const std::vector<std::string>& names, const std::vector<double>& values,
                               const std::string& what) {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["step"] = step;
  j["error"] = what;
  for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
    j["losses"][names[i]] = std::isfinite(values[i]) ? nlohmann::ordered_json(values[i]) : nlohmann::ordered_json("nan");
  }
  std::ofstream(run_dir / "nan_diagnostic.json") << j.dump(2) << "\n";
  trainer.save(run_dir / "nan_snapshot.pt", epoch, step);
}

}  // namespace detail

// Trains for cfg.train.epochs (or until max_steps), writing config.json,
// losses.csv and checkpoints/epoch_NNNNN.pt every checkpoint_interval epochs
// plus one after the final epoch. Resumes from the latest checkpoint when
// one exists.
inline TrainResult train(const RunConfig& cfg, const TrainingData& data, const fs::path& run_dir,
                         const std::function<void(long, const std::vector<double>&)>& on_step = {}) {
  validate(cfg);
  if (family_is_parallel(cfg.model.family) && !data.parallel) {
    throw DataError("speech2speech needs parallel (aligned) training pairs");
  }
  RunLock lock(run_dir);
  torch::set_num_threads(std::max(1, cfg.train.threads));

  const fs::path config_path = run_dir / "config.json";
  if (fs::exists(config_path)) {
    if (fingerprint(load_config(config_path)) != fingerprint(cfg)) {
      throw ConfigError("run directory " + run_dir.string() + " holds a different configuration");
    }
  } else {
    save_config(config_path, cfg);
  }

  auto trainer = make_trainer(cfg);
  trainer->set_training(true);
  TrainResult result;
  int start_epoch = 1;
  long step = 0;
  const auto existing = list_checkpoints(run_dir);
  for (const auto& [epoch, path] : existing) result.checkpoints.push_back({epoch, 0, path});
  if (!existing.empty()) {
    auto [epoch, saved_step] = trainer->load(existing.back().second);
    trainer->set_training(true);
    start_epoch = epoch + 1;
    step = saved_step;
    result.last_epoch = epoch;
  }

  const auto names = trainer->loss_names();
  const fs::path log_path = run_dir / "losses.csv";
  const bool fresh_log = !fs::exists(log_path);
  std::ofstream log(log_path, std::ios::app);
  if (!log) throw IoError("cannot write " + log_path.string());
  if (fresh_log) {
    log << "step,epoch";
    for (const auto& n : names) log << ',' << n;
    log << '\n';
  }
  log.precision(8);

  const std::size_t per_epoch = steps_per_epoch(cfg, data);
  const long cap = cfg.train.max_steps;
  for (int epoch = start_epoch; epoch <= cfg.train.epochs; ++epoch) {
    bool capped = false;
    for (std::size_t s = 0; s < per_epoch; ++s) {
      if (cap > 0 && step >= cap) {
        capped = true;
        break;
      }
      std::vector<double> losses;
      try {
        losses = trainer->step(data, step);
      } catch (const NumericalError& e) {
        detail::write_nan_snapshot(run_dir, *trainer, epoch, step, names, {}, e.what());
        throw NumericalError(std::string(e.what()) + " at step " + std::to_string(step) + "; snapshot in " +
                             run_dir.string());
      }
      for (double v : losses) {
        if (!std::isfinite(v)) {
          detail::write_nan_snapshot(run_dir, *trainer, epoch, step, names, losses, "non-finite loss");
          throw NumericalError("non-finite loss at step " + std::to_string(step) + "; snapshot in " +
                               run_dir.string());
        }
      }
      log << step << ',' << epoch;
      for (double v : losses) log << ',' << v;
      log << '\n';
      if (on_step) on_step(step, losses);
      ++step;
    }
    log.flush();
    const bool last = epoch == cfg.train.epochs || capped || (cap > 0 && step >= cap);
    if (epoch % cfg.train.checkpoint_interval == 0 || last) {
      const auto path = checkpoint_path(run_dir, epoch);
      trainer->save(path, epoch, step);
      result.checkpoints.push_back({epoch, step, path.string()});
    }
    result.last_epoch = epoch;
    if (last) break;
  }
  result.steps = step;
  return result;
}

// Clean-to-noisy generator restored from a checkpoint, usable as a
// ComponentTranslator. Runs in eval mode without gradients.
class GeneratorTranslator {
 public:
  GeneratorTranslator(Net net, bool fif) : net_(std::move(net)), fif_(fif) { net_->eval(); }

  Matrix<float> operator()(const Matrix<float>& component) const {
    torch::NoGradGuard guard;
    auto x = to_network(component);
    if (fif_) x = torch::cat({x, torch::ones_like(x)}, 1);
    return from_network(net_(x));
  }

  torch::Tensor forward(const torch::Tensor& x) const {
    torch::NoGradGuard guard;
    return net_(x);
  }

  const Net& net() const { return net_; }

 private:
  Net net_;
  bool fif_;
};

struct LoadedGenerator {
  RunConfig config;
  int epoch = 0;
  GeneratorTranslator translator;
};

inline LoadedGenerator load_generator(const fs::path& checkpoint) {
  if (!fs::exists(checkpoint)) throw IoError("checkpoint not found: " + checkpoint.string());
  torch::serialize::InputArchive ar;
  ar.load_from(checkpoint.string());
  c10::IValue cfg_json;
  ar.read("config", cfg_json);
  const RunConfig cfg = nlohmann::json::parse(cfg_json.toStringRef()).get<RunConfig>();
  Net g = build_generator(cfg.model, cfg.pipeline);
  torch::serialize::InputArchive sub;
  ar.read("generator", sub);
  g->load(sub);
  torch::Tensor epoch;
  ar.read("epoch", epoch);
  return {cfg, static_cast<int>(epoch.item<int64_t>()), GeneratorTranslator(g, family_uses_fif(cfg.model.family))};
}

}  // namespace noisegan::gan
