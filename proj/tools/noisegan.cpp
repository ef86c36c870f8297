#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "noisegan/audio/pipeline.hpp"
#include "noisegan/audio/wav.hpp"
#include "noisegan/baseline/baseline.hpp"
#include "noisegan/config.hpp"
#include "noisegan/dataset/codec.hpp"
#include "noisegan/dataset/corpus.hpp"
#include "noisegan/dataset/splits.hpp"
#include "noisegan/eval/report.hpp"
#include "noisegan/gan/evaluate.hpp"
#include "noisegan/gan/run.hpp"
#include "noisegan/workflow.hpp"

namespace fs = std::filesystem;
using namespace noisegan;

namespace {

RunConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
  cfg = apply_overrides(cfg, overrides);
  validate(cfg);
  return cfg;
}

dataset::SplitTargets targets_of(const DatasetConfig& d) {
  return {d.train_seconds, d.val_seconds, d.test_seconds, d.tolerance};
}

int cmd_make_toy(const fs::path& out, const dataset::ToyCorpusOptions& opt) {
  dataset::make_toy_corpus(out, opt);
  std::cout << "toy corpus written to " << out << "\n";
  return 0;
}

struct PrepareArgs {
  std::string corpus, noise_dir, out, config;
  std::string noise_type, mode;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

int cmd_prepare(const PrepareArgs& a) {
  RunConfig cfg = resolve_config(a.config, a.overrides);
  if (!a.noise_type.empty()) cfg.dataset.noise_type = a.noise_type;
  if (!a.mode.empty()) cfg.dataset.mode = a.mode;
  if (a.seed) cfg.dataset.seed = *a.seed;
  validate(cfg);
  const auto noise_type = dataset::noise_type_from_string(cfg.dataset.noise_type);
  const auto mode = dataset::mode_from_string(cfg.dataset.mode);
  const fs::path out = fs::absolute(a.out);

  auto corpus = dataset::scan_corpus(fs::absolute(a.corpus));
  auto manifest = dataset::build_splits(corpus, noise_type, mode, targets_of(cfg.dataset), cfg.dataset.seed, out);
  const auto problems = dataset::manifest_problems(manifest, targets_of(cfg.dataset));
  if (!problems.empty()) throw DataError("manifest check failed: " + problems.front());

  std::vector<AudioClip> noise;
  std::unique_ptr<dataset::CodecClient> codec;
  if (noise_type == dataset::NoiseType::stationary || noise_type == dataset::NoiseType::non_stationary) {
    if (a.noise_dir.empty()) throw ConfigError("--noise-dir is required for noise type " + cfg.dataset.noise_type);
    noise = dataset::load_noise_clips(a.noise_dir, cfg.pipeline.sample_rate);
  } else if (noise_type == dataset::NoiseType::codec) {
    codec = dataset::make_codec_client(cfg.dataset.codec, cfg.dataset.codec_dir);
  }
  const auto written = dataset::materialize(
      manifest, noise, codec.get(),
      {cfg.pipeline.sample_rate, cfg.dataset.snr_min_db, cfg.dataset.snr_max_db, cfg.dataset.seed});
  dataset::write_manifest(out / "manifest.jsonl", manifest);
  save_config(out / "dataset_config.json", cfg);
  std::cout << "manifest: " << (out / "manifest.jsonl").string() << " (" << manifest.records.size() << " records, "
            << written << " noisy files generated)\n";
  for (const auto& s : dataset::split_names()) {
    std::cout << "  " << s << ": " << manifest.speakers(s).size() << " speakers\n";
  }
  return 0;
}

struct TrainArgs {
  std::string model, config, manifest, run_dir;
  std::vector<std::string> overrides;
};

int cmd_train(const TrainArgs& a) {
  RunConfig cfg = resolve_config(a.config, a.overrides);
  if (!a.model.empty()) cfg.model.family = a.model;
  if (!a.manifest.empty()) cfg.train.manifest = fs::absolute(a.manifest).string();
  validate(cfg);
  if (cfg.train.manifest.empty()) throw ConfigError("no manifest given (--manifest or train.manifest)");
  const auto manifest = dataset::read_manifest(cfg.train.manifest);
  if (family_is_parallel(cfg.model.family) && manifest.mode != dataset::Mode::parallel) {
    throw DataError("speech2speech needs a parallel manifest");
  }
  const auto clips = workflow::load_training_clips(manifest, cfg.pipeline.sample_rate);
  const auto data = gan::make_training_data(clips.clean, clips.noisy, cfg.pipeline, clips.parallel);
  fs::create_directories(a.run_dir);
  dataset::write_manifest(fs::path(a.run_dir) / "manifest.jsonl", manifest);
  const auto result = gan::train(cfg, data, a.run_dir);
  std::cout << "trained " << cfg.model.family << " for " << result.steps << " steps; " << result.checkpoints.size()
            << " checkpoints in " << (fs::path(a.run_dir) / "checkpoints").string() << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string run_dir, protocol, manifest, dataset_name, baseline_noise_dir;
  std::optional<std::uint64_t> seed;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const fs::path run = a.run_dir;
  const RunConfig cfg = load_config(run / "config.json");
  const auto protocol = eval::protocol_from_string(a.protocol);
  const fs::path manifest_path = a.manifest.empty() ? run / "manifest.jsonl" : fs::path(a.manifest);
  const auto manifest = dataset::read_manifest(manifest_path);
  const int sr = cfg.pipeline.sample_rate;
  const auto val = workflow::load_pairs(manifest, "val", sr);
  const auto test = workflow::load_pairs(manifest, "test", sr);
  const std::string name = a.dataset_name.empty() ? dataset::to_string(manifest.noise_type) : a.dataset_name;

  auto result = gan::evaluate_run(run, val, test, protocol, name);
  eval::EvalReport report{protocol, {result.row}};

  if (!a.baseline_noise_dir.empty()) {
    const auto noise = dataset::load_noise_clips(a.baseline_noise_dir, sr);
    baseline::BaselineConfig bcfg;
    bcfg.rate = g726::rate_from_string(cfg.dataset.g726_rate);
    bcfg.snr_min_db = cfg.dataset.snr_min_db;
    bcfg.snr_max_db = cfg.dataset.snr_max_db;
    std::mt19937_64 rng(a.seed.value_or(cfg.dataset.seed));
    std::uniform_real_distribution<double> snr(bcfg.snr_min_db, bcfg.snr_max_db);
    std::vector<AudioClip> candidates;
    for (const auto& p : test) {
      const AudioClip clean = condition_clip(p.clean, cfg.pipeline);
      candidates.push_back(baseline::baseline_simulate(clean, noise, snr(rng), bcfg, rng));
    }
    const auto s = eval::evaluate_candidates(test, candidates, cfg.pipeline, cfg.metrics);
    report.rows.push_back({name, "baseline_g726", s.lsd, s.mssl, "baseline", std::nullopt});
  }

  eval::write_report(run, report);
  {
    std::ofstream out(run / "checkpoint_scores.csv");
    out << "epoch,val_mean_lsd,val_mean_mssl\n";
    for (const auto& c : result.validation) out << c.epoch << ',' << c.scores.lsd << ',' << c.scores.mssl << '\n';
  }
  if (!result.per_clip.empty()) {
    std::ofstream out(run / "per_clip.csv");
    out << "clip,lsd,mssl\n";
    for (std::size_t i = 0; i < result.per_clip.size(); ++i) {
      out << test[i].id << ',' << result.per_clip[i].lsd << ',' << result.per_clip[i].mssl << '\n';
    }
  }
  eval::flag_minima(report);
  std::cout << eval::render_table(report);
  return 0;
}

struct SimulateArgs {
  std::string checkpoint, in, out, config;
  bool identity = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const AudioClip clean = wav::read(a.in);
  AudioClip out;
  if (a.identity) {
    const RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
    out = simulate(clean, IdentityTranslator{}, cfg.pipeline);
  } else {
    if (a.checkpoint.empty()) throw ConfigError("--checkpoint is required unless --identity is given");
    auto loaded = gan::load_generator(a.checkpoint);
    out = simulate(clean, loaded.translator, loaded.config.pipeline);
  }
  wav::write(a.out, out);
  std::cout << "wrote " << a.out << " (" << out.duration_seconds() << " s)\n";
  return 0;
}

struct BaselineArgs {
  std::string noise_dir, in, out, mode = "32k";
  std::optional<double> snr;
  std::uint64_t seed = 0;
};

int cmd_baseline(const BaselineArgs& a) {
  const AudioClip clean = wav::read(a.in);
  const auto noise = dataset::load_noise_clips(a.noise_dir, clean.sample_rate);
  baseline::BaselineConfig cfg;
  cfg.rate = g726::rate_from_string(a.mode);
  std::mt19937_64 rng(a.seed);
  const double snr = a.snr ? *a.snr : std::uniform_real_distribution<double>(cfg.snr_min_db, cfg.snr_max_db)(rng);
  const AudioClip out = baseline::baseline_simulate(clean, noise, snr, cfg, rng);
  wav::write(a.out, out);
  std::cout << "wrote " << a.out << " (SNR " << snr << " dB, G.726 " << a.mode << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisy speech simulation: data preparation, GAN training, evaluation"};
  app.require_subcommand(1);

  dataset::ToyCorpusOptions toy;
  std::string toy_out;
  auto* make_toy = app.add_subcommand("make-toy", "write a synthetic corpus for tests and demos");
  make_toy->add_option("--out", toy_out, "output directory")->required();
  make_toy->add_option("--speakers", toy.speakers, "number of speakers");
  make_toy->add_option("--utterances", toy.utterances_per_speaker, "utterances per speaker");
  make_toy->add_option("--seconds", toy.utterance_seconds, "utterance length");
  make_toy->add_option("--seed", toy.seed, "random seed");

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "build train/val/test manifests and noisy audio");
  prepare->add_option("--corpus", prep.corpus, "source corpus directory")->required();
  prepare->add_option("--out", prep.out, "dataset output directory")->required();
  prepare->add_option("--noise-type", prep.noise_type, "uhf_vhf | stationary | non_stationary | codec");
  prepare->add_option("--mode", prep.mode, "parallel | non_parallel");
  prepare->add_option("--noise-dir", prep.noise_dir, "noise clips for the noise types");
  prepare->add_option("--seed", prep.seed, "split and mixing seed");
  prepare->add_option("--config", prep.config, "JSON config file");
  prepare->add_option("--set", prep.overrides, "config override key=value")->take_all();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train one GAN family");
  train->add_option("--model", tr.model, "model family")
      ->check(CLI::IsMember({"speech_attention", "mask_cyclegan", "simugan", "speech2speech"}));
  train->add_option("--config", tr.config, "JSON config file");
  train->add_option("--manifest", tr.manifest, "dataset manifest");
  train->add_option("--run-dir", tr.run_dir, "run directory")->required();
  train->add_option("--set", tr.overrides, "config override key=value")->take_all();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "score checkpoints and write report.csv / report.json");
  evaluate->add_option("--run-dir", ev.run_dir, "run directory")->required();
  evaluate->add_option("--protocol", ev.protocol, "best | average")
      ->required()
      ->check(CLI::IsMember({"best", "average", "best_checkpoint", "checkpoint_average"}));
  evaluate->add_option("--manifest", ev.manifest, "manifest (defaults to the run's copy)");
  evaluate->add_option("--dataset", ev.dataset_name, "dataset label for the report");
  evaluate->add_option("--baseline-noise-dir", ev.baseline_noise_dir, "add a G.726 baseline row using these noises");
  evaluate->add_option("--seed", ev.seed, "baseline seed");

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "turn a clean wav into a simulated noisy wav");
  simulate_cmd->add_option("--checkpoint", sim.checkpoint, "generator checkpoint");
  simulate_cmd->add_flag("--identity", sim.identity, "pass components through unchanged");
  simulate_cmd->add_option("--config", sim.config, "pipeline config for --identity");
  simulate_cmd->add_option("--in", sim.in, "clean wav")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", sim.out, "output wav")->required();

  BaselineArgs base;
  auto* baseline_cmd = app.add_subcommand("baseline", "aggregate noise + G.726 reference augmentation");
  baseline_cmd->add_option("--noise-dir", base.noise_dir, "noise clips")->required();
  baseline_cmd->add_option("--in", base.in, "clean wav")->required()->check(CLI::ExistingFile);
  baseline_cmd->add_option("--out", base.out, "output wav")->required();
  baseline_cmd->add_option("--snr", base.snr, "mixing SNR in dB (default: drawn from 0..10)");
  baseline_cmd->add_option("--mode", base.mode, "G.726 rate: 16k | 24k | 32k | 40k");
  baseline_cmd->add_option("--seed", base.seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*make_toy) return cmd_make_toy(toy_out, toy);
    if (*prepare) return cmd_prepare(prep);
    if (*train) return cmd_train(tr);
    if (*evaluate) return cmd_evaluate(ev);
    if (*simulate_cmd) return cmd_simulate(sim);
    if (*baseline_cmd) return cmd_baseline(base);
  } catch (const Error& e) {
    std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
