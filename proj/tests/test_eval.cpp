#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "noisegan/audio/synth.hpp"
#include "noisegan/config.hpp"
#include "noisegan/eval/harness.hpp"
#include "noisegan/eval/report.hpp"

using namespace noisegan;

namespace {

std::vector<eval::CheckpointScore> random_table(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  std::vector<eval::CheckpointScore> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({static_cast<int>(50 * (i + 1)), "ckpt" + std::to_string(i), {u(rng), u(rng)}});
  }
  std::shuffle(t.begin(), t.end(), rng);
  return t;
}

}  // namespace

TEST(Protocols, BestIsArgminMssl) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = random_table(1 + seed % 20, seed);
    std::size_t oracle = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i].scores.mssl < t[oracle].scores.mssl) oracle = i;
    }
    EXPECT_EQ(eval::select_best(t).epoch, t[oracle].epoch);
  }
}

TEST(Protocols, TieGoesToEarlierEpoch) {
  const std::vector<eval::CheckpointScore> t{{150, "c", {1.0, 2.0}}, {50, "a", {3.0, 2.0}}, {100, "b", {0.5, 2.0}}};
  EXPECT_EQ(eval::select_best(t).epoch, 50);
}

TEST(Protocols, AverageIsArithmeticMean) {
  const auto t = random_table(13, 4);
  double lsd = 0, mssl = 0;
  for (const auto& c : t) lsd += c.scores.lsd, mssl += c.scores.mssl;
  const auto m = eval::average_over(t);
  EXPECT_NEAR(m.lsd, lsd / 13, 1e-12);
  EXPECT_NEAR(m.mssl, mssl / 13, 1e-12);
}

TEST(Protocols, EmptyTablesAreErrors) {
  EXPECT_THROW(eval::select_best({}), DataError);
  EXPECT_THROW(eval::average_over({}), DataError);
}

TEST(Protocols, ParseNames) {
  EXPECT_EQ(eval::protocol_from_string("best"), eval::Protocol::best_checkpoint);
  EXPECT_EQ(eval::protocol_from_string("checkpoint_average"), eval::Protocol::checkpoint_average);
  EXPECT_THROW(eval::protocol_from_string("median"), ConfigError);
}

TEST(Report, ReferenceImprovements) {
  EXPECT_NEAR(eval::improvement_percent(12.29, 6.23), 49.3, 0.1);
  EXPECT_NEAR(eval::improvement_percent(11.91, 5.26), 55.8, 0.1);
  EXPECT_NEAR(eval::improvement_percent(6.60, 4.69), 28.9, 0.1);
  EXPECT_NEAR(eval::improvement_percent(6.90, 5.32), 22.8, 0.1);
  EXPECT_THROW(eval::improvement_percent(0.0, 1.0), DataError);
}

TEST(Report, MinimaArePerDataset) {
  eval::EvalReport r;
  r.rows = {{"rats", "baseline", 12.0, 11.0, "baseline"},
            {"rats", "simugan", 6.0, 5.0, "non_parallel"},
            {"cabin", "baseline", 7.7, 6.6, "baseline"},
            {"cabin", "speech2speech", 5.9, 6.8, "parallel"}};
  eval::flag_minima(r);
  EXPECT_TRUE(r.rows[1].min_lsd && r.rows[1].min_mssl);
  EXPECT_FALSE(r.rows[0].min_lsd || r.rows[0].min_mssl);
  EXPECT_TRUE(r.rows[3].min_lsd);
  EXPECT_TRUE(r.rows[2].min_mssl);
  const auto table = eval::render_table(r);
  EXPECT_NE(table.find("50.0% / 54.5%"), std::string::npos) << table;
}

TEST(Report, WritesCsvJsonAndText) {
  const auto dir = std::filesystem::temp_directory_path() / "noisegan_report_test";
  std::filesystem::remove_all(dir);
  eval::EvalReport r;
  r.rows = {{"toy", "baseline", 2.0, 3.0, "baseline"}, {"toy", "simugan", 1.0, 2.0, "non_parallel", 100}};
  eval::write_report(dir, r);
  std::ifstream csv(dir / "report.csv");
  std::string header, line;
  std::getline(csv, header);
  EXPECT_EQ(header, "dataset,model,mean_lsd,mean_mssl,mode,protocol,epoch,min_lsd,min_mssl");
  std::getline(csv, line);
  std::getline(csv, line);
  EXPECT_EQ(line, "toy,simugan,1.000000,2.000000,non_parallel,best_checkpoint,100,1,1");
  std::ifstream js(dir / "report.json");
  const auto j = nlohmann::json::parse(js);
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.txt"));
  std::filesystem::remove_all(dir);
}

TEST(Harness, IdentityCandidateScoresZero) {
  const PipelineConfig cfg;
  std::vector<eval::EvalPair> pairs;
  for (std::uint64_t s = 0; s < 2; ++s) {
    const auto clean = synth::speech_like(1.0, 16000, s);
    pairs.push_back({"p" + std::to_string(s), clean, clean});
  }
  std::vector<AudioClip> candidates{pairs[0].noisy, pairs[1].noisy};
  const auto m = eval::evaluate_candidates(pairs, candidates, cfg);
  EXPECT_EQ(m.lsd, 0.0);
  EXPECT_EQ(m.mssl, 0.0);
  // loudness alignment makes the score gain-invariant
  for (double& v : candidates[0].samples) v *= 0.25;
  EXPECT_NEAR(eval::evaluate_candidates(pairs, candidates, cfg).mssl, 0.0, 1e-9);
  candidates.pop_back();
  EXPECT_THROW(eval::evaluate_candidates(pairs, candidates, cfg), DataError);
}

TEST(Harness, ScoreCheckpointsUsesLoader) {
  const PipelineConfig cfg;
  const auto clean = synth::speech_like(1.0, 16000, 3);
  const std::vector<eval::EvalPair> pairs{{"a", clean, clean}};
  const std::vector<std::pair<int, std::string>> ckpts{{50, "identity"}, {100, "zero"}};
  auto load = [](const std::string& p) {
    return [p](const Matrix<float>& c) { return p == "identity" ? IdentityTranslator{}(c) : ZeroTranslator{}(c); };
  };
  const auto table = eval::score_checkpoints(ckpts, pairs, load, cfg);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_LT(table[0].scores.mssl, table[1].scores.mssl);
  EXPECT_EQ(eval::select_best(table).epoch, 50);
}

TEST(Config, DefaultsValidateAndRoundTrip) {
  RunConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  EXPECT_EQ(cfg.model.generator_channels(), 64);
  cfg.model.family = "mask_cyclegan";
  EXPECT_EQ(cfg.model.generator_channels(), 128);
  const auto path = std::filesystem::temp_directory_path() / "noisegan_cfg_test.json";
  save_config(path, cfg);
  const auto back = load_config(path);
  EXPECT_EQ(fingerprint(back), fingerprint(cfg));
  std::filesystem::remove(path);
}

TEST(Config, Overrides) {
  const RunConfig base;
  const auto cfg = apply_overrides(base, {"train.epochs=3", "pipeline.component_width=64", "model.family=simugan",
                                          "metrics.mssl_fft_sizes=[256,128]"});
  EXPECT_EQ(cfg.train.epochs, 3);
  EXPECT_EQ(cfg.pipeline.component_width, 64);
  EXPECT_EQ(cfg.model.family, "simugan");
  EXPECT_EQ(cfg.metrics.mssl_fft_sizes, (std::vector<int>{256, 128}));
  EXPECT_NE(fingerprint(cfg), fingerprint(base));
  EXPECT_THROW(apply_overrides(base, {"train.epoch=3"}), ConfigError);
  EXPECT_THROW(apply_overrides(base, {"train.epochs"}), ConfigError);
  EXPECT_THROW(apply_overrides(base, {"train.epochs=\"many\""}), ConfigError);
}

TEST(Config, ValidationRejectsBadValues) {
  RunConfig cfg;
  cfg.model.family = "wavenet";
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = RunConfig{};
  cfg.train.fif_max_band = cfg.pipeline.component_width + 1;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = RunConfig{};
  cfg.dataset.snr_min_db = 20;
  EXPECT_THROW(validate(cfg), ConfigError);
}
