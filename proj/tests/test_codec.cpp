#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "noisegan/audio/synth.hpp"
#include "noisegan/baseline/baseline.hpp"
#include "noisegan/baseline/g711.hpp"
#include "noisegan/metrics.hpp"

using namespace noisegan;

namespace {

const std::filesystem::path kData = std::filesystem::path(NOISEGAN_TEST_DATA) / "g726_libavcodec";

template <typename T>
std::vector<T> read_raw(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<T> out(bytes.size() / sizeof(T));
  std::memcpy(out.data(), bytes.data(), out.size() * sizeof(T));
  return out;
}

struct RateCase {
  int kbps;
  const char* tag;
};

class LibavcodecReference : public ::testing::TestWithParam<RateCase> {};

}  // namespace

TEST_P(LibavcodecReference, EncoderCodesMatch) {
  const auto [kbps, tag] = GetParam();
  const auto input = read_raw<std::int16_t>(kData / "input_8k_s16le.raw");
  const auto expected = read_raw<std::uint8_t>(kData / ("codes_" + std::string(tag) + ".u8"));
  ASSERT_EQ(input.size(), expected.size());
  g726::Encoder enc(g726::rate_from_kbps(kbps), g726::Law::linear, g726::ScaleMix::floor);
  const auto codes = enc.encode(input);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) mismatches += codes[i] != expected[i];
  EXPECT_EQ(mismatches, 0u);
}

TEST_P(LibavcodecReference, DecoderSamplesMatch) {
  const auto [kbps, tag] = GetParam();
  const auto codes = read_raw<std::uint8_t>(kData / ("codes_" + std::string(tag) + ".u8"));
  const auto expected = read_raw<std::int16_t>(kData / ("decoded_" + std::string(tag) + "_s16le.raw"));
  ASSERT_EQ(codes.size(), expected.size());
  g726::Decoder dec(g726::rate_from_kbps(kbps), g726::Law::linear, g726::ScaleMix::floor);
  const auto pcm = dec.decode(codes);
  std::size_t compared = 0, mismatches = 0;
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    if (pcm[i] == 32767 || pcm[i] == -32768) continue;  // the reference wraps instead
    ++compared;
    mismatches += pcm[i] != expected[i];
  }
  EXPECT_GT(compared, pcm.size() * 9 / 10);
  EXPECT_EQ(mismatches, 0u);
}

INSTANTIATE_TEST_SUITE_P(Rates, LibavcodecReference,
                         ::testing::Values(RateCase{16, "16k"}, RateCase{24, "24k"}, RateCase{32, "32k"}),
                         [](const auto& info) { return std::string("k") + std::to_string(info.param.kbps); });

TEST(G726, RateParsing) {
  EXPECT_EQ(g726::rate_from_string("32k"), g726::Rate::k32);
  EXPECT_EQ(g726::rate_from_string("g726-16"), g726::Rate::k16);
  EXPECT_THROW(g726::rate_from_string("48k"), ConfigError);
  EXPECT_THROW(g726::rate_from_string("fast"), ConfigError);
}

TEST(G726, RoundTripTracksInput) {
  const auto clip = synth::speech_like(1.0, 8000, 3);
  std::vector<std::int16_t> pcm(clip.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = static_cast<std::int16_t>(clip.samples[i] * 3 * 32767);
  g726::Encoder enc;
  g726::Decoder dec;
  const auto out = dec.decode(enc.encode(pcm));
  std::vector<double> a(pcm.begin(), pcm.end()), b(out.begin(), out.end());
  EXPECT_GT(metrics::si_snr_db(a, b), 15.0);
}

TEST(G726, SilenceStaysQuiet) {
  std::vector<std::int16_t> zeros(4000, 0);
  g726::Encoder enc;
  g726::Decoder dec;
  for (auto v : dec.decode(enc.encode(zeros))) EXPECT_LE(std::abs(static_cast<int>(v)), 8);
}

TEST(G726, DeterministicAfterReset) {
  const auto clip = synth::speech_like(0.5, 8000, 4);
  std::vector<std::int16_t> pcm(clip.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = static_cast<std::int16_t>(clip.samples[i] * 32767);
  g726::Encoder enc(g726::Rate::k40);
  const auto first = enc.encode(pcm);
  enc.reset();
  EXPECT_EQ(enc.encode(pcm), first);
}

TEST(G711, RoundTripWithinSegmentStep) {
  for (int v = -32768; v < 32768; v += 37) {
    const int a = g711::alaw_to_linear(g711::linear_to_alaw(v));
    const int u = g711::ulaw_to_linear(g711::linear_to_ulaw(v));
    // largest quantization step is 1024 (A-law) and 2048 (mu-law) at full scale
    ASSERT_LE(std::abs(a - v), 1024) << v;
    ASSERT_LE(std::abs(u - v), 2048 + 132) << v;
  }
}

TEST(Aggregate, LengthOrderAndCrossfade) {
  std::vector<AudioClip> clips;
  for (int i = 0; i < 3; ++i) clips.push_back(AudioClip{std::vector<double>(1000, i + 1.0), 16000, "", ""});
  std::mt19937_64 rng(5);
  const auto agg = baseline::aggregate_noise(clips, 5000, 100, rng);
  ASSERT_EQ(agg.size(), 5000u);
  // every value is a level or an equal-power blend of two levels
  for (double v : agg.samples) {
    ASSERT_GE(v, 1.0 - 1e-12);
    ASSERT_LE(v, 3.0 * std::sqrt(2.0) + 1e-12);
  }
  std::mt19937_64 rng2(5);
  EXPECT_EQ(baseline::aggregate_noise(clips, 5000, 100, rng2).samples, agg.samples);
  std::mt19937_64 rng3(6);
  EXPECT_THROW(baseline::aggregate_noise(std::span<const AudioClip>{}, 10, 0, rng3), DataError);
}

TEST(Baseline, DeterministicUnderSeed) {
  const auto clean = synth::speech_like(1.0, 16000, 8);
  std::vector<AudioClip> noise{AudioClip{synth::white_noise(8000, 1, 0.1), 16000, "", "n1"},
                               AudioClip{synth::modulated_noise(12000, 16000, 2), 16000, "", "n2"}};
  const baseline::BaselineConfig cfg;
  std::mt19937_64 a(9), b(9), c(10);
  const auto x = baseline::baseline_simulate(clean, noise, 5.0, cfg, a);
  const auto y = baseline::baseline_simulate(clean, noise, 5.0, cfg, b);
  const auto z = baseline::baseline_simulate(clean, noise, 5.0, cfg, c);
  EXPECT_EQ(x.samples, y.samples);
  EXPECT_NE(x.samples, z.samples);
  EXPECT_EQ(x.size(), clean.size());
  EXPECT_EQ(x.sample_rate, clean.sample_rate);
}

TEST(Codec, G726ClientKeepsLengthAndRate) {
  const auto clip = synth::speech_like(1.3, 16000, 2);
  const auto out = dataset::apply_codec(clip, dataset::G726Client());
  EXPECT_EQ(out.size(), clip.size());
  EXPECT_EQ(out.sample_rate, 16000);
  EXPECT_GT(metrics::si_snr_db(clip.samples, out.samples), 5.0);
}

TEST(Codec, UnknownCodecIsConfigError) {
  EXPECT_THROW(dataset::make_codec_client("opus-ish"), ConfigError);
}
