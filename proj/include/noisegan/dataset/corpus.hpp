#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "noisegan/audio/clip.hpp"
#include "noisegan/audio/resample.hpp"
#include "noisegan/audio/synth.hpp"
#include "noisegan/audio/wav.hpp"
#include "noisegan/core/hash.hpp"
#include "noisegan/dataset/codec.hpp"
#include "noisegan/dataset/mix.hpp"
#include "noisegan/dataset/splits.hpp"

namespace noisegan::dataset {

namespace fs = std::filesystem;

inline std::vector<fs::path> wav_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Scans a source corpus. Two layouts are accepted:
//   <root>/<speaker>/<utterance>.wav                      clean speech only
//   <root>/clean/<speaker>/<utt>.wav + <root>/noisy/<speaker>/<utt>.wav
// The second form supplies recorded noisy twins (radio-channel corpora).
inline std::vector<Utterance> scan_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw DataError("corpus directory not found: " + root.string() +
                    " (expected <root>/<speaker>/<utt>.wav or <root>/clean|noisy/<speaker>/<utt>.wav)");
  }
  const bool paired = fs::is_directory(root / "clean") && fs::is_directory(root / "noisy");
  const fs::path clean_root = paired ? root / "clean" : root;
  std::vector<Utterance> out;
  for (const auto& p : wav_files(clean_root)) {
    const auto rel = fs::relative(p, clean_root);
    if (rel.begin() == rel.end() || std::next(rel.begin()) == rel.end()) continue;  // needs a speaker folder
    Utterance u;
    u.speaker = rel.begin()->string();
    u.id = p.stem().string();
    u.clean_path = p.string();
    const AudioClip clip = wav::read(p);
    u.duration = clip.duration_seconds();
    if (paired) {
      const fs::path twin = root / "noisy" / rel;
      if (!fs::exists(twin)) throw DataError("no noisy twin for " + p.string() + " (expected " + twin.string() + ")");
      u.noisy_path = twin.string();
    }
    out.push_back(std::move(u));
  }
  if (out.empty()) throw DataError("no <speaker>/<utterance>.wav files under " + clean_root.string());
  return out;
}

inline std::vector<AudioClip> load_noise_clips(const fs::path& dir, int sample_rate) {
  std::vector<AudioClip> out;
  for (const auto& p : wav_files(dir)) {
    AudioClip c = wav::read(p);
    if (c.sample_rate != sample_rate) c = resample(c, sample_rate);
    c.clip_id = p.stem().string();
    out.push_back(std::move(c));
  }
  if (out.empty()) throw DataError("no noise .wav files under " + dir.string());
  return out;
}

struct MaterializeOptions {
  int sample_rate = 16000;
  double snr_min_db = 0.0;
  double snr_max_db = 10.0;
  std::uint64_t seed = 0;
};

// Stable per-record seed so outputs do not depend on processing order.
inline std::uint64_t record_seed(std::uint64_t seed, const ManifestRecord& r) {
  return seed ^ fnv1a(r.speaker + "/" + r.utterance_id);
}

// Writes every generated noisy file a manifest refers to: noise mixing at an
// SNR drawn from [snr_min, snr_max] for the noise types, codec round trip for
// the codec type. Recorded noisy files are left alone.
inline std::size_t materialize(const SplitManifest& m, std::span<const AudioClip> noise_clips,
                               const CodecClient* codec, const MaterializeOptions& opt) {
  std::size_t written = 0;
  for (const auto& r : m.records) {
    if (!r.source_path) continue;
    const fs::path target = r.domain == "pair" ? fs::path(*r.pair_path) : fs::path(r.path);
    AudioClip clean = wav::read(*r.source_path);
    if (clean.sample_rate != opt.sample_rate) clean = resample(clean, opt.sample_rate);
    std::mt19937_64 rng(record_seed(opt.seed, r));
    AudioClip noisy;
    if (m.noise_type == NoiseType::codec) {
      if (!codec) throw EnvironmentError("codec corpus requested but no codec client configured");
      noisy = apply_codec(clean, *codec);
    } else {
      if (noise_clips.empty()) throw DataError("noise corpus requested but no noise clips were loaded");
      std::uniform_int_distribution<std::size_t> pick(0, noise_clips.size() - 1);
      std::uniform_real_distribution<double> snr(opt.snr_min_db, opt.snr_max_db);
      const auto& noise = noise_clips[pick(rng)];
      noisy = mix_noise(clean, noise, snr(rng), rng);
    }
    fs::create_directories(target.parent_path());
    wav::write(target, noisy);
    ++written;
  }
  return written;
}

struct ToyCorpusOptions {
  int speakers = 12;
  int utterances_per_speaker = 14;
  double utterance_seconds = 5.0;
  int sample_rate = 16000;
  std::uint64_t seed = 0;
};

// Synthetic stand-in for the licensed corpora:
//   speech/<speaker>/<utt>.wav           clean speech-like clips
//   noise/stationary/*.wav               steady broadband noise
//   noise/non_stationary/*.wav           rotor-modulated noise
//   radio/clean|noisy/<speaker>/<utt>.wav band-limited noisy twins
inline void make_toy_corpus(const fs::path& root, const ToyCorpusOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> f0(90.0, 230.0);
  const int sr = opt.sample_rate;
  for (int s = 0; s < opt.speakers; ++s) {
    char spk[16];
    std::snprintf(spk, sizeof spk, "spk%02d", s);
    const double base_f0 = f0(rng);
    for (int u = 0; u < opt.utterances_per_speaker; ++u) {
      char utt[16];
      std::snprintf(utt, sizeof utt, "u%02d", u);
      const std::uint64_t seed = opt.seed * 1000003ull + static_cast<std::uint64_t>(s * 1000 + u);
      AudioClip clean = synth::speech_like(opt.utterance_seconds, sr, seed, base_f0);
      fs::create_directories(root / "speech" / spk);
      wav::write(root / "speech" / spk / (std::string(utt) + ".wav"), clean);

      // radio channel: crude band limit, hiss and a slow fade
      std::vector<double> radio(clean.size());
      const auto hiss = synth::white_noise(clean.size(), seed ^ 0xabcdefull, 0.01);
      double hp = 0.0, lp = 0.0, prev = 0.0;
      for (std::size_t i = 0; i < radio.size(); ++i) {
        hp = 0.95 * (hp + clean.samples[i] - prev);
        prev = clean.samples[i];
        lp = 0.6 * lp + 0.4 * hp;
        const double fade = 0.8 + 0.2 * std::sin(2 * std::numbers::pi * 0.3 * static_cast<double>(i) / sr);
        radio[i] = std::clamp(1.5 * lp * fade + hiss[i], -1.0, 1.0);
      }
      fs::create_directories(root / "radio" / "clean" / spk);
      fs::create_directories(root / "radio" / "noisy" / spk);
      wav::write(root / "radio" / "clean" / spk / (std::string(utt) + ".wav"), clean);
      wav::write(root / "radio" / "noisy" / spk / (std::string(utt) + ".wav"), clean.with_samples(std::move(radio)));
    }
  }
  fs::create_directories(root / "noise" / "stationary");
  fs::create_directories(root / "noise" / "non_stationary");
  for (int i = 0; i < 3; ++i) {
    const auto n = static_cast<std::size_t>(20.0 * sr);
    auto w = synth::white_noise(n, opt.seed + 17 + i, 0.1);
    wav::write(root / "noise" / "stationary" / ("cabin" + std::to_string(i) + ".wav"), AudioClip{w, sr, "", ""});
    auto m = synth::modulated_noise(n, sr, opt.seed + 31 + i, 10.0 + 4.0 * i);
    for (double& v : m) v *= 0.3;
    wav::write(root / "noise" / "non_stationary" / ("rotor" + std::to_string(i) + ".wav"), AudioClip{m, sr, "", ""});
  }
}

}  // namespace noisegan::dataset
