#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisegan/core/error.hpp"

namespace noisegan::dataset {

enum class NoiseType { uhf_vhf, stationary, non_stationary, codec };
enum class Mode { parallel, non_parallel };

inline std::string to_string(NoiseType t) {
  switch (t) {
    case NoiseType::uhf_vhf: return "uhf_vhf";
    case NoiseType::stationary: return "stationary";
    case NoiseType::non_stationary: return "non_stationary";
    case NoiseType::codec: return "codec";
  }
  return "?";
}

inline NoiseType noise_type_from_string(const std::string& s) {
  if (s == "uhf_vhf") return NoiseType::uhf_vhf;
  if (s == "stationary") return NoiseType::stationary;
  if (s == "non_stationary") return NoiseType::non_stationary;
  if (s == "codec") return NoiseType::codec;
  throw ConfigError("unknown noise type '" + s + "' (uhf_vhf, stationary, non_stationary, codec)");
}

inline std::string to_string(Mode m) { return m == Mode::parallel ? "parallel" : "non_parallel"; }

inline Mode mode_from_string(const std::string& s) {
  if (s == "parallel") return Mode::parallel;
  if (s == "non_parallel") return Mode::non_parallel;
  throw ConfigError("unknown mode '" + s + "' (parallel, non_parallel)");
}

// Speaker-disjoint splits are required for corpora built by mixing or coding
// clean speech; the radio corpus is taken as recorded.
inline bool requires_speaker_disjointness(NoiseType t) { return t != NoiseType::uhf_vhf; }

// One source utterance. noisy_path is set when the corpus already ships the
// noisy recording.
struct Utterance {
  std::string id;
  std::string speaker;
  std::string clean_path;
  std::optional<std::string> noisy_path;
  double duration = 0.0;
};

// One manifest line.
//   domain "pair":  path = clean, pair_path = aligned noisy twin
//   domain "clean": path = clean, no pair (non-parallel training pool)
//   domain "noisy": path = noisy, no pair (non-parallel training pool)
// source_path names the clean recording a generated noisy file is made from.
struct ManifestRecord {
  std::string split;
  std::string domain;
  std::string path;
  std::optional<std::string> pair_path;
  std::optional<std::string> source_path;
  std::string speaker;
  double duration = 0.0;
  NoiseType noise_type = NoiseType::stationary;
  Mode mode = Mode::parallel;
  std::string utterance_id;

  bool operator==(const ManifestRecord&) const = default;
};

struct SplitTargets {
  double train_seconds = 180.0;
  double val_seconds = 100.0;
  double test_seconds = 200.0;
  double tolerance = 0.2;
};

struct SplitManifest {
  Mode mode = Mode::parallel;
  NoiseType noise_type = NoiseType::stationary;
  std::vector<ManifestRecord> records;

  std::vector<ManifestRecord> split(const std::string& name) const {
    std::vector<ManifestRecord> out;
    for (const auto& r : records) {
      if (r.split == name) out.push_back(r);
    }
    return out;
  }

  std::vector<ManifestRecord> split(const std::string& name, const std::string& domain) const {
    std::vector<ManifestRecord> out;
    for (const auto& r : records) {
      if (r.split == name && r.domain == domain) out.push_back(r);
    }
    return out;
  }

  std::set<std::string> speakers(const std::string& name) const {
    std::set<std::string> out;
    for (const auto& r : records) {
      if (r.split == name) out.insert(r.speaker);
    }
    return out;
  }

  double duration(const std::string& name, const std::string& domain) const {
    double d = 0.0;
    for (const auto& r : records) {
      if (r.split == name && r.domain == domain) d += r.duration;
    }
    return d;
  }
};

inline const std::vector<std::string>& split_names() {
  static const std::vector<std::string> names{"train", "val", "test"};
  return names;
}

namespace detail {

inline std::string noisy_target(const std::filesystem::path& out_dir, const std::string& split, const Utterance& u) {
  return (out_dir / "noisy" / split / (u.speaker + "_" + u.id + ".wav")).string();
}

// Picks utterances (already shuffled) until `target` seconds are reached,
// skipping ones that would overshoot the tolerance band while others remain.
inline std::vector<Utterance> take(std::vector<Utterance>& pool, double target, double tolerance) {
  std::vector<Utterance> chosen;
  double total = 0.0;
  const double ceiling = target * (1.0 + tolerance);
  for (auto it = pool.begin(); it != pool.end() && total < target;) {
    if (total + it->duration > ceiling) {
      ++it;
      continue;
    }
    total += it->duration;
    chosen.push_back(*it);
    it = pool.erase(it);
  }
  return chosen;
}

inline double total_duration(const std::vector<Utterance>& v) {
  double d = 0.0;
  for (const auto& u : v) d += u.duration;
  return d;
}

}  // namespace detail

// Builds train/val/test splits. Speakers are assigned whole to one split when
// the noise type calls for disjointness. In non-parallel mode the training
// clean and noisy pools come from different utterances; validation and test
// are always paired because scoring needs the true noisy twin.
inline SplitManifest build_splits(std::vector<Utterance> corpus, NoiseType noise_type, Mode mode,
                                  const SplitTargets& targets, std::uint64_t seed,
                                  const std::filesystem::path& out_dir) {
  if (corpus.empty()) throw DataError("source corpus is empty");
  std::mt19937_64 rng(seed);
  const bool disjoint = requires_speaker_disjointness(noise_type);
  const double train_need = targets.train_seconds * (mode == Mode::non_parallel ? 2.0 : 1.0);

  std::map<std::string, std::vector<Utterance>> by_speaker;
  for (auto& u : corpus) {
    if (noise_type == NoiseType::uhf_vhf && !u.noisy_path) {
      throw DataError("utterance '" + u.id + "' has no recorded noisy counterpart (required for uhf_vhf)");
    }
    by_speaker[u.speaker].push_back(u);
  }
  std::vector<std::string> speakers;
  for (auto& [name, utts] : by_speaker) {
    speakers.push_back(name);
    std::sort(utts.begin(), utts.end(), [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  }
  std::shuffle(speakers.begin(), speakers.end(), rng);

  const std::vector<std::pair<std::string, double>> needs{
      {"test", targets.test_seconds}, {"val", targets.val_seconds}, {"train", train_need}};
  std::map<std::string, std::vector<Utterance>> pools;
  bool speaker_level = true;
  {
    std::size_t next = 0;
    for (const auto& [split, need] : needs) {
      double have = 0.0;
      while (have < need && next < speakers.size()) {
        auto& utts = by_speaker[speakers[next++]];
        for (auto& u : utts) pools[split].push_back(u);
        have += detail::total_duration(utts);
      }
      if (have < need) {
        speaker_level = false;
        if (disjoint) {
          std::ostringstream msg;
          msg << "insufficient speaker-disjoint data for split '" << split << "': need " << need << " s, have "
              << have << " s (shortfall " << need - have << " s)";
          throw DataError(msg.str());
        }
      }
    }
  }
  if (!speaker_level) {
    // utterance-level fallback, only reachable when disjointness is not required
    pools.clear();
    std::vector<Utterance> all;
    for (const auto& s : speakers) {
      for (auto& u : by_speaker[s]) all.push_back(u);
    }
    std::shuffle(all.begin(), all.end(), rng);
    for (const auto& [split, need] : needs) {
      double have = 0.0;
      while (have < need && !all.empty()) {
        have += all.back().duration;
        pools[split].push_back(all.back());
        all.pop_back();
      }
      if (have < need) {
        std::ostringstream msg;
        msg << "insufficient data for split '" << split << "': shortfall " << need - have << " s";
        throw DataError(msg.str());
      }
    }
  }

  SplitManifest manifest{mode, noise_type, {}};
  auto emit = [&](const std::string& split, const std::string& domain, const Utterance& u) {
    ManifestRecord r;
    r.split = split;
    r.domain = domain;
    r.speaker = u.speaker;
    r.duration = u.duration;
    r.noise_type = noise_type;
    r.mode = mode;
    r.utterance_id = u.id;
    const std::string noisy = u.noisy_path ? *u.noisy_path : detail::noisy_target(out_dir, split, u);
    if (!u.noisy_path) r.source_path = u.clean_path;
    if (domain == "pair") {
      r.path = u.clean_path;
      r.pair_path = noisy;
    } else if (domain == "clean") {
      r.path = u.clean_path;
      r.source_path.reset();
    } else {
      r.path = noisy;
    }
    manifest.records.push_back(std::move(r));
  };

  auto check = [&](const std::string& split, const std::string& domain, double got, double want) {
    if (std::abs(got - want) > targets.tolerance * want) {
      std::ostringstream msg;
      msg << "split '" << split << "' (" << domain << ") reached " << got << " s, target " << want << " s +/- "
          << targets.tolerance * 100 << "%";
      throw DataError(msg.str());
    }
  };

  for (const auto& [split, need] : needs) {
    auto pool = pools[split];
    std::shuffle(pool.begin(), pool.end(), rng);
    const double target = split == "train" ? targets.train_seconds : need;
    if (split == "train" && mode == Mode::non_parallel) {
      auto clean = detail::take(pool, target, targets.tolerance);
      auto noisy = detail::take(pool, target, targets.tolerance);
      check(split, "clean", detail::total_duration(clean), target);
      check(split, "noisy", detail::total_duration(noisy), target);
      for (const auto& u : clean) emit(split, "clean", u);
      for (const auto& u : noisy) emit(split, "noisy", u);
    } else {
      auto chosen = detail::take(pool, target, targets.tolerance);
      check(split, "pair", detail::total_duration(chosen), target);
      for (const auto& u : chosen) emit(split, "pair", u);
    }
  }
  return manifest;
}

// Problems found in a manifest; empty when it satisfies every invariant.
inline std::vector<std::string> manifest_problems(const SplitManifest& m, const SplitTargets& targets) {
  std::vector<std::string> problems;
  auto near = [&](double got, double want) { return std::abs(got - want) <= targets.tolerance * want; };
  for (const auto& r : m.records) {
    if (r.domain == "pair" && !r.pair_path) problems.push_back("pair record without noisy twin: " + r.path);
    if (m.mode == Mode::parallel && r.domain != "pair") problems.push_back("unpaired record in parallel manifest");
  }
  if (m.mode == Mode::parallel) {
    if (!near(m.duration("train", "pair"), targets.train_seconds)) problems.push_back("train duration out of tolerance");
  } else {
    if (!near(m.duration("train", "clean"), targets.train_seconds)) problems.push_back("train clean pool out of tolerance");
    if (!near(m.duration("train", "noisy"), targets.train_seconds)) problems.push_back("train noisy pool out of tolerance");
    std::set<std::string> clean_ids, noisy_ids;
    for (const auto& r : m.split("train", "clean")) clean_ids.insert(r.utterance_id + "@" + r.speaker);
    for (const auto& r : m.split("train", "noisy")) {
      if (clean_ids.count(r.utterance_id + "@" + r.speaker)) problems.push_back("utterance in both training pools");
    }
  }
  if (!near(m.duration("val", "pair"), targets.val_seconds)) problems.push_back("val duration out of tolerance");
  if (!near(m.duration("test", "pair"), targets.test_seconds)) problems.push_back("test duration out of tolerance");
  if (requires_speaker_disjointness(m.noise_type)) {
    const auto& names = split_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        const auto a = m.speakers(names[i]);
        const auto b = m.speakers(names[j]);
        std::vector<std::string> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        if (!common.empty()) problems.push_back("speakers shared between " + names[i] + " and " + names[j]);
      }
    }
  }
  return problems;
}

// Line-delimited JSON, one record per line.
inline void write_manifest(const std::filesystem::path& path, const SplitManifest& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  for (const auto& r : m.records) {
    nlohmann::ordered_json j;
    j["split"] = r.split;
    j["domain"] = r.domain;
    j["path"] = r.path;
    j["pair_path"] = r.pair_path ? nlohmann::ordered_json(*r.pair_path) : nlohmann::ordered_json(nullptr);
    j["source_path"] = r.source_path ? nlohmann::ordered_json(*r.source_path) : nlohmann::ordered_json(nullptr);
    j["speaker"] = r.speaker;
    j["duration"] = r.duration;
    j["noise_type"] = to_string(r.noise_type);
    j["mode"] = to_string(r.mode);
    j["utterance_id"] = r.utterance_id;
    out << j.dump() << "\n";
  }
}

inline SplitManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  SplitManifest m;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    ManifestRecord r;
    r.split = j.at("split");
    r.domain = j.at("domain");
    r.path = j.at("path");
    if (!j.at("pair_path").is_null()) r.pair_path = j.at("pair_path").get<std::string>();
    if (j.contains("source_path") && !j.at("source_path").is_null()) r.source_path = j.at("source_path").get<std::string>();
    r.speaker = j.at("speaker");
    r.duration = j.at("duration");
    r.noise_type = noise_type_from_string(j.at("noise_type"));
    r.mode = mode_from_string(j.at("mode"));
    r.utterance_id = j.value("utterance_id", "");
    if (first) {
      m.mode = r.mode;
      m.noise_type = r.noise_type;
      first = false;
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace noisegan::dataset
