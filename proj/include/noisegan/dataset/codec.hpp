#pragma once

#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "noisegan/audio/clip.hpp"
#include "noisegan/audio/resample.hpp"
#include "noisegan/audio/wav.hpp"
#include "noisegan/baseline/g726.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan::dataset {

// Encode-then-decode through some speech codec.
class CodecClient {
 public:
  virtual ~CodecClient() = default;
  virtual std::string name() const = 0;
  // Native sample rate of the codec.
  virtual int codec_rate() const = 0;
  virtual std::vector<std::int16_t> roundtrip_pcm(const std::vector<std::int16_t>& pcm) const = 0;
};

namespace detail {

inline std::vector<std::int16_t> to_pcm(const std::vector<double>& x) {
  std::vector<std::int16_t> pcm(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pcm[i] = wav::to_pcm16(x[i]);
  return pcm;
}

inline std::vector<double> from_pcm(const std::vector<std::int16_t>& pcm) {
  std::vector<double> x(pcm.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) x[i] = wav::from_pcm16(pcm[i]);
  return x;
}

}  // namespace detail

// Resamples to the codec rate, runs the codec, resamples back and trims or
// zero-pads to the input length.
inline AudioClip apply_codec(const AudioClip& clip, const CodecClient& codec) {
  const auto at_codec_rate = resample(clip.samples, clip.sample_rate, codec.codec_rate());
  const auto coded = detail::from_pcm(codec.roundtrip_pcm(detail::to_pcm(at_codec_rate)));
  auto back = resample(coded, codec.codec_rate(), clip.sample_rate);
  back.resize(clip.size(), 0.0);
  return clip.with_samples(std::move(back));
}

// In-process G.726 at 8 kHz.
class G726Client final : public CodecClient {
 public:
  explicit G726Client(g726::Rate rate = g726::Rate::k32) : rate_(rate) {}
  std::string name() const override { return "g726-" + std::to_string(static_cast<int>(rate_)) + "k"; }
  int codec_rate() const override { return 8000; }
  std::vector<std::int16_t> roundtrip_pcm(const std::vector<std::int16_t>& pcm) const override {
    g726::Encoder enc(rate_);
    g726::Decoder dec(rate_);
    return dec.decode(enc.encode(pcm));
  }

 private:
  g726::Rate rate_;
};

// codec2 through its reference command-line tools (c2enc / c2dec), which read
// and write headerless 8 kHz signed 16-bit PCM.
class Codec2Client final : public CodecClient {
 public:
  static constexpr const char* kEnvVar = "NOISEGAN_CODEC2_DIR";

  explicit Codec2Client(std::filesystem::path bin_dir = {}, int bitrate = 3200)
      : bin_dir_(std::move(bin_dir)), bitrate_(bitrate) {
    if (bin_dir_.empty()) {
      if (const char* env = std::getenv(kEnvVar)) bin_dir_ = env;
    }
  }

  std::string name() const override { return "codec2-" + std::to_string(bitrate_); }
  int codec_rate() const override { return 8000; }

  std::filesystem::path tool(const std::string& name) const {
    if (!bin_dir_.empty()) return bin_dir_ / name;
    return name;
  }

  bool available() const {
    if (bin_dir_.empty()) return std::system("command -v c2enc >/dev/null 2>&1 && command -v c2dec >/dev/null 2>&1") == 0;
    return std::filesystem::exists(tool("c2enc")) && std::filesystem::exists(tool("c2dec"));
  }

  std::vector<std::int16_t> roundtrip_pcm(const std::vector<std::int16_t>& pcm) const override {
    if (!available()) {
      throw EnvironmentError(
          "codec2 tools c2enc/c2dec not found; install codec2 (https://github.com/drowe67/codec2) and put them on "
          "PATH or set " + std::string(kEnvVar) + " to their directory");
    }
    const auto dir = std::filesystem::temp_directory_path() /
                     ("noisegan-codec2-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
    const auto raw_in = dir / "in.raw", bits = dir / "out.c2", raw_out = dir / "out.raw";
    {
      std::ofstream f(raw_in, std::ios::binary);
      f.write(reinterpret_cast<const char*>(pcm.data()), static_cast<std::streamsize>(pcm.size() * 2));
    }
    const std::string mode = std::to_string(bitrate_);
    const std::string enc = tool("c2enc").string() + " " + mode + " '" + raw_in.string() + "' '" + bits.string() + "'";
    const std::string dec = tool("c2dec").string() + " " + mode + " '" + bits.string() + "' '" + raw_out.string() + "'";
    if (std::system((enc + " >/dev/null 2>&1").c_str()) != 0 || std::system((dec + " >/dev/null 2>&1").c_str()) != 0) {
      std::filesystem::remove_all(dir);
      throw EnvironmentError("codec2 invocation failed: " + enc);
    }
    std::ifstream f(raw_out, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    std::filesystem::remove_all(dir);
    std::vector<std::int16_t> out(bytes.size() / 2);
    std::memcpy(out.data(), bytes.data(), out.size() * 2);
    return out;
  }

 private:
  std::filesystem::path bin_dir_;
  int bitrate_;
};

inline std::unique_ptr<CodecClient> make_codec_client(const std::string& name, const std::filesystem::path& bin_dir = {}) {
  if (name == "codec2") return std::make_unique<Codec2Client>(bin_dir);
  if (name.rfind("g726", 0) == 0) {
    return std::make_unique<G726Client>(name == "g726" ? g726::Rate::k32 : g726::rate_from_string(name.substr(4)));
  }
  throw ConfigError("unknown codec '" + name + "' (use codec2 or g726[-16|-24|-32|-40])");
}

}  // namespace noisegan::dataset
