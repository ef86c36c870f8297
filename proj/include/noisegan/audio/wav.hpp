#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "noisegan/audio/clip.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan::wav {

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF), char((v >> 24) & 0xFF)};
  os.write(b, 4);
}
inline void put_u16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {char(v & 0xFF), char((v >> 8) & 0xFF)};
  os.write(b, 2);
}

}  // namespace detail

inline std::int16_t to_pcm16(double v) {
  const double s = std::round(std::clamp(v, -1.0, 1.0) * 32767.0);
  return static_cast<std::int16_t>(s);
}

inline double from_pcm16(std::int16_t v) { return static_cast<double>(v) / 32768.0; }

// Reads a PCM WAV file. 16-bit integer PCM is the supported format; multichannel
// input is downmixed to mono by averaging.
inline AudioClip read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError("not a RIFF/WAVE file: " + path.string());
  }
  std::size_t pos = 12;
  int channels = 0, rate = 0, bits = 0, format = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  while (pos + 8 <= bytes.size()) {
    const auto len = detail::read_u32(&bytes[pos + 4]);
    const unsigned char* body = &bytes[pos + 8];
    const std::size_t avail = std::min<std::size_t>(len, bytes.size() - pos - 8);
    if (std::memcmp(&bytes[pos], "fmt ", 4) == 0 && avail >= 16) {
      format = detail::read_u16(body);
      channels = detail::read_u16(body + 2);
      rate = static_cast<int>(detail::read_u32(body + 4));
      bits = detail::read_u16(body + 14);
    } else if (std::memcmp(&bytes[pos], "data", 4) == 0) {
      data = body;
      data_len = avail;
    }
    pos += 8 + len + (len & 1);
  }
  if (format != 1 || bits != 16) throw IoError("only 16-bit integer PCM WAV is supported: " + path.string());
  if (channels <= 0 || rate <= 0 || data == nullptr) throw IoError("malformed WAV header: " + path.string());

  const std::size_t frames = data_len / (2 * static_cast<std::size_t>(channels));
  AudioClip clip;
  clip.sample_rate = rate;
  clip.clip_id = path.stem().string();
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const auto raw = static_cast<std::int16_t>(detail::read_u16(data + 2 * (i * channels + c)));
      acc += from_pcm16(raw);
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

// Writes 16-bit mono PCM. Samples outside [-1, 1] are clipped.
inline void write(const std::filesystem::path& path, const AudioClip& clip) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write WAV file: " + path.string());
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out.write("RIFF", 4);
  detail::put_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);
  detail::put_u16(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate * 2));
  detail::put_u16(out, 2);
  detail::put_u16(out, 16);
  out.write("data", 4);
  detail::put_u32(out, data_bytes);
  for (double s : clip.samples) detail::put_u16(out, static_cast<std::uint16_t>(to_pcm16(s)));
  if (!out) throw IoError("short write: " + path.string());
}

}  // namespace noisegan::wav
