#pragma once

#include <cstdint>

// ITU-T G.711 companding on 16-bit linear samples (A-law keeps 13 significant
// bits, mu-law 14).
namespace noisegan::g711 {

namespace detail {
inline int segment(int value, const int* ends) {
  for (int i = 0; i < 8; ++i) {
    if (value <= ends[i]) return i;
  }
  return 8;
}
constexpr int kSegAEnd[8] = {0x1F, 0x3F, 0x7F, 0xFF, 0x1FF, 0x3FF, 0x7FF, 0xFFF};
constexpr int kSegUEnd[8] = {0x3F, 0x7F, 0xFF, 0x1FF, 0x3FF, 0x7FF, 0xFFF, 0x1FFF};
constexpr int kBias = 0x84;
constexpr int kClip = 8159;
}  // namespace detail

inline std::uint8_t linear_to_alaw(int pcm) {
  int value = pcm >> 3;
  int mask;
  if (value >= 0) {
    mask = 0xD5;
  } else {
    mask = 0x55;
    value = -value - 1;
  }
  const int seg = detail::segment(value, detail::kSegAEnd);
  if (seg >= 8) return static_cast<std::uint8_t>(0x7F ^ mask);
  int aval = seg << 4;
  aval |= (seg < 2) ? (value >> 1) & 0x0F : (value >> seg) & 0x0F;
  return static_cast<std::uint8_t>(aval ^ mask);
}

inline std::int16_t alaw_to_linear(std::uint8_t code) {
  const int a = code ^ 0x55;
  int t = (a & 0x0F) << 4;
  const int seg = (a & 0x70) >> 4;
  switch (seg) {
    case 0: t += 8; break;
    case 1: t += 0x108; break;
    default: t += 0x108; t <<= seg - 1;
  }
  return static_cast<std::int16_t>((a & 0x80) ? t : -t);
}

inline std::uint8_t linear_to_ulaw(int pcm) {
  int value = pcm >> 2;
  int mask;
  if (value < 0) {
    value = -value;
    mask = 0x7F;
  } else {
    mask = 0xFF;
  }
  if (value > detail::kClip) value = detail::kClip;
  value += detail::kBias >> 2;
  const int seg = detail::segment(value, detail::kSegUEnd);
  if (seg >= 8) return static_cast<std::uint8_t>(0x7F ^ mask);
  const int uval = (seg << 4) | ((value >> (seg + 1)) & 0x0F);
  return static_cast<std::uint8_t>(uval ^ mask);
}

inline std::int16_t ulaw_to_linear(std::uint8_t code) {
  const int u = ~code & 0xFF;
  int t = ((u & 0x0F) << 3) + detail::kBias;
  t <<= (u & 0x70) >> 4;
  return static_cast<std::int16_t>((u & 0x80) ? (detail::kBias - t) : (t - detail::kBias));
}

}  // namespace noisegan::g711
