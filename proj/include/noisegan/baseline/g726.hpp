#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisegan/baseline/g711.hpp"
#include "noisegan/core/error.hpp"

// ITU-T G.726 ADPCM at 16, 24, 32 and 40 kbit/s, with the uniform-PCM and the
// G.711 (A-law / mu-law) interfaces including synchronous coding adjustment.
// Integer arithmetic follows the block descriptions of the recommendation:
// 16-bit wraparound in the adders, 4-bit-exponent/6-bit-mantissa floating
// values in the predictor, and the same state recurrences at encoder and
// decoder.
namespace noisegan::g726 {

enum class Rate { k16 = 16, k24 = 24, k32 = 32, k40 = 40 };
enum class Law { linear, alaw, ulaw };

// How the fast/slow scale factor mix is rounded. `sign_magnitude` is the
// recommendation's MIX block; `floor` reproduces libavcodec's two's-complement
// variant and exists so that implementation can serve as a cross-check.
enum class ScaleMix { sign_magnitude, floor };

inline Rate rate_from_kbps(int kbps) {
  switch (kbps) {
    case 16: return Rate::k16;
    case 24: return Rate::k24;
    case 32: return Rate::k32;
    case 40: return Rate::k40;
    default: throw ConfigError("unsupported G.726 rate " + std::to_string(kbps) + " kbit/s (use 16, 24, 32 or 40)");
  }
}

// Accepts "32k", "32", "g726-32" and similar.
inline Rate rate_from_string(const std::string& s) {
  std::string_view rest(s);
  if (rest.rfind("g726", 0) == 0) rest.remove_prefix(4);
  std::string digits;
  for (char c : rest) {
    if (c >= '0' && c <= '9') digits += c;
  }
  if (digits.empty()) throw ConfigError("unsupported G.726 mode '" + s + "'");
  return rate_from_kbps(std::stoi(digits));
}

// Quantizer and adaptation tables for one bit rate.
struct RateTables {
  int bits;
  int states;  // quantizer output states; odd counts have no zero code
  std::vector<int> decision;  // quantizer decision levels (log domain)
  std::vector<int> dqln;      // reconstruction levels, indexed by code
  std::vector<int> wi;        // scale factor multipliers (<< 5 relative to the ITU table)
  std::vector<int> fi;        // rate-of-change function values
};

inline const RateTables& tables(Rate rate) {
  static const RateTables t16{2, 4, {261}, {116, 365, 365, 116}, {-704, 14048, 14048, -704}, {0x000, 0xE00, 0xE00, 0x000}};
  static const RateTables t24{3, 7, {8, 218, 331},
                              {-2048, 135, 273, 373, 373, 273, 135, -2048},
                              {-128, 960, 4384, 18624, 18624, 4384, 960, -128},
                              {0x000, 0x200, 0x400, 0xE00, 0xE00, 0x400, 0x200, 0x000}};
  static const RateTables t32{4, 15, {-124, 80, 178, 246, 300, 349, 400},
                              {-2048, 4, 135, 213, 273, 323, 373, 425, 425, 373, 323, 273, 213, 135, 4, -2048},
                              {-384, 576, 1312, 2048, 3584, 6336, 11360, 35904, 35904, 11360, 6336, 3584, 2048, 1312,
                               576, -384},
                              {0x000, 0x000, 0x000, 0x200, 0x200, 0x200, 0x600, 0xE00, 0xE00, 0x600, 0x200, 0x200,
                               0x200, 0x000, 0x000, 0x000}};
  static const RateTables t40{
      5, 31, {-122, -16, 68, 139, 198, 250, 298, 339, 378, 413, 445, 475, 502, 528, 553},
      {-2048, -66, 28, 104, 169, 224, 274, 318, 358, 395, 429, 459, 488, 514, 539, 566,
       566, 539, 514, 488, 459, 429, 395, 358, 318, 274, 224, 169, 104, 28, -66, -2048},
      {448, 448, 768, 1248, 1280, 1312, 1856, 3200, 4512, 5728, 7008, 8960, 11456, 14080, 16928, 22272,
       22272, 16928, 14080, 11456, 8960, 7008, 5728, 4512, 3200, 1856, 1312, 1280, 1248, 768, 448, 448},
      {0x000, 0x000, 0x000, 0x000, 0x000, 0x200, 0x200, 0x200, 0x200, 0x200, 0x400, 0x600, 0x800, 0xA00, 0xC00, 0xC00,
       0xC00, 0xC00, 0xA00, 0x800, 0x600, 0x400, 0x200, 0x200, 0x200, 0x200, 0x200, 0x000, 0x000, 0x000, 0x000, 0x000}};
  switch (rate) {
    case Rate::k16: return t16;
    case Rate::k24: return t24;
    case Rate::k32: return t32;
    case Rate::k40: return t40;
  }
  throw ConfigError("unsupported G.726 rate");
}

namespace detail {

inline int wrap16(int v) { return static_cast<std::int16_t>(static_cast<std::uint16_t>(v & 0xFFFF)); }

// Number of powers of two (1, 2, 4, ... 2^14) that are <= value.
inline int log2_class(int value) {
  int i = 0;
  while (i < 15 && value >= (1 << i)) ++i;
  return i;
}

// Product of a predictor coefficient (16-bit two's complement, pre-shifted by 2)
// and a signal in the 11-bit floating format (sign, 4-bit exponent, 6-bit mantissa).
inline int fmult(int an, int srn) {
  const int anmag = an > 0 ? an : ((-an) & 0x1FFF);
  const int anexp = log2_class(anmag) - 6;
  const int anmant = anmag == 0 ? 32 : (anexp >= 0 ? anmag >> anexp : anmag << -anexp);
  const int wanexp = anexp + ((srn >> 6) & 0xF) - 13;
  const int wanmant = (anmant * (srn & 0x3F) + 0x30) >> 4;
  const int retval = wanexp >= 0 ? ((wanmant << wanexp) & 0x7FFF) : (wanmant >> -wanexp);
  return ((an ^ srn) < 0) ? -retval : retval;
}

// Magnitude to the floating format used for the stored dq and sr histories.
inline std::int16_t to_float11(int mag, bool negative) {
  if (mag == 0) return static_cast<std::int16_t>(negative ? -992 : 0x20);  // 0xFC20 or 0x20
  const int exp = log2_class(mag);
  const int v = (exp << 6) + ((mag << 6) >> exp);
  return static_cast<std::int16_t>(negative ? v - 0x400 : v);
}

}  // namespace detail

// Complete adaptive predictor / quantizer state. Encoder and decoder each own
// one and step it identically.
class G726State {
 public:
  explicit G726State(Rate rate = Rate::k32, ScaleMix mix = ScaleMix::sign_magnitude)
      : rate_(rate), t_(&tables(rate)), mix_(mix) {
    reset();
  }

  void reset() {
    yl_ = 34816;
    yu_ = 544;
    dms_ = 0;
    dml_ = 0;
    ap_ = 0;
    a_.fill(0);
    pk_.fill(0);
    sr_.fill(32);
    b_.fill(0);
    dq_.fill(32);
    td_ = 0;
  }

  Rate rate() const noexcept { return rate_; }
  const RateTables& table() const noexcept { return *t_; }

  // Signal estimate: (se, sez) from the current predictor state.
  struct Estimate {
    int se;
    int sez;
    int y;
  };

  Estimate estimate() const {
    int sezi = 0;
    for (int i = 0; i < 6; ++i) sezi += detail::fmult(b_[i] >> 2, dq_[i]);
    sezi = detail::wrap16(sezi);
    int sei = sezi;
    for (int i = 0; i < 2; ++i) sei += detail::fmult(a_[i] >> 2, sr_[i]);
    sei = detail::wrap16(sei);
    return {sei >> 1, sezi >> 1, step_size()};
  }

  // Quantizes prediction error d with scale y into a code.
  int quantize(int d, int y) const {
    const int dqm = std::abs(d);
    const int exp = detail::log2_class(dqm >> 1);
    const int mant = ((dqm << 7) >> exp) & 0x7F;
    const int dl = (exp << 7) + mant;
    const int dln = dl - (y >> 2);
    const int size = (t_->states - 1) >> 1;
    int i = 0;
    while (i < size && dln >= t_->decision[static_cast<std::size_t>(i)]) ++i;
    if (d < 0) return (size << 1) + 1 - i;
    if (i == 0 && (t_->states & 1)) return t_->states;
    return i;
  }

  // Quantized difference in sign-magnitude form (negative values carry -0x8000).
  int reconstruct(int code, int y) const {
    const bool sign = (code >> (t_->bits - 1)) & 1;
    const int dql = t_->dqln[static_cast<std::size_t>(code)] + (y >> 2);
    if (dql < 0) return sign ? -0x8000 : 0;
    const int dex = (dql >> 7) & 15;
    const int dqt = 128 + (dql & 127);
    const int dq = (dqt << 7) >> (14 - dex);
    return sign ? dq - 0x8000 : dq;
  }

  // Runs one code through reconstruction and state update. Returns the
  // reconstructed signal sr (16-bit two's complement, 14-bit scale).
  int step(int code, const Estimate& est) {
    const int dq = reconstruct(code, est.y);
    const int dq_mag = dq & 0x7FFF;
    const int dq_signed = dq < 0 ? -dq_mag : dq_mag;
    const int sr = detail::wrap16(est.se + dq_signed);
    const int dqsez = detail::wrap16(dq_signed + est.sez);
    update(est.y, t_->wi[static_cast<std::size_t>(code)], t_->fi[static_cast<std::size_t>(code)], dq, sr, dqsez);
    return sr;
  }

 private:
  int step_size() const {
    if (mix_ == ScaleMix::floor) {
      const int al = ap_ >= 256 ? 64 : ap_ >> 2;
      return (yl_ + (yu_ - (yl_ >> 6)) * al) >> 6;
    }
    if (ap_ >= 256) return yu_;
    int y = yl_ >> 6;
    const int dif = yu_ - y;
    const int al = ap_ >> 2;
    if (dif > 0) {
      y += (dif * al) >> 6;
    } else if (dif < 0) {
      y += (dif * al + 0x3F) >> 6;
    }
    return y;
  }

  void update(int y, int wi, int fi, int dq, int sr, int dqsez) {
    const int pk0 = dqsez < 0 ? 1 : 0;
    const int mag = dq & 0x7FFF;

    // transition detector
    const int ylint = yl_ >> 15;
    const int ylfrac = (yl_ >> 10) & 0x1F;
    const int thr1 = (32 + ylfrac) << ylint;
    const int thr2 = ylint > 9 ? 31 << 10 : thr1;
    const int dqthr = (thr2 + (thr2 >> 1)) >> 1;
    const int tr = (td_ != 0 && mag > dqthr) ? 1 : 0;

    // scale factor adaptation
    yu_ = y + ((wi - y) >> 5);
    if (yu_ < 544) {
      yu_ = 544;
    } else if (yu_ > 5120) {
      yu_ = 5120;
    }
    yl_ += yu_ + ((-yl_) >> 6);

    int a2p = 0;
    if (tr == 1) {
      a_.fill(0);
      b_.fill(0);
    } else {
      const int pks1 = pk0 ^ pk_[0];
      a2p = a_[1] - (a_[1] >> 7);
      if (dqsez != 0) {
        const int fa1 = pks1 ? a_[0] : -a_[0];
        if (fa1 < -8191) {
          a2p -= 0x100;
        } else if (fa1 > 8191) {
          a2p += 0xFF;
        } else {
          a2p += fa1 >> 5;
        }
        if (pk0 ^ pk_[1]) {
          if (a2p <= -12160) {
            a2p = -12288;
          } else if (a2p >= 12416) {
            a2p = 12288;
          } else {
            a2p -= 0x80;
          }
        } else if (a2p <= -12416) {
          a2p = -12288;
        } else if (a2p >= 12160) {
          a2p = 12288;
        } else {
          a2p += 0x80;
        }
      }
      a_[1] = static_cast<std::int16_t>(a2p);

      int a1 = a_[0] - (a_[0] >> 8);
      if (dqsez != 0) a1 += pks1 == 0 ? 192 : -192;
      const int a1ul = 15360 - a2p;
      if (a1 < -a1ul) {
        a1 = -a1ul;
      } else if (a1 > a1ul) {
        a1 = a1ul;
      }
      a_[0] = static_cast<std::int16_t>(a1);

      const int leak = t_->bits == 5 ? 9 : 8;
      for (std::size_t i = 0; i < 6; ++i) {
        int bi = b_[i] - (b_[i] >> leak);
        if (mag != 0) bi += ((dq ^ dq_[i]) >= 0) ? 128 : -128;
        b_[i] = static_cast<std::int16_t>(bi);
      }
    }

    for (std::size_t i = 5; i > 0; --i) dq_[i] = dq_[i - 1];
    dq_[0] = detail::to_float11(mag, dq < 0);

    sr_[1] = sr_[0];
    if (sr >= 0) {
      sr_[0] = detail::to_float11(sr, false);
    } else if (sr > -32768) {
      sr_[0] = detail::to_float11(-sr, true);
    } else {
      sr_[0] = -992;
    }

    pk_[1] = pk_[0];
    pk_[0] = static_cast<std::int16_t>(pk0);

    if (tr == 1) {
      td_ = 0;
    } else {
      td_ = a2p < -11776 ? 1 : 0;
    }

    dms_ += (fi - dms_) >> 5;
    dml_ += ((fi << 2) - dml_) >> 7;
    if (tr == 1) {
      ap_ = 256;
    } else if (y < 1536 || td_ == 1 || std::abs((dms_ << 2) - dml_) >= (dml_ >> 3)) {
      ap_ += (0x200 - ap_) >> 4;
    } else {
      ap_ += (-ap_) >> 4;
    }
  }

  Rate rate_;
  const RateTables* t_;
  ScaleMix mix_;
  int yl_ = 0;
  int yu_ = 0;
  int dms_ = 0;
  int dml_ = 0;
  int ap_ = 0;
  std::array<std::int16_t, 2> a_{};
  std::array<std::int16_t, 2> pk_{};
  std::array<std::int16_t, 2> sr_{};
  std::array<std::int16_t, 6> b_{};
  std::array<std::int16_t, 6> dq_{};
  int td_ = 0;
};

namespace detail {

inline int expand(int sample, Law law) {
  switch (law) {
    case Law::linear: return static_cast<std::int16_t>(sample) >> 2;
    case Law::alaw: return g711::alaw_to_linear(static_cast<std::uint8_t>(sample)) >> 2;
    case Law::ulaw: return g711::ulaw_to_linear(static_cast<std::uint8_t>(sample)) >> 2;
  }
  return 0;
}

// Synchronous coding adjustment: nudges the log-PCM output by one level when
// re-encoding it would not reproduce `code`.
inline int sync_adjust(const G726State& s, int sr, int se, int y, int code, Law law) {
  const int sign = 1 << (s.table().bits - 1);
  if (law == Law::ulaw) {
    if (sr <= -32768) sr = 0;
    const int sp = g711::linear_to_ulaw(sr << 2);
    const int dx = (g711::ulaw_to_linear(static_cast<std::uint8_t>(sp)) >> 2) - se;
    const int id = s.quantize(dx, y);
    if (id == code) return sp;
    const int im = code ^ sign;
    const int imx = id ^ sign;
    if (imx > im) {
      if (sp & 0x80) return sp == 0xFF ? 0x7E : sp + 1;
      return sp == 0 ? 0 : sp - 1;
    }
    if (sp & 0x80) return sp == 0x80 ? 0x80 : sp - 1;
    return sp == 0x7F ? 0xFE : sp + 1;
  }
  if (sr <= -32768) sr = -1;
  const int sp = g711::linear_to_alaw((sr >> 1) << 3);
  const int dx = (g711::alaw_to_linear(static_cast<std::uint8_t>(sp)) >> 2) - se;
  const int id = s.quantize(dx, y);
  if (id == code) return sp;
  const int im = code ^ sign;
  const int imx = id ^ sign;
  if (imx > im) {
    if (sp & 0x80) return sp == 0xD5 ? 0x55 : (((sp ^ 0x55) - 1) ^ 0x55);
    return sp == 0x2A ? 0x2A : (((sp ^ 0x55) + 1) ^ 0x55);
  }
  if (sp & 0x80) return sp == 0xAA ? 0xAA : (((sp ^ 0x55) + 1) ^ 0x55);
  return sp == 0x55 ? 0xD5 : (((sp ^ 0x55) - 1) ^ 0x55);
}

}  // namespace detail

class Encoder {
 public:
  explicit Encoder(Rate rate = Rate::k32, Law law = Law::linear, ScaleMix mix = ScaleMix::sign_magnitude)
      : state_(rate, mix), law_(law) {}

  // `sample` is a 16-bit linear value, or an 8-bit G.711 code for log-PCM laws.
  int encode(int sample) {
    const int sl = detail::expand(sample, law_);
    const auto est = state_.estimate();
    const int code = state_.quantize(sl - est.se, est.y);
    state_.step(code, est);
    return code;
  }

  std::vector<std::uint8_t> encode(std::span<const std::int16_t> pcm) {
    std::vector<std::uint8_t> out;
    out.reserve(pcm.size());
    for (auto s : pcm) out.push_back(static_cast<std::uint8_t>(encode(static_cast<int>(s))));
    return out;
  }

  void reset() { state_.reset(); }

 private:
  G726State state_;
  Law law_;
};

class Decoder {
 public:
  explicit Decoder(Rate rate = Rate::k32, Law law = Law::linear, ScaleMix mix = ScaleMix::sign_magnitude)
      : state_(rate, mix), law_(law) {}

  // Returns a 16-bit linear sample, or an 8-bit G.711 code for log-PCM laws.
  int decode(int code) {
    code &= (1 << state_.table().bits) - 1;
    const auto est = state_.estimate();
    const int sr = state_.step(code, est);
    if (law_ == Law::linear) return std::clamp(sr * 4, -32768, 32767);
    return detail::sync_adjust(state_, sr, est.se, est.y, code, law_);
  }

  std::vector<std::int16_t> decode(std::span<const std::uint8_t> codes) {
    std::vector<std::int16_t> out;
    out.reserve(codes.size());
    for (auto c : codes) out.push_back(static_cast<std::int16_t>(decode(static_cast<int>(c))));
    return out;
  }

  void reset() { state_.reset(); }

 private:
  G726State state_;
  Law law_;
};

}  // namespace noisegan::g726
