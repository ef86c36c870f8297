#include <gtest/gtest.h>

#include <random>

#include "noisegan/fif.hpp"

using namespace noisegan;

namespace {

// Every column is all zero or all one and the zero columns are contiguous.
void expect_single_band(const fif::FIFMask& m) {
  std::size_t zeros = 0, first = m.mask.cols();
  for (std::size_t c = 0; c < m.mask.cols(); ++c) {
    const float top = m.mask(0, c);
    ASSERT_TRUE(top == 0.0f || top == 1.0f);
    for (std::size_t r = 0; r < m.mask.rows(); ++r) ASSERT_EQ(m.mask(r, c), top);
    if (top == 0.0f) {
      if (zeros == 0) first = c;
      ASSERT_EQ(c, first + zeros) << "zero band is not contiguous";
      ++zeros;
    }
  }
  ASSERT_EQ(zeros, m.band_width);
  if (zeros > 0) ASSERT_EQ(first, m.band_start);
}

}  // namespace

TEST(Fif, ZeroMaxBandIsAllOnes) {
  const auto m = fif::sample_mask(8, 256, 0, std::uint64_t{3});
  EXPECT_EQ(m.band_width, 0u);
  for (float v : m.mask.data()) EXPECT_EQ(v, 1.0f);
}

TEST(Fif, SeededDrawIsReproducible) {
  const auto a = fif::sample_mask(4, 256, 64, std::uint64_t{42});
  const auto b = fif::sample_mask(4, 256, 64, std::uint64_t{42});
  EXPECT_EQ(a.band_start, b.band_start);
  EXPECT_EQ(a.band_width, b.band_width);
  EXPECT_EQ(a.mask, b.mask);
}

TEST(Fif, InvariantsAndMeanFraction) {
  std::mt19937_64 rng(7);
  const std::size_t width = 256, max_band = 64;
  double masked = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto m = fif::sample_mask(3, width, max_band, rng);
    expect_single_band(m);
    ASSERT_LE(m.band_width, max_band);
    ASSERT_LE(m.band_start + m.band_width, width);
    masked += static_cast<double>(m.band_width) / width;
  }
  const double expected = static_cast<double>(max_band) / (2.0 * width);
  EXPECT_NEAR(masked / draws, expected, 0.1 * expected);
}

TEST(Fif, WidthDistributionIsUniform) {
  // chi-square over the 17 possible widths
  std::mt19937_64 rng(11);
  const std::size_t max_band = 16;
  std::vector<int> counts(max_band + 1, 0);
  const int draws = 17000;
  for (int i = 0; i < draws; ++i) ++counts[fif::sample_mask(1, 64, max_band, rng).band_width];
  const double e = static_cast<double>(draws) / counts.size();
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  EXPECT_LT(chi2, 39.25);  // 99.9th percentile at 16 degrees of freedom
}

TEST(Fif, OversizedBandIsConfigError) {
  EXPECT_THROW(fif::sample_mask(2, 16, 17, std::uint64_t{0}), ConfigError);
}

TEST(Fif, InferenceMask) {
  const auto m = fif::inference_mask(256, 256);
  EXPECT_EQ(m.band_width, 0u);
  double sum = 0.0;
  for (float v : m.mask.data()) sum += v;
  EXPECT_EQ(sum, 256.0 * 256.0);
  Matrix<float> x(256, 256);
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(i % 255);
  EXPECT_EQ(fif::apply(m, x), x);
}

TEST(Fif, ApplyZeroesBandAndIsIdempotent) {
  const auto m = fif::make_mask(4, 10, 3, 4);
  Matrix<float> x(4, 10, 7.0f);
  const auto y = fif::apply(m, x);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 10; ++c) EXPECT_EQ(y(r, c), (c >= 3 && c < 7) ? 0.0f : 7.0f);
  }
  EXPECT_EQ(fif::apply(m, y), y);
  EXPECT_THROW(fif::apply(m, Matrix<float>(4, 9)), ShapeError);
}
