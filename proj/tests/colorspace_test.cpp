#include "fakedet/colorspace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fakedet/error.hpp"
#include "oracles.hpp"

namespace fakedet {
namespace {

PlanarImage pixel(double r, double g, double b) {
  return PlanarImage(1, 1, 3, std::vector<double>{r, g, b});
}

TEST(ColorCoefficientsTest, Itu601GreenWeightIsDerived) {
  const auto c = ColorCoefficients::itu601();
  EXPECT_DOUBLE_EQ(c.k_ry(), 0.299);
  EXPECT_DOUBLE_EQ(c.k_by(), 0.114);
  EXPECT_NEAR(c.k_gy(), 0.587, 1e-15);
  EXPECT_NEAR(c.k_ry() + c.k_gy() + c.k_by(), 1.0, 1e-15);
  EXPECT_NEAR(c.cb_scale(), 1.772, 1e-15);
  EXPECT_NEAR(c.cr_scale(), 1.402, 1e-15);
}

TEST(ColorCoefficientsTest, RejectsNonPositiveWeights) {
  EXPECT_THROW(ColorCoefficients::from_luma_weights(0.0, 0.1), Error);
  EXPECT_THROW(ColorCoefficients::from_luma_weights(0.6, 0.5), Error);
  try {
    ColorCoefficients::from_luma_weights(-0.1, 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidConfig);
  }
  EXPECT_NO_THROW(ColorCoefficients::itu709());
  EXPECT_NO_THROW(ColorCoefficients::smpte240m());
}

TEST(RgbToYcbcrTest, GrayHasZeroChroma) {
  const auto out = rgb_to_ycbcr(pixel(0.5, 0.5, 0.5), ColorCoefficients::itu601());
  EXPECT_EQ(out.at(0, 0, 0), 0.5);
  EXPECT_EQ(out.at(0, 0, 1), 0.0);
  EXPECT_EQ(out.at(0, 0, 2), 0.0);
}

TEST(RgbToYcbcrTest, PureRed) {
  const auto out = rgb_to_ycbcr(pixel(1, 0, 0), ColorCoefficients::itu601());
  EXPECT_NEAR(out.at(0, 0, 0), 0.299, 1e-15);
  EXPECT_NEAR(out.at(0, 0, 1), -0.299 / 1.772, 1e-15);
  EXPECT_NEAR(out.at(0, 0, 1), -0.16874, 1e-5);
  EXPECT_NEAR(out.at(0, 0, 2), 0.5, 1e-15);
}

TEST(RgbToYcbcrTest, SwappedConventionFollowsLiteralFormula) {
  const auto c = ColorCoefficients::itu601();
  const auto out = rgb_to_ycbcr(pixel(1, 0, 0), c, ChromaConvention::kSwapped);
  EXPECT_NEAR(out.at(0, 0, 1), 1.0 - 0.299, 1e-15);  // R - Y
  EXPECT_NEAR(out.at(0, 0, 2), -0.299, 1e-15);       // B - Y
  const auto back = ycbcr_to_rgb(out, c, ChromaConvention::kSwapped);
  EXPECT_NEAR(back.at(0, 0, 0), 1.0, 1e-12);
  EXPECT_NEAR(back.at(0, 0, 1), 0.0, 1e-12);
  EXPECT_NEAR(back.at(0, 0, 2), 0.0, 1e-12);
}

TEST(RgbToYcbcrTest, RejectsWrongChannelCount) {
  try {
    rgb_to_ycbcr(PlanarImage(2, 2, 1), ColorCoefficients::itu601());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
  EXPECT_THROW(ycbcr_to_rgb(PlanarImage(2, 2, 18), ColorCoefficients::itu601()), Error);
}

TEST(YcbcrToRgbTest, ZeroChromaIsGray) {
  const auto out = ycbcr_to_rgb(pixel(0.5, 0, 0), ColorCoefficients::itu601());
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(out.at(0, 0, c), 0.5, 1e-15);
}

TEST(YcbcrToRgbTest, InvertsRedExample) {
  // Cb at full precision; the 5-digit -0.16874 alone is 4e-6 off.
  const auto out = ycbcr_to_rgb(pixel(0.299, -0.299 / 1.772, 0.5), ColorCoefficients::itu601());
  EXPECT_NEAR(out.at(0, 0, 0), 1.0, 1e-6);
  EXPECT_NEAR(out.at(0, 0, 1), 0.0, 1e-6);
  EXPECT_NEAR(out.at(0, 0, 2), 0.0, 1e-6);
}

TEST(ColorspacePropertyTest, RoundTripLumaRangeAndGrayAxis) {
  std::mt19937_64 rng(601);
  const auto coeffs = ColorCoefficients::itu601();
  for (int trial = 0; trial < 1000; ++trial) {
    const PlanarImage x = oracle::random_image(rng, 8, 8, 3);
    const PlanarImage ycc = rgb_to_ycbcr(x, coeffs);
    const PlanarImage back = ycbcr_to_rgb(ycc, coeffs);
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(back.data()[i], x.data()[i], 1e-12);
    for (std::size_t i = 0; i < ycc.size(); i += 3) {
      ASSERT_GE(ycc.data()[i], 0.0);
      ASSERT_LE(ycc.data()[i], 1.0);
      ASSERT_LE(std::abs(ycc.data()[i + 1]), 0.5 + 1e-15);
      ASSERT_LE(std::abs(ycc.data()[i + 2]), 0.5 + 1e-15);
    }
    PlanarImage gray(4, 4, 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int y = 0; y < 4; ++y)
      for (int xx = 0; xx < 4; ++xx) {
        const double v = u(rng);
        for (int c = 0; c < 3; ++c) gray.at(y, xx, c) = v;
      }
    const PlanarImage g = rgb_to_ycbcr(gray, coeffs);
    for (std::size_t i = 0; i < g.size(); i += 3) {
      ASSERT_EQ(g.data()[i + 1], 0.0);
      ASSERT_EQ(g.data()[i + 2], 0.0);
    }
  }
}

}  // namespace
}  // namespace fakedet
