#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include "oracles.hpp"
#include "sled/error.hpp"
#include "sled/extrema.hpp"
#include "synthetic.hpp"

namespace {

using namespace sled;
using sled::synthetic::Rng;

TEST(Extrema, SinglePeakOnTiedPlateau) {
  GrayImage img(3, 3, 1.0);
  img(1, 1) = 9.0;
  const ExtremaSet ex = detect_local_extrema(img, 3);
  EXPECT_EQ(ex.maxima, (std::vector<PixelPos>{{1, 1}}));
  EXPECT_TRUE(ex.minima.empty());
}

TEST(Extrema, ConstantImageHasNone) {
  for (int w : {3, 5, 7}) {
    const ExtremaSet ex = detect_local_extrema(GrayImage(12, 9, 4.0), w);
    EXPECT_TRUE(ex.maxima.empty());
    EXPECT_TRUE(ex.minima.empty());
  }
}

TEST(Extrema, NothingNearTheBorder) {
  GrayImage img(5, 5, 0.0);
  img(0, 0) = 10;
  img(4, 2) = 10;
  img(2, 2) = 10;
  const ExtremaSet ex = detect_local_extrema(img, 3);
  EXPECT_EQ(ex.maxima, (std::vector<PixelPos>{{2, 2}}));
  // The w=5 window around (2,2) reaches the tied pixel at (4,2).
  EXPECT_TRUE(detect_local_extrema(img, 5).maxima.empty());
}

TEST(Extrema, InvalidWindow) {
  const GrayImage img(8, 8);
  for (int w : {-3, 0, 1, 2, 4, 6}) EXPECT_THROW(detect_local_extrema(img, w), ParameterError) << w;
}

TEST(Extrema, ImageSmallerThanWindow) {
  const ExtremaSet ex = detect_local_extrema(GrayImage(2, 7, 1.0), 3);
  EXPECT_TRUE(ex.maxima.empty());
  EXPECT_TRUE(ex.minima.empty());
}

TEST(Extrema, MatchesWindowScanOracle) {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const int levels = t % 2 == 0 ? 256 : 4;  // few levels force ties
    const GrayImage img = synthetic::random_gray(16, 16, rng, levels);
    for (int w : {3, 5}) {
      EXPECT_EQ(detect_local_extrema(img, w), oracle::extrema(img, w)) << "case " << t << " w=" << w;
      EXPECT_EQ(detect_local_extrema(img, w, false), oracle::extrema(img, w, false)) << "case " << t << " w=" << w;
    }
  }
}

TEST(Extrema, OffsetInvariance) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const GrayImage img = synthetic::random_gray(16, 16, rng, 8);
    GrayImage shifted = img;
    for (double& v : shifted.pixels()) v += 37.0;
    EXPECT_EQ(detect_local_extrema(img, 3), detect_local_extrema(shifted, 3));
  }
}

TEST(Extrema, NegationSwapsSets) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const GrayImage img = synthetic::random_gray(16, 16, rng, 6);
    GrayImage neg = img;
    for (double& v : neg.pixels()) v = 255.0 - v;
    for (int w : {3, 5}) {
      const ExtremaSet a = detect_local_extrema(img, w);
      const ExtremaSet b = detect_local_extrema(neg, w);
      EXPECT_EQ(a.maxima, b.minima);
      EXPECT_EQ(a.minima, b.maxima);
    }
  }
}

TEST(Extrema, NoAdjacentMaxima) {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const ExtremaSet ex = detect_local_extrema(synthetic::random_gray(16, 16, rng, 5), 3);
    for (std::size_t i = 0; i < ex.maxima.size(); ++i) {
      for (std::size_t j = i + 1; j < ex.maxima.size(); ++j) {
        const int dx = std::abs(ex.maxima[i].x - ex.maxima[j].x);
        const int dy = std::abs(ex.maxima[i].y - ex.maxima[j].y);
        EXPECT_GT(std::max(dx, dy), 1);
      }
    }
  }
}

TEST(Extrema, DeterministicRowMajor) {
  Rng rng(12);
  const GrayImage img = synthetic::random_gray(32, 24, rng);
  const ExtremaSet a = detect_local_extrema(img, 3);
  EXPECT_EQ(a, detect_local_extrema(img, 3));
  auto row_major = [](const PixelPos& p, const PixelPos& q) { return p.y != q.y ? p.y < q.y : p.x < q.x; };
  EXPECT_TRUE(std::is_sorted(a.maxima.begin(), a.maxima.end(), row_major));
  EXPECT_TRUE(std::is_sorted(a.minima.begin(), a.minima.end(), row_major));
}

}  // namespace
