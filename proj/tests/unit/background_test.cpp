#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "vbsf/background.hpp"
#include "vbsf/error.hpp"

namespace vbsf {
namespace {

using testing::constant_frame;

TEST(BackgroundModel, RingBuffer) {
  BackgroundModel m(3);
  m.update(constant_frame(4, 4, 1));
  EXPECT_EQ(m.size(), 1u);
  m.update(constant_frame(4, 4, 2));
  m.update(constant_frame(4, 4, 3));
  m.update(constant_frame(4, 4, 200));
  EXPECT_EQ(m.size(), 3u);
  // Oldest (1) evicted: history {2, 3, 200} -> median 3.
  EXPECT_EQ(median_background(m).at(0, 0), 3);
}

TEST(BackgroundModel, RejectsDimensionMismatch) {
  BackgroundModel m;
  m.update(constant_frame(4, 4, 0));
  EXPECT_THROW(m.update(constant_frame(5, 4, 0)), ValidationError);
  EXPECT_THROW(m.update(Frame(4, 4, PixelFormat::Rgba8)), ValidationError);
}

TEST(MedianBackground, Examples) {
  BackgroundModel same;
  for (int i = 0; i < 4; ++i) same.update(constant_frame(3, 3, 42));
  EXPECT_EQ(median_background(same).pixels()[4], 42);

  BackgroundModel history;
  for (int v : {10, 10, 200, 10, 10}) history.update(constant_frame(1, 1, static_cast<std::uint8_t>(v)));
  EXPECT_EQ(median_background(history).at(0, 0), 10);

  BackgroundModel even;
  even.update(constant_frame(1, 1, 5));
  even.update(constant_frame(1, 1, 7));
  EXPECT_EQ(median_background(even).at(0, 0), 5);

  EXPECT_THROW(median_background(BackgroundModel{}), ValidationError);
}

TEST(MedianBackground, MatchesSortOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 255);
  for (std::size_t n = 1; n <= 9; ++n) {
    BackgroundModel m(n);
    std::vector<int> values;
    for (std::size_t k = 0; k < n; ++k) {
      values.push_back(v(rng));
      m.update(constant_frame(1, 1, static_cast<std::uint8_t>(values.back())));
    }
    std::sort(values.begin(), values.end());
    EXPECT_EQ(median_background(m).at(0, 0), values[(n - 1) / 2]) << "n=" << n;
  }
}

TEST(ForegroundMask, Examples) {
  BackgroundModel m;
  for (int i = 0; i < 5; ++i) m.update(constant_frame(10, 10, 0));
  EXPECT_FALSE(foreground_mask(m, constant_frame(10, 10, 0), 30).any());

  Frame blob = constant_frame(10, 10, 0);
  for (int y = 2; y < 5; ++y)
    for (int x = 3; x < 7; ++x) blob.at(x, y) = 255;
  const auto mask = foreground_mask(m, blob, 30);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) EXPECT_EQ(mask.at(x, y), blob.at(x, y) == 255);

  EXPECT_FALSE(foreground_mask(m, constant_frame(10, 10, 255), 255).any());
  EXPECT_THROW(foreground_mask(BackgroundModel{}, blob, 30), ValidationError);
  EXPECT_THROW(foreground_mask(m, constant_frame(9, 10, 0), 30), ValidationError);
}

TEST(ForegroundMask, MedianItselfIsNeverForeground) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(0, 255);
  BackgroundModel m(7);
  for (int i = 0; i < 7; ++i) {
    Frame f(6, 5);
    for (auto& p : f.pixels()) p = static_cast<std::uint8_t>(v(rng));
    m.update(f);
  }
  for (int t : {0, 1, 30, 255}) EXPECT_FALSE(foreground_mask(m, median_background(m), t).any());
}

ForegroundMask mask_from(std::initializer_list<const char*> rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(std::strlen(*rows.begin()));
  ForegroundMask m(w, h);
  int y = 0;
  for (const char* row : rows) {
    for (int x = 0; x < w; ++x) m.set(x, y, row[x] == '#');
    ++y;
  }
  return m;
}

TEST(ConnectedComponents, Examples) {
  EXPECT_TRUE(connected_components(ForegroundMask(8, 8), 1).empty());

  const auto two = mask_from({"###.....",
                              "###.....",
                              "###.....",
                              "........",
                              ".....###",
                              ".....###",
                              ".....###"});
  const auto boxes = connected_components(two, 1);
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_EQ(boxes[0], (BoundingBox{0, 0, 3, 3}));
  EXPECT_EQ(boxes[1], (BoundingBox{5, 4, 3, 3}));

  const auto single = mask_from({"...", ".#.", "..."});
  EXPECT_TRUE(connected_components(single, 2).empty());
  EXPECT_EQ(connected_components(single, 1).size(), 1u);
}

TEST(ConnectedComponents, DiagonalNeighborsJoin) {
  const auto diag = mask_from({"#...", ".#..", "..#.", "...#"});
  const auto boxes = connected_components(diag, 1);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (BoundingBox{0, 0, 4, 4}));
}

TEST(ConnectedComponents, OrderedByTopLeft) {
  // The lower-left component is discovered first in raster order of its pixels
  // but its box corner sorts after the upper-right one.
  const auto m = mask_from({"......#",
                            "#.....#",
                            "#......"});
  const auto boxes = connected_components(m, 1);
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_EQ(boxes[0].x, 6);
  EXPECT_EQ(boxes[1].x, 0);
}

// Flood-fill oracle properties over random masks: boxes lie in bounds, hold at
// least min_area pixels, and no two components touch under 8-connectivity.
TEST(ConnectedComponents, RandomMaskProperties) {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution on(0.35);
  for (int trial = 0; trial < 50; ++trial) {
    ForegroundMask m(24, 18);
    for (int y = 0; y < 18; ++y)
      for (int x = 0; x < 24; ++x) m.set(x, y, on(rng));
    const std::size_t min_area = trial % 4;
    const auto boxes = connected_components(m, min_area);
    std::size_t covered = 0;
    for (const auto& b : boxes) {
      EXPECT_GE(b.x, 0);
      EXPECT_GE(b.y, 0);
      EXPECT_LE(b.right(), 24);
      EXPECT_LE(b.bottom(), 18);
      std::size_t inside = 0;
      for (int y = int(b.y); y < int(b.bottom()); ++y)
        for (int x = int(b.x); x < int(b.right()); ++x) inside += m.at(x, y);
      EXPECT_GE(inside, std::max<std::size_t>(min_area, 1));
      covered += inside;
    }
    if (min_area <= 1) EXPECT_GE(covered, m.count());
  }
}

TEST(TemporalMedianSegmenter, SuppressesDuringWarmup) {
  TemporalMedianSegmenter seg({25, 30, 5});
  Frame blob = constant_frame(8, 8, 0);
  blob.at(3, 3) = 255;
  for (int i = 0; i < 5; ++i) EXPECT_FALSE(seg.segment(blob).any());
  // Model now holds 5 blob frames, so the blob is background.
  EXPECT_FALSE(seg.segment(blob).any());
  Frame other = constant_frame(8, 8, 0);
  other.at(6, 6) = 255;
  const auto mask = seg.segment(other);
  EXPECT_TRUE(mask.at(6, 6));
  EXPECT_TRUE(mask.at(3, 3));
}

}  // namespace
}  // namespace vbsf
