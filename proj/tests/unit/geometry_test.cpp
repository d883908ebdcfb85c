#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "formkie/errors.hpp"
#include "formkie/geometry.hpp"

using namespace formkie;

namespace {

// Independent reference: apply a row-major 3x3 to a point by hand.
Point project(const std::array<double, 9>& m, Point p) {
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

std::vector<PointPair> pairs_under(const Homography& h, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0, 1700), uy(0, 2200);
  std::vector<PointPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p{ux(rng), uy(rng)};
    out.emplace_back(p, apply_homography(h, p));
  }
  return out;
}

}  // namespace

TEST(BBox, TopLeft) {
  EXPECT_EQ(top_left({10, 20, 50, 40}), (Point{10, 20}));
  EXPECT_EQ(top_left({0, 0, 0, 0}), (Point{0, 0}));
  EXPECT_EQ(top_left({5, 7, 9, 7}), (Point{5, 7}));
}

TEST(BBox, Merge) {
  EXPECT_EQ(merge({0, 0, 10, 10}, {5, 5, 20, 8}), (BBox{0, 0, 20, 10}));
  EXPECT_EQ(merge({0, 0, 10, 10}, {0, 0, 10, 10}), (BBox{0, 0, 10, 10}));
  EXPECT_EQ(merge({0, 0, 1, 1}, {100, 100, 101, 101}), (BBox{0, 0, 101, 101}));
}

TEST(Distance, Manhattan) {
  EXPECT_DOUBLE_EQ(manhattan({0, 0}, {3, 4}), 7.0);
  EXPECT_DOUBLE_EQ(manhattan({12.5, -3}, {12.5, -3}), 0.0);
  EXPECT_DOUBLE_EQ(manhattan({-2, 0}, {2, 0}), 4.0);
}

TEST(Distance, Euclidean) {
  EXPECT_DOUBLE_EQ(euclidean({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(euclidean({7, 7}, {7, 7}), 0.0);
  EXPECT_NEAR(euclidean({1, 1}, {2, 2}), 1.41421356, 1e-8);
}

TEST(Homography, ApplyBasics) {
  EXPECT_EQ(apply_homography(Homography::identity(), Point{17, 23}), (Point{17, 23}));
  EXPECT_EQ(apply_homography(Homography::translation(5, -3), Point{0, 0}), (Point{5, -3}));
  // 90 degrees in y-down coordinates: x axis turns onto the y axis.
  const Point r = apply_homography(Homography::similarity(std::numbers::pi / 2, 1.0, {0, 0}), Point{1, 0});
  EXPECT_NEAR(r.x, 0.0, 1e-12);
  EXPECT_NEAR(r.y, 1.0, 1e-12);
}

TEST(Homography, DegenerateProjectionThrows) {
  const Homography h({1, 0, 0, 0, 1, 0, 1, 0, 0});  // w = x
  EXPECT_THROW(apply_homography(h, Point{0, 5}), DegenerateProjection);
}

TEST(Homography, BoxIsCornerHull) {
  const Homography h = Homography::similarity(0.3, 1.2, {50, 50});
  const BBox b{10, 20, 110, 70};
  const BBox out = apply_homography(h, b);
  for (const Point c : {Point{10, 20}, Point{110, 20}, Point{10, 70}, Point{110, 70}}) {
    const Point q = project(h.data(), c);
    EXPECT_LE(out.x_min, q.x + 1e-9);
    EXPECT_GE(out.x_max, q.x - 1e-9);
    EXPECT_LE(out.y_min, q.y + 1e-9);
    EXPECT_GE(out.y_max, q.y - 1e-9);
  }
}

TEST(Homography, InverseAndCompose) {
  const Homography h({1.02, 0.03, 12, -0.02, 0.98, -7, 1e-5, -2e-5, 1});
  // Equal up to scale: compare the action on points.
  const Homography round = h * h.inverse();
  for (const Point p : {Point{0, 0}, Point{1700, 0}, Point{350, 2100}}) {
    const Point q = apply_homography(round, p);
    EXPECT_NEAR(q.x, p.x, 1e-9);
    EXPECT_NEAR(q.y, p.y, 1e-9);
  }
}

TEST(EstimateHomography, FixedCornersGiveIdentity) {
  std::vector<PointPair> pairs;
  for (const Point c : {Point{0, 0}, Point{100, 0}, Point{100, 100}, Point{0, 100}}) pairs.emplace_back(c, c);
  EXPECT_LT(estimate_homography(pairs).max_abs_diff(Homography::identity()), 1e-6);
}

TEST(EstimateHomography, RecoversTranslationOnHeldOutPoints) {
  std::vector<PointPair> pairs;
  for (const Point c : {Point{0, 0}, Point{100, 0}, Point{100, 100}, Point{0, 100}}) {
    pairs.emplace_back(c, Point{c.x + 10, c.y + 20});
  }
  const Homography h = estimate_homography(pairs);
  for (const Point p : {Point{37, 81}, Point{512, -40}, Point{-3, 900}}) {
    const Point q = apply_homography(h, p);
    EXPECT_NEAR(q.x, p.x + 10, 1e-6);
    EXPECT_NEAR(q.y, p.y + 20, 1e-6);
  }
}

TEST(EstimateHomography, Preconditions) {
  const std::vector<PointPair> three{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}};
  EXPECT_THROW(estimate_homography(three), InsufficientPairs);
  std::vector<PointPair> collinear;
  for (int i = 0; i < 6; ++i) collinear.push_back({{i * 10.0, i * 5.0}, {i * 10.0, i * 5.0}});
  EXPECT_THROW(estimate_homography(collinear), DegenerateConfiguration);
}

TEST(EstimateHomography, RecoversPerspective) {
  std::mt19937_64 rng(3);
  const Homography truth({0.97, 0.04, 25, -0.03, 1.05, -14, 2e-5, -1e-5, 1});
  const auto pairs = pairs_under(truth, 12, rng);
  EXPECT_LT(estimate_homography(pairs).max_abs_diff(truth), 1e-6);
}

TEST(EstimateSimilarity, RecoversRotationScale) {
  const Homography truth = Homography::translation(30, -12) * Homography::similarity(0.05, 1.03, {850, 1100});
  std::mt19937_64 rng(5);
  const auto pairs = pairs_under(truth, 3, rng);
  EXPECT_LT(estimate_similarity(pairs).max_abs_diff(truth), 1e-6);
}

TEST(Ransac, ExactPairsAllInliers) {
  std::mt19937_64 rng(11);
  const Homography truth({1.01, -0.02, 8, 0.015, 0.99, 4, 1e-5, 1e-5, 1});
  const auto pairs = pairs_under(truth, 20, rng);
  const auto r = ransac_homography(pairs, {3.0, 500, 1});
  EXPECT_EQ(r.inlier_count, 20u);
  EXPECT_LT(r.transform.max_abs_diff(truth), 1e-6);
}

TEST(Ransac, PlantedOutliersExcluded) {
  std::mt19937_64 rng(12);
  const Homography truth = Homography::similarity(0.04, 0.97, {850, 1100});
  auto pairs = pairs_under(truth, 16, rng);
  std::uniform_real_distribution<double> off(150, 400);
  for (int k = 0; k < 4; ++k) {
    const Point p{200.0 + 300 * k, 400.0 + 250 * k};
    const Point q = apply_homography(truth, p);
    pairs.emplace_back(p, Point{q.x + off(rng), q.y - off(rng)});
  }
  const auto r = ransac_homography(pairs, {3.0, 1000, 9});
  ASSERT_EQ(r.inlier_mask.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(r.inlier_mask[i], i < 16) << i;
}

TEST(Ransac, DeterministicUnderSeed) {
  const std::vector<PointPair> pairs{{{0, 0}, {1, 1}}, {{100, 0}, {101, 1}}, {{0, 100}, {1, 101}},
                                     {{100, 100}, {400, 50}}};
  auto run = [&] {
    try {
      return std::optional(ransac_homography(pairs, {3.0, 200, 42}));
    } catch (const NoConsensus&) {
      return std::optional<RansacResult>();
    }
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.has_value(), b.has_value());
  if (a) {
    EXPECT_EQ(a->transform.data(), b->transform.data());
    EXPECT_EQ(a->inlier_mask, b->inlier_mask);
  }
}

TEST(Ransac, TooFewPairs) {
  const std::vector<PointPair> pairs{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}};
  EXPECT_THROW(ransac_homography(pairs, {}), InsufficientPairs);
}
