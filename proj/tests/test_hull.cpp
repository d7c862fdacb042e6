#include "geowave/errors.h"
#include "geowave/hull_hierarchy.h"
#include "hull_oracle.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace geowave;
using geowave::testing::bruteHullDistance;
using geowave::testing::jarvisHull;

namespace {

bool sameVertexSet(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (Vec2 p : a) {
    bool found = false;
    for (Vec2 q : b) found = found || (p - q).norm() <= tol;
    if (!found) return false;
  }
  return true;
}

std::vector<Vec2> randomChain(std::mt19937_64& rng, int n, Vec2 offset) {
  std::normal_distribution<double> g(0., 1.);
  std::vector<Vec2> c;
  Vec2 p = offset;
  for (int i = 0; i < n; i++) {
    p += Vec2{g(rng), g(rng)} * 0.3;
    c.push_back(p);
  }
  return c;
}

} // namespace

TEST(HullBuild, SinglePoint) {
  HullTree t = buildHull({{1., 2.}});
  EXPECT_TRUE(t.node->isLeaf());
  ASSERT_EQ(t.node->hull.size(), 1u);
  EXPECT_EQ(t.node->hull[0], (Vec2{1., 2.}));
  EXPECT_THROW(buildHull({}), BadParameter);
}

TEST(HullBuild, Square) {
  HullTree t = buildHull({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_FALSE(t.node->isLeaf());
  EXPECT_EQ(t.leafCount(), 2);
  EXPECT_EQ(t.node->left->size, 2);
  EXPECT_EQ(t.node->right->size, 2);
  EXPECT_TRUE(sameVertexSet(rootHull(t), {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0.));
  EXPECT_EQ(t.node->bridges.size(), 2u);
  HullCheck check = checkHull(t);
  EXPECT_TRUE(check.ok) << check.message;
  EXPECT_EQ(check.bridgesChecked, 2);
}

TEST(HullBuild, ConvexPositionMatchesBruteForce) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0., 2. * std::numbers::pi);
  std::vector<Vec2> pts;
  for (int i = 0; i < 64; i++) {
    double a = ang(rng);
    pts.push_back({std::cos(a), std::sin(a)});
  }
  HullTree t = buildHull(pts);
  EXPECT_EQ(rootHull(t).size(), 64u);
  EXPECT_TRUE(sameVertexSet(rootHull(t), jarvisHull(pts), 0.));
  EXPECT_TRUE(checkHull(t).ok);
}

TEST(HullQuery, Basics) {
  HullTree a = buildHull({{0., 0.}}), b = buildHull({{3., 4.}});
  EXPECT_DOUBLE_EQ(queryHullDistance(a, b, Rigid2::identity()).distance, 5.);
  HullTree sq = buildHull({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_EQ(queryHullDistance(sq, sq, Rigid2::identity()).distance, 0.);
  // Frame relation: b's frame shifted by (2, 0) and rotated a quarter turn about its origin.
  Rigid2 rel{std::numbers::pi / 2., {3., 0.}};
  EXPECT_NEAR(queryHullDistance(sq, sq, rel).distance, 1., 1e-12);
}

TEST(HullQuery, RandomChainsMatchBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-4., 4.);
  for (int trial = 0; trial < 200; trial++) {
    auto ca = randomChain(rng, 64, {0., 0.});
    auto cb = randomChain(rng, 64, {u(rng), u(rng)});
    Rigid2 rel{u(rng), {u(rng), u(rng)}};
    HullTree a = buildHull(ca), b = buildHull(cb);
    std::vector<Vec2> cbMapped;
    for (Vec2 p : cb) cbMapped.push_back(rel.apply(p));
    EXPECT_NEAR(queryHullDistance(a, b, rel).distance, bruteHullDistance(ca, cbMapped), 1e-9) << "trial " << trial;
  }
}

TEST(HullSplit, TwoPointsAndRoundTrip) {
  HullTree t = buildHull({{0., 0.}, {1., 0.}});
  auto [l, r] = splitHull(t, 1);
  EXPECT_TRUE(l.node->isLeaf());
  EXPECT_TRUE(r.node->isLeaf());
  EXPECT_EQ(l.size(), 1);
  EXPECT_EQ(r.size(), 1);
  EXPECT_THROW(splitHull(t, 0), IndexOutOfRange);
  EXPECT_THROW(splitHull(t, 2), IndexOutOfRange);

  std::mt19937_64 rng(2);
  auto chain = randomChain(rng, 100, {});
  HullTree full = buildHull(chain);
  for (int at : {1, 37, 50, 99}) {
    auto [a, b] = splitHull(full, at);
    EXPECT_EQ(a.size(), at);
    HullTree back = mergeHull(a, b, Rigid2::identity());
    EXPECT_TRUE(sameVertexSet(rootHull(back), rootHull(full), 1e-12));
    auto pts = chainPoints(back);
    ASSERT_EQ(pts.size(), chain.size());
    for (size_t i = 0; i < pts.size(); i++) EXPECT_NEAR((pts[i] - chain[i]).norm(), 0., 1e-12);
    EXPECT_TRUE(checkHull(a).ok);
    EXPECT_TRUE(checkHull(b).ok);
  }
}

TEST(HullSplit, TouchedNodesLogarithmic) {
  std::mt19937_64 rng(3);
  auto chain = randomChain(rng, 256, {});
  HullTree t = buildHull(chain);
  ASSERT_EQ(t.leafCount(), 128);
  std::uniform_int_distribution<int> at(1, 255);
  std::int64_t worst = 0;
  for (int i = 0; i < 1000; i++) {
    HullUpdateStats stats;
    splitHull(t, at(rng), &stats);
    worst = std::max(worst, stats.touched);
  }
  EXPECT_LE(worst, 4 * 7);
}

TEST(HullMerge, Examples) {
  HullUpdateStats stats;
  HullTree m = mergeHull(buildHull({{0., 0.}}), buildHull({{0., 0.}}), Rigid2{0., {2., 1.}}, &stats);
  EXPECT_EQ(m.node->hull.size(), 2u);
  ASSERT_EQ(m.node->bridges.size(), 1u);
  EXPECT_EQ(stats.touched, 1);

  HullTree sq = buildHull({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  // Side by side at equal height the outer bridges would be collinear with the squares' edges; a vertical offset
  // keeps all six outer corners on the hull.
  HullTree two = mergeHull(sq, sq, Rigid2{0., {3., 0.5}});
  std::vector<Vec2> eight{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {3, 0.5}, {4, 0.5}, {4, 1.5}, {3, 1.5}};
  EXPECT_EQ(jarvisHull(eight).size(), 6u);
  EXPECT_EQ(rootHull(two).size(), 6u);
  EXPECT_TRUE(sameVertexSet(rootHull(two), jarvisHull(eight), 1e-15));
  EXPECT_EQ(two.node->bridges.size(), 2u);
  EXPECT_TRUE(checkHull(two).ok);

  std::vector<Vec2> poly;
  for (int i = 0; i < 12; i++) poly.push_back({std::cos(i * std::numbers::pi / 6.), std::sin(i * std::numbers::pi / 6.)});
  HullTree lo = buildHull({poly.begin(), poly.begin() + 5}), hi = buildHull({poly.begin() + 5, poly.end()});
  EXPECT_TRUE(sameVertexSet(rootHull(mergeHull(lo, hi, Rigid2::identity())), poly, 1e-15));
}

TEST(HullMerge, HeightStaysBalanced) {
  std::mt19937_64 rng(8);
  HullTree t = buildHull({{0., 0.}});
  for (int i = 0; i < 500; i++) {
    t = mergeHull(t, buildHull(randomChain(rng, 1 + i % 3, {})), Rigid2{0.01 * i, {0.1, 0.}});
    ASSERT_LE(t.height(), 2. * std::log2(t.leafCount()) + 2.);
  }
  EXPECT_TRUE(checkHull(t).ok);
}
