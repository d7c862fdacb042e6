#include "geowave/errors.h"
#include "geowave/exact_geodesics.h"
#include "geowave/generators.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace geowave;

namespace {

std::string dataPath(const std::string& name) { return std::string(GEOWAVE_DATA_DIR) + "/" + name; }

Window edgeWindow(int h, Vec2 source, double sigma = 0.) {
  Window w;
  w.halfedge = h;
  w.source = source;
  w.sigma = sigma;
  return w;
}

} // namespace

TEST(TrimWindows, IdenticalWindowsKeepOne) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  int h = mesh.edgeHalfedge(0);
  double L = mesh.halfedgeLength(h);
  Window w = edgeWindow(h, {0.3 * L, -0.7});
  auto out = trimWindows(mesh, w, w);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].b0, 0.);
  EXPECT_DOUBLE_EQ(out[0].b1, 1.);
}

TEST(TrimWindows, DominatedIncomingVanishes) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  int h = mesh.edgeHalfedge(2);
  Window existing = edgeWindow(h, {0.4, -0.5}, 0.);
  Window incoming = edgeWindow(h, {0.4, -0.5}, 0.25);
  auto out = trimWindows(mesh, existing, incoming);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].sigma, 0.);
  EXPECT_DOUBLE_EQ(out[0].b0, 0.);
  EXPECT_DOUBLE_EQ(out[0].b1, 1.);
}

TEST(TrimWindows, MirrorSourcesSplitAtMidpoint) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  int h = mesh.edgeHalfedge(1);
  double L = mesh.halfedgeLength(h);
  Window left = edgeWindow(h, {-0.2 * L, -0.6});
  Window right = edgeWindow(h, {1.2 * L, -0.6});
  auto out = trimWindows(mesh, left, right);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out[0].b1, 0.5, 1e-12);
  EXPECT_NEAR(out[1].b0, 0.5, 1e-12);
  EXPECT_NEAR(out[0].source.x, left.source.x, 1e-15);
  EXPECT_NEAR(out[1].source.x, right.source.x, 1e-15);
}

TEST(TrimWindows, SurvivorIsPointwiseMinimum) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1., 2.);
  int h = mesh.edgeHalfedge(4);
  double L = mesh.halfedgeLength(h);
  for (int trial = 0; trial < 200; trial++) {
    Window a = edgeWindow(h, {u(rng), -std::abs(u(rng)) - 0.01}, std::abs(u(rng)) * 0.3);
    Window b = edgeWindow(h, {u(rng), -std::abs(u(rng)) - 0.01}, std::abs(u(rng)) * 0.3);
    a.b0 = 0.1;
    b.b1 = 0.8;
    auto out = trimWindows(mesh, a, b);
    for (int k = 0; k <= 100; k++) {
      double t = k / 100.;
      double best = INFINITY;
      if (t >= a.b0) best = std::min(best, a.distanceAt(L, t));
      if (t <= b.b1) best = std::min(best, b.distanceAt(L, t));
      bool covered = false;
      for (const auto& w : out) {
        if (t >= w.b0 - 1e-12 && t <= w.b1 + 1e-12) covered = true;
        // Interval endpoints are shared between neighbouring pieces; compare values strictly inside.
        if (t > w.b0 + 1e-9 && t < w.b1 - 1e-9) {
          EXPECT_LE(w.distanceAt(L, t), best + 1e-9) << "trial " << trial << " t " << t;
        }
      }
      EXPECT_TRUE(covered);
    }
  }
}

TEST(ExactSolver, CubeOppositeCorner) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  DistanceField field = propagate(mesh, SurfacePoint::atVertex(0), {true});
  EXPECT_NEAR(field.vertexDistance(6), std::sqrt(5.), 1e-9);
  EXPECT_NEAR(field.vertexDistance(0), 0., 0.);
  for (int v : {1, 3, 4}) EXPECT_NEAR(field.vertexDistance(v), 1., 1e-12);
  for (int v : {2, 5, 7}) EXPECT_NEAR(field.vertexDistance(v), std::sqrt(2.), 1e-12);
  EXPECT_EQ(field.stats().keyOrderViolations, 0);

  GeodesicPath path = extractPath(field, SurfacePoint::atVertex(6));
  EXPECT_NEAR(path.length, std::sqrt(5.), 1e-9);
  ASSERT_EQ(path.crossedEdges.size(), 1u);
  ASSERT_EQ(path.points.size(), 3u);
  EXPECT_EQ(path.points[1].kind, SurfacePoint::Kind::Edge);
  EXPECT_NEAR(path.points[1].edgeParam(), 0.5, 1e-9);
  EXPECT_LT(pathMaxDeviation(mesh, path), 1e-9);
}

TEST(ExactSolver, SourceIsZero) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  DistanceField field = propagate(mesh, SurfacePoint::atVertex(3));
  EXPECT_EQ(distanceAt(field, SurfacePoint::atVertex(3)), 0.);
  GeodesicPath path = extractPath(field, SurfacePoint::atVertex(3));
  EXPECT_EQ(path.length, 0.);
  EXPECT_TRUE(path.crossedEdges.empty());
}

TEST(ExactSolver, TetrahedronUnitEdges) {
  HalfedgeMesh mesh = loadMesh(dataPath("tetrahedron.off"));
  DistanceField field = propagate(mesh, SurfacePoint::atVertex(0), {true});
  for (int v = 1; v < 4; v++) {
    EXPECT_NEAR(field.vertexDistance(v), 1., 1e-12);
    GeodesicPath path = extractPath(field, SurfacePoint::atVertex(v));
    EXPECT_TRUE(path.crossedEdges.empty());
    EXPECT_EQ(path.points.size(), 2u);
  }
}

TEST(ExactSolver, FlatStripMatchesPlane) {
  for (int n : {8, 16, 32}) {
    HalfedgeMesh mesh = stripSoup(n).toMesh();
    DistanceField field = propagate(mesh, SurfacePoint::atVertex(0), {true});
    Vec3 s = mesh.position(0);
    for (int v = 0; v < mesh.nVertices(); v++) {
      EXPECT_NEAR(field.vertexDistance(v), (mesh.position(v) - s).norm(), 1e-10) << "n=" << n << " v=" << v;
    }
    for (int e = 0; e < mesh.nEdges(); e += 3) {
      SurfacePoint q = SurfacePoint::onEdge(e, 0.5);
      EXPECT_NEAR(distanceAt(field, q), (position3D(mesh, q) - s).norm(), 1e-10);
    }
    EXPECT_EQ(field.stats().keyOrderViolations, 0);
  }
}

TEST(ExactSolver, FlatStripFromInteriorVertex) {
  HalfedgeMesh mesh = stripSoup(16).toMesh();
  int src = -1;
  for (int v = 0; v < mesh.nVertices(); v++) {
    if (mesh.position(v).x == 3. && mesh.position(v).y == 0.5) src = v;
  }
  ASSERT_GE(src, 0);
  DistanceField field = propagate(mesh, SurfacePoint::atVertex(src), {true});
  for (int v = 0; v < mesh.nVertices(); v++) {
    EXPECT_NEAR(field.vertexDistance(v), (mesh.position(v) - mesh.position(src)).norm(), 1e-10);
  }
}

TEST(ExactSolver, LowerBoundAndSymmetry) {
  for (std::uint64_t seed = 1; seed <= 10; seed++) {
    HalfedgeMesh mesh = convexRandomSoup(12, seed).toMesh();
    DistanceField f0 = propagate(mesh, SurfacePoint::atVertex(0), {true});
    for (int v = 0; v < mesh.nVertices(); v++) {
      EXPECT_GE(f0.vertexDistance(v), (mesh.position(v) - mesh.position(0)).norm() - 1e-12);
      DistanceField fv = propagate(mesh, SurfacePoint::atVertex(v));
      EXPECT_NEAR(fv.vertexDistance(0), f0.vertexDistance(v), 1e-9) << "seed " << seed << " v " << v;
    }
  }
}

TEST(ExactSolver, FaceAndEdgeSources) {
  HalfedgeMesh mesh = loadMesh(dataPath("square_slab.off"));
  // Points on the same face: straight-line distance.
  int f = 0;
  SurfacePoint s = SurfacePoint::inFace(f, 0.2, 0.3, 0.5);
  SurfacePoint t = SurfacePoint::inFace(f, 0.6, 0.2, 0.2);
  DistanceField field = propagate(mesh, s, {true});
  EXPECT_NEAR(distanceAt(field, t), (position3D(mesh, s) - position3D(mesh, t)).norm(), 1e-12);
  GeodesicPath path = extractPath(field, t);
  EXPECT_EQ(path.points.size(), 2u);
  EXPECT_TRUE(path.crossedEdges.empty());

  // Flat slab: every vertex sits at planar distance from a source on an edge.
  SurfacePoint es = SurfacePoint::onEdge(0, 0.37);
  DistanceField ef = propagate(mesh, es, {true});
  for (int v = 0; v < mesh.nVertices(); v++) {
    EXPECT_NEAR(ef.vertexDistance(v), (mesh.position(v) - position3D(mesh, es)).norm(), 1e-10);
  }
}

TEST(ExactSolver, LPrismBendsAtReflexCorner) {
  HalfedgeMesh mesh = lPrismSoup().toMesh();
  // From (2,1,0) to (1,2,0) the shortest route hugs the reflex corner: two unit legs.
  DistanceField field = propagate(mesh, SurfacePoint::atVertex(2), {true});
  EXPECT_GT(field.stats().saddleSpawns, 0);
  EXPECT_EQ(field.stats().keyOrderViolations, 0);
  EXPECT_NEAR(field.vertexDistance(4), 2., 1e-12);
  GeodesicPath bent = extractPath(field, SurfacePoint::atVertex(4));
  auto through = pathInteriorVertices(bent);
  ASSERT_EQ(through.size(), 1u);
  EXPECT_TRUE(through[0] == 3 || through[0] == 9);
  for (int v = 0; v < mesh.nVertices(); v++) {
    GeodesicPath path = extractPath(field, SurfacePoint::atVertex(v));
    EXPECT_NEAR(path.length, field.vertexDistance(v), 1e-9);
    for (int w : pathInteriorVertices(path)) EXPECT_TRUE(isSaddleVertex(mesh, w)) << "bend at non-saddle " << w;
  }
}

TEST(ExactSolver, PathsAreStraightOnConvex) {
  HalfedgeMesh mesh = convexRandomSoup(60, 5).toMesh();
  DistanceField field = propagate(mesh, SurfacePoint::atVertex(0), {true});
  for (int v = 1; v < mesh.nVertices(); v++) {
    GeodesicPath path = extractPath(field, SurfacePoint::atVertex(v));
    EXPECT_NEAR(path.length, field.vertexDistance(v), 1e-9);
    EXPECT_TRUE(pathInteriorVertices(path).empty());
    EXPECT_LT(pathMaxDeviation(mesh, path), 1e-8);
  }
}

TEST(ExactSolver, BadSourceThrows) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  EXPECT_THROW(propagate(mesh, SurfacePoint::atVertex(42)), BadParameter);
}
