#include "geowave/errors.h"
#include "geowave/exact_geodesics.h"
#include "geowave/generators.h"
#include "geowave/oracles.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace geowave;

namespace {

std::string dataPath(const std::string& name) { return std::string(GEOWAVE_DATA_DIR) + "/" + name; }

SurfacePoint randomFacePoint(const HalfedgeMesh& mesh, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> face(0, mesh.nFaces() - 1);
  std::uniform_real_distribution<double> u(0.05, 1.);
  double a = u(rng), b = u(rng), c = u(rng), s = a + b + c;
  return SurfacePoint::inFace(face(rng), a / s, b / s, c / s);
}

// Face point at a 3D position lying on the surface.
SurfacePoint locate(const HalfedgeMesh& mesh, Vec3 p) {
  for (int f = 0; f < mesh.nFaces(); f++) {
    auto vs = mesh.faceVertices(f);
    Vec3 a = mesh.position(vs[0]), b = mesh.position(vs[1]), c = mesh.position(vs[2]);
    Vec3 n = cross(b - a, c - a);
    if (std::abs(dot(n, p - a)) > 1e-12 * n.norm()) continue;
    double area = n.norm2();
    double wa = dot(cross(b - p, c - p), n) / area, wb = dot(cross(c - p, a - p), n) / area;
    double wc = 1. - wa - wb;
    if (wa >= 0. && wb >= 0. && wc >= 0.) return SurfacePoint::inFace(f, wa, wb, wc);
  }
  throw BadParameter("point not on surface");
}

} // namespace

TEST(BruteForce, CubeOppositeCorners) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  auto r = bruteForceGeodesic(mesh, SurfacePoint::atVertex(0), SurfacePoint::atVertex(6), {4});
  EXPECT_NEAR(r.length, std::sqrt(5.), 1e-12);
  ASSERT_EQ(r.legs.size(), 1u);
  EXPECT_LE(r.legs[0].faces.size(), 4u);
  EXPECT_TRUE(r.turnVertices.empty());
}

TEST(BruteForce, SameFaceIsStraight) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  SurfacePoint s = SurfacePoint::inFace(5, 0.1, 0.6, 0.3), t = SurfacePoint::inFace(5, 0.5, 0.25, 0.25);
  auto r = bruteForceGeodesic(mesh, s, t);
  EXPECT_NEAR(r.length, (position3D(mesh, s) - position3D(mesh, t)).norm(), 1e-12);
  EXPECT_EQ(bruteForceGeodesic(mesh, s, s).length, 0.);
}

TEST(BruteForce, TetrahedronEdges) {
  HalfedgeMesh mesh = loadMesh(dataPath("tetrahedron.off"));
  for (int a = 0; a < 4; a++) {
    for (int b = a + 1; b < 4; b++) {
      EXPECT_NEAR(bruteForceGeodesic(mesh, SurfacePoint::atVertex(a), SurfacePoint::atVertex(b)).length, 1., 1e-12);
    }
  }
}

TEST(BruteForce, TurnsAtReflexCorner) {
  HalfedgeMesh mesh = lPrismSoup().toMesh();
  // Two points on the floor of the L, on either side of the reflex corner (1,1,0).
  SurfacePoint s = locate(mesh, {1.9, 0.9, 0.}), t = locate(mesh, {0.9, 1.9, 0.});
  auto r = bruteForceGeodesic(mesh, s, t);
  EXPECT_NEAR(r.length, 2. * std::sqrt(0.82), 1e-12);
  ASSERT_EQ(r.turnVertices.size(), 1u);
  EXPECT_EQ(r.turnVertices[0], 3);
  // A straight unfolding has to detour over the walls.
  EXPECT_GT(directUnfoldedDistance(mesh, s, t, 24), r.length + 1e-3);
}

TEST(BruteForce, DepthExceeded) {
  HalfedgeMesh mesh = stripSoup(16).toMesh();
  EXPECT_THROW(bruteForceGeodesic(mesh, SurfacePoint::atVertex(0), SurfacePoint::atVertex(8), {2}), DepthExceeded);
}

TEST(BruteForce, LowerBoundedByChord) {
  std::mt19937_64 rng(3);
  HalfedgeMesh mesh = convexRandomSoup(10, 4).toMesh();
  for (int i = 0; i < 30; i++) {
    SurfacePoint s = randomFacePoint(mesh, rng), t = randomFacePoint(mesh, rng);
    auto r = bruteForceGeodesic(mesh, s, t);
    EXPECT_GE(r.length, (position3D(mesh, s) - position3D(mesh, t)).norm() - 1e-12);
  }
}

TEST(BruteForce, AgreesWithExactSolverOnConvex) {
  for (std::uint64_t seed = 1; seed <= 5; seed++) {
    HalfedgeMesh mesh = convexRandomSoup(10, seed).toMesh();
    DistanceField field = propagate(mesh, SurfacePoint::atVertex(0));
    for (int v = 1; v < mesh.nVertices(); v++) {
      auto r = bruteForceGeodesic(mesh, SurfacePoint::atVertex(0), SurfacePoint::atVertex(v));
      EXPECT_NEAR(field.vertexDistance(v), r.length, 1e-7) << "seed " << seed << " v " << v;
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 10; i++) {
      SurfacePoint q = randomFacePoint(mesh, rng);
      EXPECT_NEAR(distanceAt(field, q), bruteForceGeodesic(mesh, SurfacePoint::atVertex(0), q).length, 1e-7);
    }
  }
}

TEST(Steiner, NodeCountAndNesting) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  for (int level : {0, 1, 5}) EXPECT_EQ(SteinerGraph(mesh, level).nNodes(), 8 + level * 18);
  EXPECT_DOUBLE_EQ(SteinerGraph::steinerParameter(0), 0.5);
  EXPECT_DOUBLE_EQ(SteinerGraph::steinerParameter(1), 0.25);
  EXPECT_DOUBLE_EQ(SteinerGraph::steinerParameter(2), 0.75);
  EXPECT_DOUBLE_EQ(SteinerGraph::steinerParameter(6), 0.875);
  EXPECT_THROW(SteinerGraph(mesh, -1), BadParameter);
}

TEST(Steiner, CubeLevels) {
  HalfedgeMesh mesh = loadMesh(dataPath("cube.off"));
  SurfacePoint s = SurfacePoint::atVertex(0), t = SurfacePoint::atVertex(6);
  // Level 0 is the triangulation's edge graph; the face diagonals are mesh edges, so one unit edge plus one
  // diagonal.
  EXPECT_NEAR(steinerDijkstra(mesh, s, t, 0), 1. + std::sqrt(2.), 1e-12);
  // Level 8 recorded from the oracle: the midpoint of the crossed diagonal is already a node.
  const double level8 = 2.2360679774997898;
  EXPECT_NEAR(steinerDijkstra(mesh, s, t, 8), level8, 1e-12);
  EXPECT_LE(level8, std::sqrt(5.) * 1.02);
}

TEST(Steiner, FlatStripConvergesMonotonically) {
  HalfedgeMesh mesh = stripSoup(16).toMesh();
  SurfacePoint s = SurfacePoint::atVertex(0);
  int target = mesh.nVertices() - 8; // a far-end vertex
  Vec3 planar = mesh.position(target) - mesh.position(0);
  double prev = INFINITY;
  for (int level = 0; level <= 16; level++) {
    double d = steinerDijkstra(mesh, s, SurfacePoint::atVertex(target), level);
    EXPECT_LE(d, prev + 1e-12);
    EXPECT_GE(d, planar.norm() - 1e-12);
    prev = d;
  }
  EXPECT_LT(prev / planar.norm() - 1., 0.02);
}

TEST(Steiner, SandwichAndMonotone) {
  std::mt19937_64 rng(9);
  HalfedgeMesh mesh = convexRandomSoup(12, 2).toMesh();
  for (int q = 0; q < 10; q++) {
    SurfacePoint s = randomFacePoint(mesh, rng), t = randomFacePoint(mesh, rng);
    double exact = bruteForceGeodesic(mesh, s, t).length;
    double prev = INFINITY;
    for (int level = 0; level <= 16; level++) {
      double d = steinerDijkstra(mesh, s, t, level);
      EXPECT_GE(d, exact - 1e-9);
      EXPECT_LE(d, prev + 1e-12);
      prev = d;
    }
  }
}
