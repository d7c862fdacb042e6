#pragma once

#include "geowave/mesh.h"

#include <cstdint>
#include <string>
#include <vector>

namespace geowave {

struct PolygonSoup {
  std::vector<Vec3> positions;
  std::vector<std::vector<int>> polygons;

  HalfedgeMesh toMesh(std::string name = "") const { return HalfedgeMesh(positions, polygons, std::move(name)); }
};

// Flat 1 x (n/2) rectangle, doubly covered. The top sheet has n/2 unit cells split by rungs and diagonals; the far
// end carries n/4 extra vertices fanned from the last rung. The bottom sheet uses rung midpoints instead of rungs so
// the two sheets share only boundary edges. Vertex 0 is the near corner (0,0,0).
PolygonSoup stripSoup(int n);

// Convex hull of n uniformly random points on the unit sphere.
PolygonSoup convexRandomSoup(int n, std::uint64_t seed);

// Subdivided icosahedron on the unit sphere, with the subdivision level whose vertex count is closest to n.
PolygonSoup sphereApproxSoup(int n);

// Prism of height 1 over an L-shaped hexagon (a 2x2 square minus its upper-right unit cell). The two vertices over
// the reflex corner (3 and 9) have total angle 5*pi/2.
PolygonSoup lPrismSoup();

// 3D convex hull (incremental). Returns outward-oriented triangles over the input indices; interior points are
// dropped and the result is re-indexed.
PolygonSoup convexHull(const std::vector<Vec3>& points);

// Dispatch by name: "strip", "convex_random", "sphere_approx". Throws BadParameter.
PolygonSoup generateSoup(const std::string& kind, int n, std::uint64_t seed);

} // namespace geowave
