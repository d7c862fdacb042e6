#pragma once

#include "geowave/mesh.h"

#include <vector>

namespace geowave {

// Ground-truth helpers for tests and `geowave verify`. Nothing here touches the window solver.

struct FaceSequence {
  std::vector<int> faces;
  Vec2 sourceImage, targetImage;
  double length = 0.;
};

struct BruteForceOptions {
  int maxFaces = 24;
};

struct BruteForceResult {
  double length = 0.;
  // Straight unfolded legs; consecutive legs meet at saddle vertices.
  std::vector<FaceSequence> legs;
  std::vector<int> turnVertices;
  long long sequencesVisited = 0;
};

// Minimum over face sequences (no face repeated, at most maxFaces long) of the straight unfolded segment that stays
// inside the strip, combined through saddle vertices. Exact on convex meshes once maxFaces reaches the face count.
// Throws DepthExceeded when no sequence reaches t.
BruteForceResult bruteForceGeodesic(const HalfedgeMesh& mesh, const SurfacePoint& s, const SurfacePoint& t,
                                    const BruteForceOptions& opts = {});

// Straight unfolded distance only (no turning at vertices); +inf when no sequence within maxFaces works.
double directUnfoldedDistance(const HalfedgeMesh& mesh, const SurfacePoint& s, const SurfacePoint& t, int maxFaces,
                              FaceSequence* best = nullptr, long long* visited = nullptr);

// Nodes are the mesh vertices plus `level` points per edge; arcs join every pair of nodes on a common face.
// Edge points are nested across levels (dyadic order 1/2, 1/4, 3/4, 1/8, ...), so a level's graph contains every
// lower level's graph and the distance never increases with the level.
class SteinerGraph {
public:
  SteinerGraph(const HalfedgeMesh& mesh, int level);

  int level() const { return level_; }
  int nNodes() const { return static_cast<int>(nodes_.size()); }
  Vec3 nodePosition(int i) const { return nodes_[i]; }
  // Parameter (along edgeHalfedge) of the j-th Steiner point on an edge.
  static double steinerParameter(int j);

  // Shortest graph path between two surface points. Points that are not nodes are joined to every node of their
  // incident faces.
  double distance(const SurfacePoint& s, const SurfacePoint& t) const;
  // Distances from s to every mesh vertex.
  std::vector<double> vertexDistances(const SurfacePoint& s) const;

private:
  std::vector<double> run(const SurfacePoint& s, const SurfacePoint* t, double* tDist) const;

  const HalfedgeMesh* mesh_;
  int level_;
  std::vector<Vec3> nodes_;
  std::vector<std::vector<int>> faceNodes_;
};

double steinerDijkstra(const HalfedgeMesh& mesh, const SurfacePoint& s, const SurfacePoint& t, int level);

} // namespace geowave
