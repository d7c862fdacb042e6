#pragma once

#include "geowave/vector.h"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace geowave {

// Halfedge connectivity for a closed, triangulated 2-manifold. Immutable after construction.
//
// Conventions:
//  - faces are counter-clockwise seen from outside; halfedge h runs origin(h) -> dest(h) with face(h) on its left
//  - every halfedge has a twin; edge(h) == edge(twin(h))
//  - edgeHalfedge(e) is the lower-indexed halfedge of e and fixes the edge's canonical direction
class HalfedgeMesh {
public:
  struct Halfedge {
    int origin = -1;
    int twin = -1;
    int next = -1;
    int face = -1;
    int edge = -1;
  };

  // Builds from polygon faces (vertex index lists). Polygons with more than three vertices are fan-triangulated
  // from their first vertex. Throws NonManifold, OpenSurface, DegenerateFace, ParseError.
  HalfedgeMesh(std::vector<Vec3> positions, const std::vector<std::vector<int>>& polygons, std::string name = "");

  int nVertices() const { return static_cast<int>(positions_.size()); }
  int nFaces() const { return static_cast<int>(faceHalfedge_.size()); }
  int nEdges() const { return static_cast<int>(edgeHalfedge_.size()); }
  int nHalfedges() const { return static_cast<int>(halfedges_.size()); }
  int eulerCharacteristic() const { return nVertices() - nEdges() + nFaces(); }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Vec3 position(int v) const { return positions_[v]; }
  const std::vector<Vec3>& positions() const { return positions_; }

  const Halfedge& halfedge(int h) const { return halfedges_[h]; }
  int origin(int h) const { return halfedges_[h].origin; }
  int dest(int h) const { return halfedges_[halfedges_[h].twin].origin; }
  int twin(int h) const { return halfedges_[h].twin; }
  int next(int h) const { return halfedges_[h].next; }
  int prev(int h) const { return halfedges_[halfedges_[h].next].next; }
  int face(int h) const { return halfedges_[h].face; }
  int edge(int h) const { return halfedges_[h].edge; }

  int faceHalfedge(int f) const { return faceHalfedge_[f]; }
  int edgeHalfedge(int e) const { return edgeHalfedge_[e]; }
  int vertexHalfedge(int v) const { return vertexHalfedge_[v]; } // one outgoing halfedge

  std::array<int, 3> faceVertices(int f) const;
  std::array<int, 3> faceHalfedges(int f) const;
  std::array<int, 2> edgeVertices(int e) const { return {origin(edgeHalfedge(e)), dest(edgeHalfedge(e))}; }

  // Outgoing halfedges around v, in rotational order.
  std::vector<int> outgoingHalfedges(int v) const;

  double edgeLength(int e) const { return edgeLength_[e]; }
  double halfedgeLength(int h) const { return edgeLength_[halfedges_[h].edge]; }
  double faceArea(int f) const;
  double totalArea() const;
  // Diagonal of the axis-aligned bounding box.
  double diameter() const { return diameter_; }

  // Shared edge between two faces, as the halfedge lying in `from`; -1 when not adjacent.
  int sharedHalfedge(int from, int to) const;

private:
  std::string name_;
  std::vector<Vec3> positions_;
  std::vector<Halfedge> halfedges_;
  std::vector<int> faceHalfedge_;
  std::vector<int> edgeHalfedge_;
  std::vector<int> vertexHalfedge_;
  std::vector<double> edgeLength_;
  std::vector<std::string> warnings_;
  double diameter_ = 0.;
};

enum class MeshFormat { Auto, OFF, OBJ };

HalfedgeMesh loadMesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto);
HalfedgeMesh readOFF(std::istream& in, std::string name = "");
HalfedgeMesh readOBJ(std::istream& in, std::string name = "");
void writeOFF(std::ostream& out, const std::vector<Vec3>& positions, const std::vector<std::vector<int>>& polygons);
void writeOFF(std::ostream& out, const HalfedgeMesh& mesh);

// Sum of the triangle corner angles at v.
double vertexTotalAngle(const HalfedgeMesh& mesh, int v);
// Total angle exceeds 2*pi by more than kAngleTolerance; the only vertices a geodesic can bend around.
bool isSaddleVertex(const HalfedgeMesh& mesh, int v);
constexpr double kAngleTolerance = 1e-9;

// A point on the surface: at a vertex, on an edge (parameter along edgeHalfedge), or inside a face (barycentric
// coordinates in faceVertices order).
struct SurfacePoint {
  enum class Kind { Vertex, Edge, Face };

  Kind kind = Kind::Vertex;
  int id = 0;
  std::array<double, 3> coords{1., 0., 0.};

  static SurfacePoint atVertex(int v) { return {Kind::Vertex, v, {1., 0., 0.}}; }
  static SurfacePoint onEdge(int e, double t) { return {Kind::Edge, e, {t, 0., 0.}}; }
  static SurfacePoint inFace(int f, double b0, double b1, double b2) { return {Kind::Face, f, {b0, b1, b2}}; }

  bool isVertex() const { return kind == Kind::Vertex; }
  double edgeParam() const { return coords[0]; }
};

// Throws BadParameter when the id or coordinates are invalid.
void validate(const HalfedgeMesh& mesh, const SurfacePoint& p);
Vec3 position3D(const HalfedgeMesh& mesh, const SurfacePoint& p);
// Snap edge/face points that sit on a vertex or edge (within tol) to the lower-dimensional representation.
SurfacePoint canonicalize(const HalfedgeMesh& mesh, const SurfacePoint& p, double tol = 1e-12);
// Faces whose closure contains p.
std::vector<int> incidentFaces(const HalfedgeMesh& mesh, const SurfacePoint& p);
// Planar coordinates of p in the frame of halfedge h (see halfedgeFrameLayout); p must lie in the closure of
// face(h).
Vec2 positionInHalfedgeFrame(const HalfedgeMesh& mesh, int h, const SurfacePoint& p);
// Same, in the canonical frame of face f (see faceLayout).
Vec2 positionInFace(const HalfedgeMesh& mesh, int f, const SurfacePoint& p);

// Places the third corner of a triangle to the left of the directed segment a->b, given its distances to a and b.
Vec2 layoutTriangleVertex(Vec2 a, Vec2 b, double distA, double distB);

// Corner positions of face(h) in the frame of h: origin(h) at (0,0), dest(h) on +x, third vertex above.
std::array<Vec2, 3> halfedgeFrameLayout(const HalfedgeMesh& mesh, int h);

// Canonical placement of face f: frame of faceHalfedge(f).
inline std::array<Vec2, 3> faceLayout(const HalfedgeMesh& mesh, int f) {
  return halfedgeFrameLayout(mesh, mesh.faceHalfedge(f));
}

struct FacePlacement {
  int face = -1;
  Rigid2 transform;           // canonical face frame -> strip plane
  std::array<Vec2, 3> corners; // faceVertices order, in the strip plane
};

struct FoldLine {
  int edge = -1;
  Vec2 a, b; // images of edgeVertices(edge)
};

// Ordered face strip laid out in one plane. The first face is placed canonically.
struct PlanarUnfolding {
  std::vector<FacePlacement> placements;
  std::vector<FoldLine> folds; // folds[i] is shared by placements[i] and placements[i+1]

  // Image of a surface point lying in the closure of placements[i].face.
  Vec2 image(const HalfedgeMesh& mesh, int i, const SurfacePoint& p) const;
};

// Throws NotAdjacent if two consecutive faces share no edge.
PlanarUnfolding unfoldStrip(const HalfedgeMesh& mesh, const std::vector<int>& strip);

} // namespace geowave
