#pragma once

#include "geowave/mesh.h"

#include <cstdint>
#include <vector>

namespace geowave {

// An interval on one side of a mesh edge together with an unfolded pseudo-source.
//
// The window lives in the frame of `halfedge`: origin(halfedge) at (0,0), dest(halfedge) at (L,0), and
// face(halfedge) -- the face the window propagates into -- in the upper half plane. The pseudo-source sits on or
// below the x-axis. Over the interval, geodesic distance is  sigma + |(t*L, 0) - source|.
struct Window {
  int halfedge = -1;
  double b0 = 0.; // parameters along halfedge, 0 <= b0 < b1 <= 1
  double b1 = 1.;
  Vec2 source;
  double sigma = 0.; // geodesic distance from the true source to the pseudo-source
  int parent = -1;   // window this one was propagated from; -1 when seeded at a vertex or at the source
  int root = -1;     // for seeded windows: the vertex the pseudo-source sits on, -1 for a non-vertex source
  // Observer annotations, copied through crossing and trimming (see PropagationObserver).
  int lineage = -1;
  double heading = 0.;

  double distanceAt(double length, double t) const { return sigma + (Vec2{t * length, 0.} - source).norm(); }
  // Smallest distance attained over [b0, b1].
  double minDistance(double length) const {
    return sigma + pointSegmentDistance(source, {b0 * length, 0.}, {b1 * length, 0.});
  }
  // The pseudo-source lies on the edge's supporting line: nothing crosses into the face.
  bool grazing(double length) const { return source.y > -1e-12 * length; }
};

// A window expressed along its edge's canonical direction (edgeHalfedge), in length units:
//   f(x) = sigma + sqrt((x - a)^2 + h^2)  for x in [lo, hi].
struct CanonicalWindow {
  double lo = 0., hi = 0.;
  double a = 0., h = 0.;
  double sigma = 0.;

  double operator()(double x) const { return sigma + std::hypot(x - a, h); }
};

CanonicalWindow toCanonical(const HalfedgeMesh& mesh, const Window& w);

// Labelled pieces of an overlap interval: incomingWins marks where the incoming window is strictly shorter.
struct DominancePiece {
  double lo, hi;
  bool incomingWins;
};

// Splits [lo, hi] at the crossovers of the two distance functions and labels each piece. Ties (within tol) go to
// the existing window. Pieces narrower than minWidth are absorbed into their neighbours.
std::vector<DominancePiece> dominance(const CanonicalWindow& existing, const CanonicalWindow& incoming, double lo,
                                      double hi, double tol, double minWidth);

// Pairwise dominance update of two windows on the same edge. Returns the surviving pieces, ordered along the
// edge's canonical direction; at every parameter the survivor carries the smaller distance.
std::vector<Window> trimWindows(const HalfedgeMesh& mesh, const Window& existing, const Window& incoming);

// Result of pushing a window across face(w.halfedge).
struct FaceCrossing {
  std::vector<Window> children; // on the twins of the two far edges; parent is left unset
  int apexVertex = -1;
  bool apexVisible = false;
  double apexDistance = 0.;
};

FaceCrossing crossFace(const HalfedgeMesh& mesh, const Window& w);

// Windows emanating from a point source at vertex v with offset sigma: one per opposite edge of the one-ring,
// plus one grazing window along each incident edge.
std::vector<Window> vertexSourceWindows(const HalfedgeMesh& mesh, int v, double sigma);
// Seed windows for an arbitrary source point.
std::vector<Window> sourceWindows(const HalfedgeMesh& mesh, const SurfacePoint& source);

// Window storage with dominance trimming. Every window ever created keeps its record; `live` lists the ones whose
// interval currently belongs to the distance field.
class WindowStore {
public:
  explicit WindowStore(const HalfedgeMesh& mesh);

  struct Record {
    Window window;
    bool live = false;
    bool propagated = false;
  };

  struct InsertResult {
    int recordId = -1;               // the incoming window as given, before trimming (never live)
    std::vector<int> survivors;      // live pieces of the incoming window
    std::vector<int> replacedPending; // new pieces of trimmed windows that had not been propagated yet
    std::vector<int> killed;         // existing records that lost their whole interval or were split
  };

  int add(const Window& w); // record only
  InsertResult insert(const Window& w);

  const Record& record(int id) const { return records_[id]; }
  Record& record(int id) { return records_[id]; }
  int size() const { return static_cast<int>(records_.size()); }
  const std::vector<int>& live(int edge) const { return live_[edge]; }
  double tolerance() const { return tol_; }

private:
  const HalfedgeMesh* mesh_;
  std::vector<Record> records_;
  std::vector<std::vector<int>> live_;
  double tol_;
};

// Hooks into a propagation run, called in queue order. Used by the wavefront simulation to replay the run as
// events; the solver itself never reads the annotations.
class PropagationObserver {
public:
  virtual ~PropagationObserver() = default;
  // A seed window (at the source, or at a saddle vertex just reached) before insertion.
  virtual void seed(Window&) {}
  // A child produced by crossing parent's face, before insertion.
  virtual void derive(Window& /*child*/, const Window& /*parent*/) {}
  virtual void inserted(const WindowStore::InsertResult&, const WindowStore&) {}
  // Before / after the window with this queue key is pushed across its face.
  virtual void popping(double /*key*/, int /*id*/, const WindowStore&) {}
  virtual void popped(int /*id*/, const WindowStore&) {}
  // Vertex distance improved to d through window record `windowId`; seeds for a saddle spawn follow.
  virtual void vertexReached(int /*v*/, double /*d*/, int /*windowId*/, const WindowStore&) {}
  virtual void finished(const WindowStore&) {}
};

struct PropagateOptions {
  // Verify nondecreasing queue keys and window-cover invariants while running.
  bool debugChecks = false;
  PropagationObserver* observer = nullptr; // not owned
};

struct PropagateStats {
  std::int64_t windowsCreated = 0;
  std::int64_t windowsPropagated = 0;
  std::int64_t queuePops = 0;
  std::int64_t keyOrderViolations = 0;
  std::int64_t saddleSpawns = 0;
};

// Single-source geodesic distance field produced by window propagation.
class DistanceField {
public:
  const HalfedgeMesh& mesh() const { return *mesh_; }
  const SurfacePoint& source() const { return source_; }
  double vertexDistance(int v) const { return vertexDistance_[v]; }
  const std::vector<double>& vertexDistances() const { return vertexDistance_; }
  int vertexPredecessor(int v) const { return vertexPredecessor_[v]; }
  const WindowStore& windows() const { return store_; }
  const PropagateStats& stats() const { return stats_; }

private:
  friend DistanceField propagate(const HalfedgeMesh&, const SurfacePoint&, const PropagateOptions&);
  DistanceField(const HalfedgeMesh& mesh, SurfacePoint source) : mesh_(&mesh), source_(source), store_(mesh) {}

  const HalfedgeMesh* mesh_;
  SurfacePoint source_;
  WindowStore store_;
  std::vector<double> vertexDistance_;
  std::vector<int> vertexPredecessor_;
  PropagateStats stats_;
};

// The mesh must outlive the returned field.
DistanceField propagate(const HalfedgeMesh& mesh, const SurfacePoint& source, const PropagateOptions& opts = {});

double distanceAt(const DistanceField& field, const SurfacePoint& q);

struct GeodesicPath {
  std::vector<SurfacePoint> points; // source first
  double length = 0.;
  std::vector<int> crossedEdges;    // edges whose interior the path crosses, in order
};

GeodesicPath extractPath(const DistanceField& field, const SurfacePoint& target);

// Face shared by two consecutive path points; -1 if none.
int commonFace(const HalfedgeMesh& mesh, const SurfacePoint& p, const SurfacePoint& q);

// Largest distance of any path point from the chord of its straight run, measured in the planar unfolding of the
// crossed faces. Runs are split at vertices the path passes through.
double pathMaxDeviation(const HalfedgeMesh& mesh, const GeodesicPath& path);

// Interior path points that sit on mesh vertices.
std::vector<int> pathInteriorVertices(const GeodesicPath& path);

} // namespace geowave
