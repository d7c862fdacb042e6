#pragma once

#include "geowave/exact_geodesics.h"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

namespace geowave {

// One circular arc of the wavefront. Points on it are at distance d + radius from the source. The angular interval
// [thetaLo, thetaHi] is measured counter-clockwise around the center in its unfolded frame; angles around a vertex
// run over [0, total angle).
struct WavefrontArc {
  int id = -1;
  int center = -1; // saddle vertex, or -1 for the source
  double d = 0.;
  double radius = 0.;
  double thetaLo = 0., thetaHi = 0.;
  bool alive = true;

  double extent() const { return thetaHi - thetaLo; }
};

// Planar image of one edge seen from a center: endpoints in edgeVertices order, with their unwrapped angles.
struct EdgeImage {
  bool valid = false;
  Vec2 a, b;
  double thetaA = 0., thetaB = 0.;
};

// Edge images from a shortest-first search over faces, starting at the faces around the center. Each face is laid
// out once, through the sequence whose entry edge is nearest to the center.
class CenterUnfolding {
public:
  CenterUnfolding() = default;
  CenterUnfolding(const HalfedgeMesh& mesh, const SurfacePoint& center, int maxDepth);

  const EdgeImage& image(int e) const { return images_[e]; }
  double period() const { return period_; } // total angle around the center

private:
  std::vector<EdgeImage> images_;
  double period_ = 0.;
};

struct Section {
  enum class Kind { Boundary, Wavefront };
  Kind kind = Kind::Boundary;
  std::vector<int> members; // edges or arcs, in cyclic order
  int partner = -1;         // the common nearest arc / nearest edge; -1 when none is reachable

  bool operator==(const Section&) const = default;
};

// Wavefront W (arcs in cyclic order) and boundary set B (edges not yet fully swept), plus the association of
// edges to arcs. The simulation keeps the association up to date incrementally; the free functions below
// recompute it from scratch.
//
// Arc-to-edge distances come from a reference propagation when one is attached: its final windows on the edge,
// restricted to those descending from the arc's center, give the geodesic angle and distance of every edge point.
// Without a reference (hand-built configurations) each center's planar unfolding stands in.
class WavefrontState {
public:
  WavefrontState(const HalfedgeMesh& mesh, const SurfacePoint& source,
                 std::shared_ptr<const DistanceField> reference = nullptr);

  const HalfedgeMesh& mesh() const { return *mesh_; }
  const SurfacePoint& source() const { return source_; }
  const DistanceField* reference() const { return reference_.get(); }
  int sourceVertex() const { return source_.isVertex() ? source_.id : -1; }
  double radius() const { return radius_; }

  const std::vector<WavefrontArc>& arcs() const { return arcs_; } // every arc ever created, indexed by id
  const WavefrontArc& arc(int id) const { return arcs_[id]; }
  const std::vector<int>& order() const { return order_; }         // W: alive arcs in cyclic order
  int position(int arc) const;                                     // index in order(), -1 if dead

  bool inBoundary(int e) const { return inB_[e]; }
  int boundarySize() const { return boundarySize_; }
  std::vector<int> boundaryEdges() const;
  // Swept part of e as intervals of the canonical edge parameter.
  const std::vector<std::pair<double, double>>& swept(int e) const { return swept_[e]; }

  int association(int e) const { return assoc_[e]; }    // nearest arc, -1 if e is not in B or unreachable
  int nearestEdge(int arc) const { return nearest_[arc]; } // -1 if dead or nothing reachable

  // Mutation, used by the simulation and by tests that set up configurations by hand.
  int addArc(int center, double d, double thetaLo, double thetaHi, int after = -1); // W insert after `after`
  // Replaces the arc in W by its two halves at theta; returns their ids.
  std::pair<int, int> splitArc(int id, double theta);
  void killArc(int id);
  void setRadius(double r);
  void removeFromBoundary(int e);
  void setSwept(int e, std::vector<std::pair<double, double>> intervals);
  // Recompute the stored association of e / nearest edge of an arc from scratch.
  void reassociate(int e);
  void renearest(int arc);
  // Lets a new arc take over the edges it is strictly nearer to.
  void offerArc(int arc);

  int computeAssociation(int e, double* key = nullptr) const;
  int computeNearestEdge(int arc, double* key = nullptr) const;

  // d + distance from the center to the nearest unswept point of e inside the arc's wedge; +inf when the wedge does
  // not see e.
  double arcEdgeKey(int arc, int e) const;
  // Distance still to travel: arcEdgeKey - (current radius), clamped at zero.
  double arcEdgeDistance(int arc, int e) const;
  const CenterUnfolding& unfolding(int center) const;
  // Total angle around a center (2*pi for a non-vertex source).
  double period(int center) const;

private:
  const HalfedgeMesh* mesh_;
  SurfacePoint source_;
  std::shared_ptr<const DistanceField> reference_;
  double radius_ = 0.;
  int maxDepth_;
  double tieTol_; // keys closer than this count as equal; the smaller id wins
  std::vector<WavefrontArc> arcs_;
  std::vector<int> order_;
  std::vector<char> inB_;
  int boundarySize_ = 0;
  std::vector<std::vector<std::pair<double, double>>> swept_;
  std::vector<int> assoc_;
  std::vector<double> assocKey_;
  std::vector<int> nearest_;
  std::vector<double> nearestKey_;
  mutable std::map<int, CenterUnfolding> unfoldings_;
};

// Single arc at the source with extent equal to the total angle there (2*pi unless the source is a vertex);
// B = all edges not incident to the source's vertex, edge or face.
WavefrontState initWavefront(const HalfedgeMesh& mesh, const SurfacePoint& source,
                             std::shared_ptr<const DistanceField> reference = nullptr);

// Window propagation whose windows carry their lineage center and heading; usable as a state's reference.
DistanceField propagateWithHeadings(const HalfedgeMesh& mesh, const SurfacePoint& source);

// Arc nearest to e, ties (within 1e-12 of the mesh diameter) to the smaller id. Throws NoPath when no arc's wedge sees e.
int associate(const WavefrontState& state, int e);

// Sections from the state's stored association.
std::vector<Section> groupSections(const WavefrontState& state);
// Sections with the association recomputed from scratch.
std::vector<Section> groupSectionsFromScratch(const WavefrontState& state);

// Event kinds in tie-break order: first touch of a boundary edge (E1), edge fully swept (E2), vertex reached
// (E3), arc death (E4).
enum class EventKind { Touch = 1, Sweep = 2, Vertex = 3, Death = 4 };

const char* eventName(EventKind kind);

struct WavefrontEvent {
  EventKind kind = EventKind::Touch;
  double radius = 0.;
  int subject = -1; // edge (E1, E2), vertex (E3) or arc (E4)
  int arc = -1;     // touching / reaching arc; -1 if none
};

struct EventLog {
  std::int64_t crossings = 0; // distinct (arc, edge) pairs where a window of the arc entered the edge
  std::int64_t touches = 0;   // E1
  std::int64_t sweeps = 0;    // E2
  std::int64_t vertexEvents = 0; // E3
  std::int64_t deaths = 0;    // E4
  std::int64_t births = 0;
  std::int64_t splits = 0;
  std::int64_t spawns = 0;
  std::int64_t reassociations = 0;
  std::int64_t associationFailures = 0; // edges in B that no arc sees
  std::int64_t hullQueries = 0;
  std::int64_t hullVisits = 0;
  double hullMaxError = 0.; // arc polygonization error seen by the E1 hull queries
  std::int64_t maxSections = 0;
  std::vector<WavefrontEvent> events;
};

struct SimulationOptions {
  // Regroup from scratch after every event and compare; also checks W and event order. Throws
  // InvariantViolation with the event index.
  bool debugChecks = false;
  bool hullQueries = true;
  std::function<void(const WavefrontEvent&, const WavefrontState&)> onEvent;
};

struct WavefrontRun {
  WavefrontState state;
  EventLog log;
  std::vector<double> vertexRadius; // E3 radius per vertex; 0 at a vertex source, +inf if never reached
  DistanceField field;              // the propagation the events were read from
};

// Runs the simulation until B is empty. The events are read off a window propagation, so every vertex is reached
// at the solver's distance. A first propagation serves as the state's reference.
WavefrontRun simulateWavefront(const HalfedgeMesh& mesh, const SurfacePoint& source,
                               const SimulationOptions& opts = {});

// Total number of edge crossings over the shortest paths to every vertex.
std::int64_t countPathCrossings(const DistanceField& field);

} // namespace geowave
