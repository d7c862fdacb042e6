#pragma once

#include "geowave/wavefront.h"

#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace geowave::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double signedAngle(Vec2 u, Vec2 v) { return std::atan2(cross(u, v), dot(u, v)); }
inline double polar(Vec2 v) { return std::atan2(v.y, v.x); }

// Angle at origin(h) inside face(h).
double cornerAngle(const HalfedgeMesh& mesh, int h);
// Angle of every halfedge around its origin, counter-clockwise from vertexHalfedge(origin).
std::vector<double> outgoingAngles(const HalfedgeMesh& mesh);

// Corners of a face in some frame: pos = {origin(h), dest(h), origin(prev(h))}.
struct CornerLayout {
  int h = -1;
  std::array<Vec2, 3> pos;

  Vec2 at(const HalfedgeMesh& mesh, int v) const;
};

// A face incident to a non-vertex source, in the source-centred frame (for an edge source, the frame of the edge's
// canonical halfedge).
CornerLayout sourcePlacement(const HalfedgeMesh& mesh, const SurfacePoint& source, int f);

// Distance from the origin to the part of im[t0, t1] whose angle lies in [lo, hi] modulo period.
double wedgeDistance(const EdgeImage& im, double t0, double t1, double lo, double hi, double period);

// Distance from the window's center image to the part of its interval that lies inside canonical edge parameters
// [u0, u1] and whose angle around the lineage center lies in [lo, hi] modulo period.
double windowWedgeDistance(const HalfedgeMesh& mesh, const Window& w, double u0, double u1, double lo, double hi,
                           double period);

// Annotates windows with their heading: the angle of the window frame's +x axis around the lineage center (the
// source, or the saddle vertex the window descends from).
class HeadingObserver : public PropagationObserver {
public:
  HeadingObserver(const HalfedgeMesh& mesh, const SurfacePoint& source);

  void seed(Window& w) override;
  void derive(Window& child, const Window& parent) override;

protected:
  const HalfedgeMesh& mesh_;
  SurfacePoint source_;
  int src_; // source vertex or -1
  std::vector<double> alpha_;
};

// [0, 1] minus sorted, disjoint intervals.
std::vector<std::pair<double, double>> complement(const std::vector<std::pair<double, double>>& swept);

} // namespace geowave::detail
