#include "geowave/wavefront.h"

#include "geowave/errors.h"
#include "wavefront_detail.h"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace geowave {

namespace detail {

double cornerAngle(const HalfedgeMesh& mesh, int h) {
  Vec3 p = mesh.position(mesh.origin(h));
  Vec3 a = mesh.position(mesh.dest(h)) - p;
  Vec3 b = mesh.position(mesh.origin(mesh.prev(h))) - p;
  return std::atan2(cross(a, b).norm(), dot(a, b));
}

std::vector<double> outgoingAngles(const HalfedgeMesh& mesh) {
  std::vector<double> alpha(mesh.nHalfedges(), 0.);
  for (int v = 0; v < mesh.nVertices(); v++) {
    double acc = 0.;
    for (int h : mesh.outgoingHalfedges(v)) {
      alpha[h] = acc;
      acc += cornerAngle(mesh, h);
    }
  }
  return alpha;
}

CornerLayout sourcePlacement(const HalfedgeMesh& mesh, const SurfacePoint& source, int f) {
  CornerLayout out;
  if (source.kind == SurfacePoint::Kind::Face) {
    out.h = mesh.faceHalfedge(f);
    out.pos = halfedgeFrameLayout(mesh, out.h);
    Vec2 s = positionInFace(mesh, f, source);
    for (Vec2& p : out.pos) p = p - s;
    return out;
  }
  // Edge source: the frame of the edge's canonical halfedge, shifted to the source point.
  int h0 = mesh.edgeHalfedge(source.id);
  double L = mesh.halfedgeLength(h0);
  Vec2 s{source.edgeParam() * L, 0.};
  if (mesh.face(h0) == f) {
    out.h = h0;
    out.pos = halfedgeFrameLayout(mesh, h0);
  } else {
    out.h = mesh.twin(h0);
    out.pos = halfedgeFrameLayout(mesh, out.h);
    for (Vec2& p : out.pos) p = {L - p.x, -p.y};
  }
  for (Vec2& p : out.pos) p = p - s;
  return out;
}

Vec2 CornerLayout::at(const HalfedgeMesh& mesh, int v) const {
  if (mesh.origin(h) == v) return pos[0];
  if (mesh.dest(h) == v) return pos[1];
  return pos[2];
}

double wedgeDistance(const EdgeImage& im, double t0, double t1, double lo, double hi, double period) {
  const Vec2 a = im.a, b = im.b;
  const double scale = std::max(a.norm(), b.norm());
  const double eps = 1e-12 * std::max(scale, 1e-300);
  auto at = [&](double t) { return a + (b - a) * t; };
  // Angle of the point at parameter t, continuous along the image.
  const bool fromCenter = a.norm() <= eps || b.norm() <= eps;
  auto angle = [&](double t) {
    if (fromCenter) return a.norm() <= eps ? im.thetaB : im.thetaA;
    return im.thetaA + signedAngle(a, at(t));
  };
  // Parameter where the ray at angle phi meets the image's supporting line.
  auto rayParam = [&](double phi, double fallback) {
    Vec2 u{std::cos(phi), std::sin(phi)};
    double den = cross(u, b - a);
    if (std::abs(den) <= 1e-15 * scale) return fallback;
    return std::clamp(-cross(u, a) / den, std::min(t0, t1), std::max(t0, t1));
  };

  double p0 = angle(t0), p1 = angle(t1);
  double s0 = t0, s1 = t1;
  if (p0 > p1) {
    std::swap(p0, p1);
    std::swap(s0, s1);
  }
  double best = kInf;
  for (int k = -2; k <= 2; k++) {
    double w0 = lo + k * period, w1 = hi + k * period;
    double u0 = std::max(p0, w0), u1 = std::min(p1, w1);
    if (u0 > u1 + 1e-12) continue;
    double tu0 = s0, tu1 = s1;
    if (!fromCenter) {
      if (u0 > p0) tu0 = rayParam(u0, s0);
      if (u1 < p1) tu1 = rayParam(u1, s1);
    }
    best = std::min(best, pointSegmentDistance({0., 0.}, at(tu0), at(tu1)));
  }
  return best;
}

double windowWedgeDistance(const HalfedgeMesh& mesh, const Window& w, double u0, double u1, double lo, double hi,
                           double period) {
  const double L = mesh.halfedgeLength(w.halfedge);
  const bool canonical = mesh.edgeHalfedge(mesh.edge(w.halfedge)) == w.halfedge;
  const double a0 = canonical ? u0 : 1. - u1, a1 = canonical ? u1 : 1. - u0;
  const double s0 = std::max(a0, w.b0), s1 = std::min(a1, w.b1);
  if (s0 > s1 + 1e-15) return kInf;
  const double x0 = s0 * L, x1 = std::max(s0, s1) * L;
  const Vec2 S = w.source;
  auto axisDistance = [&](double xa, double xb) { return Vec2{std::clamp(S.x, xa, xb) - S.x, S.y}.norm(); };
  auto inWedge = [&](double theta) {
    for (int k = -2; k <= 2; k++) {
      if (theta >= lo + k * period - 1e-12 && theta <= hi + k * period + 1e-12) return true;
    }
    return false;
  };
  if (S.y > -1e-12 * L) {
    // Grazing: the whole interval lies in one direction from the center.
    double theta = w.heading + (0.5 * (x0 + x1) >= S.x ? 0. : std::numbers::pi);
    return inWedge(theta) ? axisDistance(x0, x1) : kInf;
  }
  // Angle around the center, decreasing along the edge.
  auto theta = [&](double x) { return w.heading + std::atan2(-S.y, x - S.x); };
  auto xAt = [&](double phi) {
    double a = phi - w.heading;
    return std::clamp(S.x - S.y * std::cos(a) / std::sin(a), x0, x1);
  };
  const double th0 = theta(x0), th1 = theta(x1);
  double best = kInf;
  for (int k = -2; k <= 2; k++) {
    double v0 = std::max(th1, lo + k * period), v1 = std::min(th0, hi + k * period);
    if (v0 > v1 + 1e-12) continue;
    double xa = v1 < th0 ? xAt(v1) : x0, xb = v0 > th1 ? xAt(v0) : x1;
    if (xa > xb) std::swap(xa, xb);
    best = std::min(best, axisDistance(xa, xb));
  }
  return best;
}

HeadingObserver::HeadingObserver(const HalfedgeMesh& mesh, const SurfacePoint& source)
    : mesh_(mesh), source_(canonicalize(mesh, source)), src_(source_.isVertex() ? source_.id : -1),
      alpha_(outgoingAngles(mesh)) {}

void HeadingObserver::seed(Window& w) {
  const double L = mesh_.halfedgeLength(w.halfedge);
  const int c = w.lineage >= 0 ? w.lineage : src_;
  if (w.grazing(L)) {
    // Along an edge from its origin: the edge's own direction. An edge source's frame is the edge frame.
    w.heading = c >= 0 ? alpha_[w.halfedge] : 0.;
    return;
  }
  Vec2 M{0.5 * (w.b0 + w.b1) * L, 0.};
  double theta;
  if (c >= 0) {
    // Opposite edge of a corner at c; prev(twin) leaves c towards dest(halfedge) at (L, 0).
    int hk = mesh_.prev(mesh_.twin(w.halfedge));
    theta = alpha_[hk] + signedAngle(Vec2{L, 0.} - w.source, M - w.source);
  } else {
    int hk = mesh_.twin(w.halfedge);
    CornerLayout pl = sourcePlacement(mesh_, source_, mesh_.face(hk));
    Vec2 P = pl.at(mesh_, mesh_.origin(hk)), Q = pl.at(mesh_, mesh_.dest(hk));
    double bm = 0.5 * (w.b0 + w.b1);
    theta = polar(Q + (P - Q) * bm);
  }
  w.heading = theta - polar(M - w.source);
}

void HeadingObserver::derive(Window& child, const Window& parent) {
  const int h = parent.halfedge;
  auto lay = halfedgeFrameLayout(mesh_, h);
  const int hk = mesh_.twin(child.halfedge);
  Vec2 P, Q; // child frame: Q at the origin, P on +x
  if (hk == mesh_.prev(h)) {
    P = lay[2];
    Q = lay[0];
  } else {
    P = lay[1];
    Q = lay[2];
  }
  double bm = 0.5 * (child.b0 + child.b1);
  Vec2 inParent = Q + (P - Q) * bm;
  double theta = parent.heading + polar(inParent - parent.source);
  Vec2 inChild{bm * mesh_.halfedgeLength(child.halfedge), 0.};
  child.heading = theta - polar(inChild - child.source);
}

std::vector<std::pair<double, double>> complement(const std::vector<std::pair<double, double>>& swept) {
  std::vector<std::pair<double, double>> out;
  double cur = 0.;
  for (auto [lo, hi] : swept) {
    if (lo > cur + 1e-12) out.push_back({cur, lo});
    cur = std::max(cur, hi);
  }
  if (cur < 1. - 1e-12) out.push_back({cur, 1.});
  return out;
}

} // namespace detail

using namespace detail;

// ---------------------------------------------------------------------------------------------------------------
// Center unfoldings

CenterUnfolding::CenterUnfolding(const HalfedgeMesh& mesh, const SurfacePoint& center, int maxDepth)
    : images_(mesh.nEdges()) {
  struct Entry {
    double key;
    int h; // entering face(h)
    Vec2 po, pd;
    double to, td;
    int depth;
    bool operator>(const Entry& o) const { return std::tie(key, h) > std::tie(o.key, o.h); }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<char> visited(mesh.nFaces(), 0);

  // Keeps the image nearest to the center.
  auto record = [&](int h, Vec2 po, double to, Vec2 pd, double td) {
    int e = mesh.edge(h);
    EdgeImage im;
    im.valid = true;
    bool canonical = mesh.edgeHalfedge(e) == h;
    im.a = canonical ? po : pd;
    im.b = canonical ? pd : po;
    im.thetaA = canonical ? to : td;
    im.thetaB = canonical ? td : to;
    EdgeImage& cur = images_[e];
    if (!cur.valid || pointSegmentDistance({0., 0.}, im.a, im.b) < pointSegmentDistance({0., 0.}, cur.a, cur.b)) {
      cur = im;
    }
  };
  auto push = [&](int h, Vec2 po, double to, Vec2 pd, double td, int depth) {
    if (depth >= maxDepth || visited[mesh.face(h)]) return;
    queue.push({pointSegmentDistance({0., 0.}, po, pd), h, po, pd, to, td, depth + 1});
  };
  // Angle of q continued from p.
  auto continueAngle = [](Vec2 p, double tp, Vec2 q) { return tp + signedAngle(p, q); };

  if (center.isVertex()) {
    const int c = center.id;
    double alpha = 0.;
    for (int h : mesh.outgoingHalfedges(c)) {
      double corner = cornerAngle(mesh, h);
      Rigid2 rot{alpha, {}};
      auto lay = halfedgeFrameLayout(mesh, h);
      Vec2 p1 = rot.apply(lay[1]), p2 = rot.apply(lay[2]);
      double t1 = alpha, t2 = alpha + corner;
      visited[mesh.face(h)] = 1;
      int hn = mesh.next(h), hp = mesh.prev(h);
      record(h, {0., 0.}, t1, p1, t1);
      record(hp, p2, t2, {0., 0.}, t2);
      record(hn, p1, t1, p2, t2);
      push(mesh.twin(hn), p2, t2, p1, t1, 0);
      alpha += corner;
    }
    period_ = alpha;
  } else {
    period_ = 2. * std::numbers::pi;
    for (int f : incidentFaces(mesh, center)) {
      CornerLayout pl = sourcePlacement(mesh, center, f);
      visited[f] = 1;
      int hs[3] = {pl.h, mesh.next(pl.h), mesh.prev(pl.h)};
      for (int i = 0; i < 3; i++) {
        Vec2 po = pl.pos[i], pd = pl.pos[(i + 1) % 3];
        double to = polar(po);
        double td = continueAngle(po, to, pd);
        if (center.kind == SurfacePoint::Kind::Edge && mesh.edge(hs[i]) == center.id) continue;
        record(hs[i], po, to, pd, td);
        push(mesh.twin(hs[i]), pd, td, po, to, 0);
      }
    }
  }

  while (!queue.empty()) {
    Entry top = queue.top();
    queue.pop();
    int f = mesh.face(top.h);
    if (visited[f]) continue;
    visited[f] = 1;
    int hn = mesh.next(top.h), hp = mesh.prev(top.h);
    Vec2 x = layoutTriangleVertex(top.po, top.pd, mesh.halfedgeLength(hp), mesh.halfedgeLength(hn));
    double tx = top.pd.norm() > 0. ? continueAngle(top.pd, top.td, x) : continueAngle(top.po, top.to, x);
    record(hn, top.pd, top.td, x, tx);
    record(hp, x, tx, top.po, top.to);
    push(mesh.twin(hn), x, tx, top.pd, top.td, top.depth);
    push(mesh.twin(hp), top.po, top.to, x, tx, top.depth);
  }
}

// ---------------------------------------------------------------------------------------------------------------
// State

WavefrontState::WavefrontState(const HalfedgeMesh& mesh, const SurfacePoint& source,
                               std::shared_ptr<const DistanceField> reference)
    : mesh_(&mesh), reference_(std::move(reference)), maxDepth_(std::max(32, mesh.nFaces())), tieTol_(1e-12 * mesh.diameter()) {
  validate(mesh, source);
  source_ = canonicalize(mesh, source);
  if (reference_ && (&reference_->mesh() != &mesh || reference_->source().kind != source_.kind ||
                     reference_->source().id != source_.id || reference_->source().coords != source_.coords)) {
    throw BadParameter("reference propagation is for another mesh or source");
  }
  const int E = mesh.nEdges();
  inB_.assign(E, 1);
  swept_.assign(E, {});
  assoc_.assign(E, -1);
  assocKey_.assign(E, kInf);
  auto exclude = [&](int e) {
    if (!inB_[e]) return;
    inB_[e] = 0;
    swept_[e] = {{0., 1.}};
  };
  switch (source_.kind) {
  case SurfacePoint::Kind::Vertex:
    for (int h : mesh.outgoingHalfedges(source_.id)) exclude(mesh.edge(h));
    break;
  case SurfacePoint::Kind::Edge:
    exclude(source_.id);
    break;
  case SurfacePoint::Kind::Face:
    for (int h : mesh.faceHalfedges(source_.id)) exclude(mesh.edge(h));
    break;
  }
  boundarySize_ = static_cast<int>(std::count(inB_.begin(), inB_.end(), 1));
}

int WavefrontState::position(int arc) const {
  auto it = std::find(order_.begin(), order_.end(), arc);
  return it == order_.end() ? -1 : static_cast<int>(it - order_.begin());
}

std::vector<int> WavefrontState::boundaryEdges() const {
  std::vector<int> out;
  for (int e = 0; e < mesh_->nEdges(); e++) {
    if (inB_[e]) out.push_back(e);
  }
  return out;
}

double WavefrontState::period(int center) const {
  if (center >= 0) return vertexTotalAngle(*mesh_, center);
  return source_.isVertex() ? vertexTotalAngle(*mesh_, source_.id) : 2. * std::numbers::pi;
}

const CenterUnfolding& WavefrontState::unfolding(int center) const {
  auto it = unfoldings_.find(center);
  if (it == unfoldings_.end()) {
    SurfacePoint c = center >= 0 ? SurfacePoint::atVertex(center) : source_;
    it = unfoldings_.emplace(center, CenterUnfolding(*mesh_, c, maxDepth_)).first;
  }
  return it->second;
}

int WavefrontState::addArc(int center, double d, double thetaLo, double thetaHi, int after) {
  if (!(thetaHi > thetaLo)) throw BadParameter("arc extent must be positive");
  double P = period(center);
  if (thetaHi - thetaLo > P + 1e-12) throw BadParameter("arc extent exceeds the total angle at its center");
  double shift = std::floor(thetaLo / P) * P;
  WavefrontArc a;
  a.id = static_cast<int>(arcs_.size());
  a.center = center;
  a.d = d;
  a.radius = std::max(0., radius_ - d);
  a.thetaLo = thetaLo - shift;
  a.thetaHi = thetaHi - shift;
  arcs_.push_back(a);
  nearest_.push_back(-1);
  nearestKey_.push_back(kInf);
  int pos = after >= 0 ? position(after) : -1;
  if (pos < 0) {
    order_.push_back(a.id);
  } else {
    order_.insert(order_.begin() + pos + 1, a.id);
  }
  return a.id;
}

std::pair<int, int> WavefrontState::splitArc(int id, double theta) {
  WavefrontArc parent = arcs_[id];
  if (!parent.alive || !(theta > parent.thetaLo && theta < parent.thetaHi)) {
    throw BadParameter("split angle outside the arc");
  }
  int pos = position(id);
  int a = addArc(parent.center, parent.d, parent.thetaLo, theta, id);
  int b = addArc(parent.center, parent.d, theta, parent.thetaHi, a);
  order_.erase(order_.begin() + pos);
  arcs_[id].alive = false;
  nearest_[id] = -1;
  nearestKey_[id] = kInf;
  return {a, b};
}

void WavefrontState::killArc(int id) {
  arcs_[id].alive = false;
  auto it = std::find(order_.begin(), order_.end(), id);
  if (it != order_.end()) order_.erase(it);
  nearest_[id] = -1;
  nearestKey_[id] = kInf;
}

void WavefrontState::setRadius(double r) {
  radius_ = r;
  for (int id : order_) arcs_[id].radius = std::max(0., r - arcs_[id].d);
}

void WavefrontState::removeFromBoundary(int e) {
  if (!inB_[e]) return;
  inB_[e] = 0;
  boundarySize_--;
  swept_[e] = {{0., 1.}};
  assoc_[e] = -1;
  assocKey_[e] = kInf;
}

void WavefrontState::setSwept(int e, std::vector<std::pair<double, double>> intervals) {
  swept_[e] = std::move(intervals);
}

double WavefrontState::arcEdgeKey(int arc, int e) const {
  const WavefrontArc& a = arcs_[arc];
  if (!a.alive || !inB_[e]) return kInf;
  double best = kInf;
  if (reference_) {
    const WindowStore& store = reference_->windows();
    const double P = period(a.center);
    for (int id : store.live(e)) {
      const Window& w = store.record(id).window;
      if (w.lineage != a.center) continue;
      for (auto [t0, t1] : complement(swept_[e])) {
        best = std::min(best, windowWedgeDistance(*mesh_, w, t0, t1, a.thetaLo, a.thetaHi, P));
      }
    }
    return a.d + best;
  }
  const CenterUnfolding& u = unfolding(a.center);
  const EdgeImage& im = u.image(e);
  if (!im.valid) return kInf;
  for (auto [t0, t1] : complement(swept_[e])) {
    best = std::min(best, wedgeDistance(im, t0, t1, a.thetaLo, a.thetaHi, u.period()));
  }
  return a.d + best;
}

double WavefrontState::arcEdgeDistance(int arc, int e) const {
  return std::max(0., arcEdgeKey(arc, e) - radius_);
}

int WavefrontState::computeAssociation(int e, double* keyOut) const {
  int best = -1;
  double bestKey = kInf;
  if (inB_[e]) {
    for (int id = 0; id < static_cast<int>(arcs_.size()); id++) {
      if (!arcs_[id].alive) continue;
      double k = arcEdgeKey(id, e);
      if (k < bestKey - tieTol_) {
        bestKey = k;
        best = id;
      }
    }
  }
  if (keyOut) *keyOut = bestKey;
  return best;
}

int WavefrontState::computeNearestEdge(int arc, double* keyOut) const {
  int best = -1;
  double bestKey = kInf;
  if (arcs_[arc].alive) {
    for (int e = 0; e < mesh_->nEdges(); e++) {
      if (!inB_[e]) continue;
      double k = arcEdgeKey(arc, e);
      if (k < bestKey - tieTol_) {
        bestKey = k;
        best = e;
      }
    }
  }
  if (keyOut) *keyOut = bestKey;
  return best;
}

void WavefrontState::reassociate(int e) { assoc_[e] = computeAssociation(e, &assocKey_[e]); }

void WavefrontState::renearest(int arc) { nearest_[arc] = computeNearestEdge(arc, &nearestKey_[arc]); }

void WavefrontState::offerArc(int arc) {
  for (int e = 0; e < mesh_->nEdges(); e++) {
    if (!inB_[e]) continue;
    double k = arcEdgeKey(arc, e);
    // Same rule as computeAssociation, where a new arc comes last in id order.
    if (k < assocKey_[e] - tieTol_) {
      assoc_[e] = arc;
      assocKey_[e] = k;
    }
  }
}

WavefrontState initWavefront(const HalfedgeMesh& mesh, const SurfacePoint& source,
                             std::shared_ptr<const DistanceField> reference) {
  WavefrontState st(mesh, source, std::move(reference));
  int a = st.addArc(-1, 0., 0., st.period(-1));
  for (int e = 0; e < mesh.nEdges(); e++) st.reassociate(e);
  st.renearest(a);
  return st;
}

DistanceField propagateWithHeadings(const HalfedgeMesh& mesh, const SurfacePoint& source) {
  HeadingObserver headings(mesh, source);
  PropagateOptions opts;
  opts.observer = &headings;
  return propagate(mesh, source, opts);
}

int associate(const WavefrontState& state, int e) {
  if (e < 0 || e >= state.mesh().nEdges()) throw IndexOutOfRange("edge " + std::to_string(e));
  if (!state.inBoundary(e)) throw BadParameter("edge " + std::to_string(e) + " is not in B");
  int a = state.computeAssociation(e);
  if (a < 0) throw NoPath("no wavefront arc sees edge " + std::to_string(e));
  return a;
}

// ---------------------------------------------------------------------------------------------------------------
// Sections

namespace {

// Maximal runs of equal keys in a cyclic sequence; a run wrapping past the end is joined to the first one.
std::vector<std::pair<int, std::vector<int>>> cyclicRuns(const std::vector<int>& items, const std::vector<int>& keys) {
  std::vector<std::pair<int, std::vector<int>>> runs;
  for (size_t i = 0; i < items.size(); i++) {
    if (runs.empty() || runs.back().first != keys[i]) runs.push_back({keys[i], {}});
    runs.back().second.push_back(items[i]);
  }
  if (runs.size() > 1 && runs.front().first == runs.back().first) {
    auto& tail = runs.back().second;
    tail.insert(tail.end(), runs.front().second.begin(), runs.front().second.end());
    runs.front().second = std::move(tail);
    runs.pop_back();
  }
  return runs;
}

std::vector<Section> group(const WavefrontState& st, const std::vector<int>& assoc, const std::vector<int>& nearest) {
  std::vector<Section> out;
  // B is ordered along W: by the position of the associated arc, then by edge id.
  std::vector<int> edges = st.boundaryEdges();
  std::vector<int> pos(st.arcs().size(), INT_MAX);
  for (size_t i = 0; i < st.order().size(); i++) pos[st.order()[i]] = static_cast<int>(i);
  auto rank = [&](int e) { return assoc[e] >= 0 ? pos[assoc[e]] : INT_MAX; };
  std::sort(edges.begin(), edges.end(), [&](int x, int y) { return std::pair(rank(x), x) < std::pair(rank(y), y); });
  std::vector<int> keys;
  for (int e : edges) keys.push_back(assoc[e]);
  for (auto& [partner, members] : cyclicRuns(edges, keys)) {
    out.push_back({Section::Kind::Boundary, std::move(members), partner});
  }
  if (!edges.empty()) {
    keys.clear();
    for (int a : st.order()) keys.push_back(nearest[a]);
    for (auto& [partner, members] : cyclicRuns(st.order(), keys)) {
      out.push_back({Section::Kind::Wavefront, std::move(members), partner});
    }
  }
  return out;
}

} // namespace

std::vector<Section> groupSections(const WavefrontState& state) {
  std::vector<int> assoc(state.mesh().nEdges()), nearest(state.arcs().size());
  for (int e = 0; e < state.mesh().nEdges(); e++) assoc[e] = state.association(e);
  for (size_t a = 0; a < nearest.size(); a++) nearest[a] = state.nearestEdge(static_cast<int>(a));
  return group(state, assoc, nearest);
}

std::vector<Section> groupSectionsFromScratch(const WavefrontState& state) {
  std::vector<int> assoc(state.mesh().nEdges()), nearest(state.arcs().size());
  for (int e = 0; e < state.mesh().nEdges(); e++) assoc[e] = state.computeAssociation(e);
  for (size_t a = 0; a < nearest.size(); a++) nearest[a] = state.computeNearestEdge(static_cast<int>(a));
  return group(state, assoc, nearest);
}

} // namespace geowave
