#include "geowave/exact_geodesics.h"

#include "geowave/errors.h"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

namespace geowave {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Windows narrower than this (in edge parameter) are discarded.
constexpr double kMinWindowWidth = 1e-12;

// ---------------------------------------------------------------------------------------------------------------
// Window kernel

CanonicalWindow toCanonical(const HalfedgeMesh& mesh, const Window& w) {
  double L = mesh.halfedgeLength(w.halfedge);
  CanonicalWindow c;
  c.h = std::abs(w.source.y);
  c.sigma = w.sigma;
  if (mesh.edgeHalfedge(mesh.edge(w.halfedge)) == w.halfedge) {
    c.lo = w.b0 * L;
    c.hi = w.b1 * L;
    c.a = w.source.x;
  } else {
    c.lo = (1. - w.b1) * L;
    c.hi = (1. - w.b0) * L;
    c.a = L - w.source.x;
  }
  return c;
}

namespace {

// Sub-interval [x0, x1] of the canonical edge axis, mapped back to parameters along w.halfedge.
Window withCanonicalInterval(const HalfedgeMesh& mesh, const Window& w, double x0, double x1) {
  double L = mesh.halfedgeLength(w.halfedge);
  Window out = w;
  if (mesh.edgeHalfedge(mesh.edge(w.halfedge)) == w.halfedge) {
    out.b0 = x0 / L;
    out.b1 = x1 / L;
  } else {
    out.b0 = 1. - x1 / L;
    out.b1 = 1. - x0 / L;
  }
  out.b0 = std::clamp(out.b0, 0., 1.);
  out.b1 = std::clamp(out.b1, 0., 1.);
  return out;
}

// Real roots of A x^2 + B x + C = 0 (all of them, including near-degenerate cases).
std::vector<double> quadraticRoots(double A, double B, double C) {
  std::vector<double> roots;
  double scale = std::max({std::abs(A), std::abs(B), std::abs(C)});
  if (scale == 0.) return roots;
  if (std::abs(A) <= 1e-14 * scale) {
    if (std::abs(B) > 1e-14 * scale) roots.push_back(-C / B);
    return roots;
  }
  double disc = B * B - 4. * A * C;
  if (disc < 0.) {
    if (disc > -1e-12 * B * B) roots.push_back(-B / (2. * A));
    return roots;
  }
  double sq = std::sqrt(disc);
  double q = -0.5 * (B + (B >= 0. ? sq : -sq));
  roots.push_back(q / A);
  if (q != 0.) roots.push_back(C / q);
  return roots;
}

// [lo, hi] minus the union of `holes` (which need not be sorted or disjoint).
std::vector<std::pair<double, double>> subtractIntervals(double lo, double hi,
                                                         std::vector<std::pair<double, double>> holes,
                                                         double minWidth) {
  std::sort(holes.begin(), holes.end());
  std::vector<std::pair<double, double>> out;
  double cursor = lo;
  for (auto [a, b] : holes) {
    if (b <= cursor) continue;
    if (a > cursor && a - cursor >= minWidth) out.push_back({cursor, std::min(a, hi)});
    cursor = std::max(cursor, b);
    if (cursor >= hi) break;
  }
  if (hi - cursor >= minWidth) out.push_back({cursor, hi});
  return out;
}

} // namespace

std::vector<DominancePiece> dominance(const CanonicalWindow& existing, const CanonicalWindow& incoming, double lo,
                                      double hi, double tol, double minWidth) {
  std::vector<DominancePiece> pieces;
  if (!(hi > lo)) return pieces;

  // incoming(x) == existing(x)  <=>  rI = rE + delta, with rI, rE the Euclidean parts and delta = sigmaE - sigmaI.
  // Squaring twice gives (alpha x + beta)^2 = 4 delta^2 ((x - aE)^2 + hE^2).
  double delta = existing.sigma - incoming.sigma;
  double alpha = 2. * (existing.a - incoming.a);
  double beta = incoming.a * incoming.a - existing.a * existing.a + incoming.h * incoming.h -
                existing.h * existing.h - delta * delta;
  double d2 = delta * delta;
  double A = alpha * alpha - 4. * d2;
  double B = 2. * alpha * beta + 8. * d2 * existing.a;
  double C = beta * beta - 4. * d2 * (existing.a * existing.a + existing.h * existing.h);

  std::vector<double> cuts{lo};
  for (double r : quadraticRoots(A, B, C)) {
    if (r > lo && r < hi) cuts.push_back(r);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  for (size_t i = 0; i + 1 < cuts.size(); i++) {
    double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    double mid = 0.5 * (a + b);
    bool wins = incoming(mid) < existing(mid) - tol;
    if (b - a < minWidth) wins = false;
    if (!pieces.empty() && pieces.back().incomingWins == wins) {
      pieces.back().hi = b;
    } else {
      pieces.push_back({a, b, wins});
    }
  }
  return pieces;
}

std::vector<Window> trimWindows(const HalfedgeMesh& mesh, const Window& existing, const Window& incoming) {
  if (mesh.edge(existing.halfedge) != mesh.edge(incoming.halfedge)) {
    throw BadParameter("trimWindows: windows lie on different edges");
  }
  double L = mesh.halfedgeLength(existing.halfedge);
  double minWidth = kMinWindowWidth * L;
  double tol = 1e-11 * mesh.diameter();
  CanonicalWindow ce = toCanonical(mesh, existing), ci = toCanonical(mesh, incoming);

  double lo = std::max(ce.lo, ci.lo), hi = std::min(ce.hi, ci.hi);
  struct Piece {
    double lo, hi;
    const Window* from;
  };
  std::vector<Piece> out;
  std::vector<std::pair<double, double>> existingLoses, incomingLoses;
  if (hi - lo > minWidth) {
    for (const auto& p : dominance(ce, ci, lo, hi, tol, minWidth)) {
      (p.incomingWins ? existingLoses : incomingLoses).push_back({p.lo, p.hi});
    }
  }
  for (auto [a, b] : subtractIntervals(ce.lo, ce.hi, existingLoses, minWidth)) out.push_back({a, b, &existing});
  for (auto [a, b] : subtractIntervals(ci.lo, ci.hi, incomingLoses, minWidth)) out.push_back({a, b, &incoming});
  std::sort(out.begin(), out.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });

  std::vector<Window> result;
  for (const auto& p : out) result.push_back(withCanonicalInterval(mesh, *p.from, p.lo, p.hi));
  return result;
}

namespace {

// Parameters u in [0,1] with f0 + u (f1 - f0) >= -tol (sign = +1) or <= tol (sign = -1).
std::pair<double, double> linearHalfInterval(double f0, double f1, int sign, double tol) {
  f0 *= sign;
  f1 *= sign;
  bool in0 = f0 >= -tol, in1 = f1 >= -tol;
  if (in0 && in1) return {0., 1.};
  if (!in0 && !in1) return {1., 0.};
  double u = f0 / (f0 - f1);
  return in0 ? std::pair{0., u} : std::pair{u, 1.};
}

} // namespace

FaceCrossing crossFace(const HalfedgeMesh& mesh, const Window& w) {
  FaceCrossing out;
  const int h = w.halfedge;
  const double L = mesh.halfedgeLength(h);
  out.apexVertex = mesh.origin(mesh.prev(h));
  if (w.grazing(L)) return out;

  auto corners = halfedgeFrameLayout(mesh, h);
  Vec2 A = corners[0], B = corners[1], C = corners[2];
  Vec2 S = w.source;
  double x0 = w.b0 * L, x1 = w.b1 * L;

  // Where the segment S -> C crosses the edge line.
  double xc = S.x + (C.x - S.x) * (-S.y) / (C.y - S.y);
  double xtol = 1e-9 * L;
  out.apexVisible = xc >= x0 - xtol && xc <= x1 + xtol;
  out.apexDistance = w.sigma + (C - S).norm();

  // For Y on segment P->Q, F_c(Y) has the sign of (crossing x of S->Y) - c.
  auto crossingSign = [&](Vec2 Y, double c) { return (Y.x - S.x) * (-S.y) - (c - S.x) * (Y.y - S.y); };

  auto emit = [&](int hk, Vec2 P, Vec2 Q) {
    double ftol = 1e-13 * L * L;
    auto [l0, h0] = linearHalfInterval(crossingSign(P, x0), crossingSign(Q, x0), +1, ftol);
    auto [l1, h1] = linearHalfInterval(crossingSign(P, x1), crossingSign(Q, x1), -1, ftol);
    double ulo = std::max(l0, l1), uhi = std::min(h0, h1);
    if (!(uhi - ulo > kMinWindowWidth)) return;

    int g = mesh.twin(hk);
    Vec2 ex = (P - Q).normalized();
    Vec2 ey = ex.perp();
    Window child;
    child.halfedge = g;
    child.b0 = std::clamp(1. - uhi, 0., 1.);
    child.b1 = std::clamp(1. - ulo, 0., 1.);
    child.source = {dot(S - Q, ex), std::min(0., dot(S - Q, ey))};
    child.sigma = w.sigma;
    child.root = w.root;
    out.children.push_back(child);
  };
  int h1 = mesh.next(h), h2 = mesh.prev(h);
  emit(h2, C, A);
  emit(h1, B, C);
  return out;
}

std::vector<Window> vertexSourceWindows(const HalfedgeMesh& mesh, int v, double sigma) {
  std::vector<Window> out;
  for (int ho : mesh.outgoingHalfedges(v)) {
    auto corners = halfedgeFrameLayout(mesh, ho);
    Vec2 a = corners[1], b = corners[2];
    Window opp;
    opp.halfedge = mesh.twin(mesh.next(ho));
    Vec2 ex = (a - b).normalized();
    opp.source = {dot(corners[0] - b, ex), std::min(0., dot(corners[0] - b, ex.perp()))};
    opp.sigma = sigma;
    opp.root = v;
    out.push_back(opp);

    Window along;
    along.halfedge = ho;
    along.source = {0., 0.};
    along.sigma = sigma;
    along.root = v;
    out.push_back(along);
  }
  return out;
}

std::vector<Window> sourceWindows(const HalfedgeMesh& mesh, const SurfacePoint& rawSource) {
  SurfacePoint source = canonicalize(mesh, rawSource);
  if (source.isVertex()) return vertexSourceWindows(mesh, source.id, 0.);

  std::vector<Window> out;
  auto seedAcross = [&](int hk, Vec2 P, const std::array<Vec2, 3>& corners) {
    // hk is a halfedge of the source face; the window goes on its twin, pointing out of the face.
    Vec2 origin = corners[1], other = corners[0];
    Vec2 ex = (other - origin).normalized();
    Window w;
    w.halfedge = mesh.twin(hk);
    w.source = {dot(P - origin, ex), std::min(0., dot(P - origin, ex.perp()))};
    w.root = -1;
    out.push_back(w);
  };

  for (int f : incidentFaces(mesh, source)) {
    for (int hk : mesh.faceHalfedges(f)) {
      if (source.kind == SurfacePoint::Kind::Edge && mesh.edge(hk) == source.id) continue;
      seedAcross(hk, positionInHalfedgeFrame(mesh, hk, source), halfedgeFrameLayout(mesh, hk));
    }
  }
  if (source.kind == SurfacePoint::Kind::Edge) {
    int h = mesh.edgeHalfedge(source.id);
    Window along;
    along.halfedge = h;
    along.source = {source.edgeParam() * mesh.halfedgeLength(h), 0.};
    along.root = -1;
    out.push_back(along);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------------------------
// Window storage

WindowStore::WindowStore(const HalfedgeMesh& mesh)
    : mesh_(&mesh), live_(mesh.nEdges()), tol_(1e-11 * mesh.diameter()) {}

int WindowStore::add(const Window& w) {
  records_.push_back({w, false, false});
  return static_cast<int>(records_.size()) - 1;
}

WindowStore::InsertResult WindowStore::insert(const Window& w) {
  const HalfedgeMesh& mesh = *mesh_;
  InsertResult res;
  res.recordId = add(w);

  const int e = mesh.edge(w.halfedge);
  const double L = mesh.edgeLength(e);
  const double minWidth = kMinWindowWidth * L;
  const CanonicalWindow ci = toCanonical(mesh, w);

  std::vector<std::pair<double, double>> incomingLoses;
  std::vector<int> keep;
  std::vector<int> added;
  for (int id : live_[e]) {
    // Copy: records_ may reallocate below.
    Record existing = records_[id];
    CanonicalWindow ce = toCanonical(mesh, existing.window);
    double lo = std::max(ce.lo, ci.lo), hi = std::min(ce.hi, ci.hi);
    if (hi - lo <= minWidth) {
      keep.push_back(id);
      continue;
    }
    std::vector<std::pair<double, double>> existingLoses;
    for (const auto& p : dominance(ce, ci, lo, hi, tol_, minWidth)) {
      (p.incomingWins ? existingLoses : incomingLoses).push_back({p.lo, p.hi});
    }
    if (existingLoses.empty()) {
      keep.push_back(id);
      continue;
    }
    records_[id].live = false;
    res.killed.push_back(id);
    for (auto [a, b] : subtractIntervals(ce.lo, ce.hi, existingLoses, minWidth)) {
      int nid = add(withCanonicalInterval(mesh, existing.window, a, b));
      records_[nid].live = true;
      records_[nid].propagated = existing.propagated;
      added.push_back(nid);
      if (!existing.propagated) res.replacedPending.push_back(nid);
    }
  }

  for (auto [a, b] : subtractIntervals(ci.lo, ci.hi, incomingLoses, minWidth)) {
    int nid = add(withCanonicalInterval(mesh, w, a, b));
    records_[nid].live = true;
    added.push_back(nid);
    res.survivors.push_back(nid);
  }

  keep.insert(keep.end(), added.begin(), added.end());
  std::sort(keep.begin(), keep.end(), [&](int x, int y) {
    return toCanonical(mesh, records_[x].window).lo < toCanonical(mesh, records_[y].window).lo;
  });
  live_[e] = std::move(keep);
  return res;
}

// ---------------------------------------------------------------------------------------------------------------
// Propagation

namespace {

struct QueueEntry {
  double key;
  int edge;
  double start;
  int id;
  bool operator>(const QueueEntry& o) const {
    return std::tie(key, edge, start, id) > std::tie(o.key, o.edge, o.start, o.id);
  }
};

class Propagator {
public:
  Propagator(const HalfedgeMesh& mesh, DistanceField& field, std::vector<double>& dist, std::vector<int>& pred,
             WindowStore& store, PropagateStats& stats, const PropagateOptions& opts)
      : mesh_(mesh), dist_(dist), pred_(pred), store_(store), stats_(stats), opts_(opts) {
    (void)field;
    saddle_.resize(mesh.nVertices());
    for (int v = 0; v < mesh.nVertices(); v++) saddle_[v] = isSaddleVertex(mesh, v);
    improveTol_ = 1e-12 * mesh.diameter();
  }

  void run(const SurfacePoint& source) {
    SurfacePoint s = canonicalize(mesh_, source);
    if (s.isVertex()) {
      sourceVertex_ = s.id;
      dist_[s.id] = 0.;
    }
    for (Window w : sourceWindows(mesh_, s)) {
      if (obs_) obs_->seed(w);
      insertWindow(w);
    }

    double lastKey = -kInf;
    while (!queue_.empty()) {
      QueueEntry top = queue_.top();
      queue_.pop();
      auto& rec = store_.record(top.id);
      if (!rec.live || rec.propagated) continue;
      rec.propagated = true;
      stats_.queuePops++;
      if (top.key < lastKey - 1e-9 * mesh_.diameter()) {
        stats_.keyOrderViolations++;
        if (opts_.debugChecks) {
          throw InvariantViolation("window queue popped key " + std::to_string(top.key) + " after " +
                                   std::to_string(lastKey));
        }
      }
      lastKey = std::max(lastKey, top.key);

      if (obs_) obs_->popping(top.key, top.id, store_);
      Window w = rec.window;
      FaceCrossing fc = crossFace(mesh_, w);
      stats_.windowsPropagated++;
      if (fc.apexVisible) updateVertex(fc.apexVertex, fc.apexDistance, top.id);
      for (Window child : fc.children) {
        child.parent = top.id;
        child.lineage = w.lineage;
        if (obs_) obs_->derive(child, w);
        insertWindow(child);
      }
      if (obs_) obs_->popped(top.id, store_);
    }
    if (obs_) obs_->finished(store_);
  }

private:
  void push(int id) {
    const Window& w = store_.record(id).window;
    double L = mesh_.halfedgeLength(w.halfedge);
    queue_.push({w.minDistance(L), mesh_.edge(w.halfedge), toCanonical(mesh_, w).lo, id});
  }

  void insertWindow(const Window& w) {
    stats_.windowsCreated++;
    // Endpoint vertices are reached through this window whether or not it survives trimming.
    int rid = store_.add(w);
    double L = mesh_.halfedgeLength(w.halfedge);
    if (w.b0 <= 1e-9) updateVertex(mesh_.origin(w.halfedge), w.distanceAt(L, 0.), rid);
    if (w.b1 >= 1. - 1e-9) updateVertex(mesh_.dest(w.halfedge), w.distanceAt(L, 1.), rid);

    auto res = store_.insert(w);
    for (int id : res.survivors) {
      store_.record(id).window.parent = w.parent;
      push(id);
    }
    for (int id : res.replacedPending) push(id);
    if (obs_) obs_->inserted(res, store_);
  }

  void updateVertex(int v, double d, int windowId) {
    if (!(d < dist_[v] - improveTol_)) return;
    dist_[v] = d;
    pred_[v] = windowId;
    if (obs_) obs_->vertexReached(v, d, windowId, store_);
    if (saddle_[v] && v != sourceVertex_) {
      stats_.saddleSpawns++;
      for (Window w : vertexSourceWindows(mesh_, v, d)) {
        w.lineage = v;
        if (obs_) obs_->seed(w);
        insertWindow(w);
      }
    }
  }

  const HalfedgeMesh& mesh_;
  std::vector<double>& dist_;
  std::vector<int>& pred_;
  WindowStore& store_;
  PropagateStats& stats_;
  const PropagateOptions& opts_;
  PropagationObserver* obs_ = opts_.observer;
  std::vector<char> saddle_;
  int sourceVertex_ = -1;
  double improveTol_;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue_;
};

} // namespace

DistanceField propagate(const HalfedgeMesh& mesh, const SurfacePoint& source, const PropagateOptions& opts) {
  validate(mesh, source);
  DistanceField field(mesh, canonicalize(mesh, source));
  field.vertexDistance_.assign(mesh.nVertices(), kInf);
  field.vertexPredecessor_.assign(mesh.nVertices(), -1);
  Propagator prop(mesh, field, field.vertexDistance_, field.vertexPredecessor_, field.store_, field.stats_, opts);
  prop.run(field.source_);
  return field;
}

// ---------------------------------------------------------------------------------------------------------------
// Queries

namespace {

struct Route {
  enum class Kind { None, Source, Window, Vertex };
  Kind kind = Kind::None;
  double value = kInf;
  int window = -1;
  int vertex = -1;
};

bool samePoint(const HalfedgeMesh& mesh, const SurfacePoint& a, const SurfacePoint& b) {
  return (position3D(mesh, a) - position3D(mesh, b)).norm() <= 1e-12 * mesh.diameter();
}

// Faces of q that also contain the source, for the direct straight-segment route.
int sharedSourceFace(const DistanceField& field, const SurfacePoint& q) {
  return commonFace(field.mesh(), field.source(), q);
}

Route bestRoute(const DistanceField& field, const SurfacePoint& rawQ) {
  const HalfedgeMesh& mesh = field.mesh();
  SurfacePoint q = canonicalize(mesh, rawQ, 1e-12);
  Route best;
  auto offer = [&](Route r) {
    if (r.value < best.value) best = r;
  };

  if (samePoint(mesh, q, field.source())) return {Route::Kind::Source, 0., -1, -1};
  if (q.isVertex()) {
    Route r;
    r.kind = Route::Kind::Vertex;
    r.value = field.vertexDistance(q.id);
    r.vertex = q.id;
    return r;
  }

  if (int f = sharedSourceFace(field, q); f >= 0) {
    Vec2 a = positionInFace(mesh, f, field.source()), b = positionInFace(mesh, f, q);
    offer({Route::Kind::Source, (a - b).norm(), -1, -1});
  }

  const WindowStore& store = field.windows();
  if (q.kind == SurfacePoint::Kind::Edge) {
    const double L = mesh.edgeLength(q.id);
    const double x = q.edgeParam() * L;
    const double slack = 1e-9 * L;
    for (int id : store.live(q.id)) {
      const Window& w = store.record(id).window;
      CanonicalWindow c = toCanonical(mesh, w);
      if (x < c.lo - slack || x > c.hi + slack) continue;
      offer({Route::Kind::Window, c(x), id, -1});
    }
  } else {
    for (int hk : mesh.faceHalfedges(q.id)) {
      const double L = mesh.halfedgeLength(hk);
      Vec2 p = positionInHalfedgeFrame(mesh, hk, q);
      for (int id : store.live(mesh.edge(hk))) {
        const Window& w = store.record(id).window;
        if (w.halfedge != hk) continue;
        Vec2 S = w.source;
        double denom = p.y - S.y;
        if (denom <= 0.) continue;
        double xc = S.x + (p.x - S.x) * (-S.y) / denom;
        if (xc < w.b0 * L - 1e-9 * L || xc > w.b1 * L + 1e-9 * L) continue;
        offer({Route::Kind::Window, w.sigma + (p - S).norm(), id, -1});
      }
    }
  }

  // Through an adjacent vertex.
  for (int f : incidentFaces(mesh, q)) {
    for (int v : mesh.faceVertices(f)) {
      double dv = field.vertexDistance(v);
      if (!std::isfinite(dv)) continue;
      double d = dv + (positionInFace(mesh, f, q) - positionInFace(mesh, f, SurfacePoint::atVertex(v))).norm();
      offer({Route::Kind::Vertex, d, -1, v});
    }
  }
  return best;
}

// Edge point on the window's edge at distance x (length units) along its halfedge, snapped to vertices.
SurfacePoint edgePointAlong(const HalfedgeMesh& mesh, int h, double x) {
  double L = mesh.halfedgeLength(h);
  double t = std::clamp(x / L, 0., 1.);
  int e = mesh.edge(h);
  double canon = mesh.edgeHalfedge(e) == h ? t : 1. - t;
  return canonicalize(mesh, SurfacePoint::onEdge(e, canon), 1e-10);
}

} // namespace

double distanceAt(const DistanceField& field, const SurfacePoint& q) {
  validate(field.mesh(), q);
  return bestRoute(field, q).value;
}

int commonFace(const HalfedgeMesh& mesh, const SurfacePoint& p, const SurfacePoint& q) {
  auto fp = incidentFaces(mesh, p);
  auto fq = incidentFaces(mesh, q);
  for (int f : fp) {
    if (std::find(fq.begin(), fq.end(), f) != fq.end()) return f;
  }
  return -1;
}

GeodesicPath extractPath(const DistanceField& field, const SurfacePoint& rawTarget) {
  const HalfedgeMesh& mesh = field.mesh();
  validate(mesh, rawTarget);
  const WindowStore& store = field.windows();
  const SurfacePoint& source = field.source();
  const double snap = 1e-12 * mesh.diameter();

  std::vector<SurfacePoint> rev;
  auto append = [&](const SurfacePoint& p) {
    if (rev.empty() || !samePoint(mesh, rev.back(), p)) rev.push_back(p);
  };

  SurfacePoint q = canonicalize(mesh, rawTarget, 1e-12);
  append(q);

  // Backtrace until the source is reached. Each step either follows a window toward its pseudo-source or jumps to a
  // vertex's predecessor window.
  int window = -1;
  int guard = 0;
  const int maxSteps = 4 * store.size() + 16;
  while (true) {
    if (++guard > maxSteps) throw InvariantViolation("path backtrace did not terminate");
    if (window < 0) {
      if (samePoint(mesh, q, source)) break;
      Route r = bestRoute(field, q);
      if (!std::isfinite(r.value)) {
        throw Unreachable("target is not reachable from the source (disconnected surface?)");
      }
      if (r.kind == Route::Kind::Source) {
        append(source);
        break;
      }
      if (r.kind == Route::Kind::Vertex) {
        if (!(q.isVertex() && q.id == r.vertex)) {
          q = SurfacePoint::atVertex(r.vertex);
          append(q);
          continue;
        }
        window = field.vertexPredecessor(r.vertex);
        if (window < 0) throw Unreachable("vertex " + std::to_string(r.vertex) + " was never reached");
        continue;
      }
      window = r.window;
      continue;
    }

    const Window& w = store.record(window).window;
    const double L = mesh.halfedgeLength(w.halfedge);
    Vec2 p = positionInHalfedgeFrame(mesh, w.halfedge, q);
    Vec2 S = w.source;
    double x;
    if (std::abs(p.y) <= snap) {
      x = p.x; // already on the window's edge
    } else if (p.y - S.y <= snap) {
      x = std::abs(S.x - w.b0 * L) < std::abs(S.x - w.b1 * L) ? w.b0 * L : w.b1 * L;
    } else {
      x = p.x + (S.x - p.x) * p.y / (p.y - S.y);
    }
    x = std::clamp(x, w.b0 * L, w.b1 * L);
    SurfacePoint c = edgePointAlong(mesh, w.halfedge, x);
    append(c);
    q = c;

    if (w.parent >= 0) {
      window = w.parent;
      continue;
    }
    // Seeded window: the pseudo-source is the root vertex or the source point itself.
    if (w.root < 0) {
      append(source);
      break;
    }
    q = SurfacePoint::atVertex(w.root);
    append(q);
    if (samePoint(mesh, q, source)) break;
    window = field.vertexPredecessor(w.root);
    if (window < 0) throw Unreachable("vertex " + std::to_string(w.root) + " has no predecessor");
  }

  GeodesicPath path;
  path.points.assign(rev.rbegin(), rev.rend());
  for (size_t i = 0; i + 1 < path.points.size(); i++) {
    path.length += (position3D(mesh, path.points[i + 1]) - position3D(mesh, path.points[i])).norm();
  }
  for (size_t i = 1; i + 1 < path.points.size(); i++) {
    if (path.points[i].kind == SurfacePoint::Kind::Edge) path.crossedEdges.push_back(path.points[i].id);
  }
  return path;
}

std::vector<int> pathInteriorVertices(const GeodesicPath& path) {
  std::vector<int> out;
  for (size_t i = 1; i + 1 < path.points.size(); i++) {
    if (path.points[i].isVertex()) out.push_back(path.points[i].id);
  }
  return out;
}

double pathMaxDeviation(const HalfedgeMesh& mesh, const GeodesicPath& path) {
  const auto& pts = path.points;
  double worst = 0.;
  size_t runStart = 0;
  for (size_t i = 1; i < pts.size(); i++) {
    bool runEnds = i + 1 == pts.size() || pts[i].isVertex();
    if (!runEnds) continue;

    // Faces crossed by the straight run pts[runStart..i].
    std::vector<int> strip;
    std::vector<int> segFace;
    for (size_t k = runStart; k < i; k++) {
      int f = commonFace(mesh, pts[k], pts[k + 1]);
      if (f < 0) throw InvariantViolation("consecutive path points share no face");
      if (strip.empty() || strip.back() != f) strip.push_back(f);
      segFace.push_back(static_cast<int>(strip.size()) - 1);
    }
    PlanarUnfolding unf = unfoldStrip(mesh, strip);
    std::vector<Vec2> img;
    for (size_t k = runStart; k <= i; k++) {
      int slot = k < i ? segFace[k - runStart] : segFace.back();
      img.push_back(unf.image(mesh, slot, pts[k]));
    }
    Vec2 a = img.front(), b = img.back();
    for (Vec2 p : img) worst = std::max(worst, pointSegmentDistance(p, a, b));
    runStart = i;
  }
  return worst;
}

} // namespace geowave
