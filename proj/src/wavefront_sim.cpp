#include "geowave/errors.h"
#include "geowave/hull_hierarchy.h"
#include "geowave/wavefront.h"
#include "wavefront_detail.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>

namespace geowave {

using namespace detail;

const char* eventName(EventKind kind) {
  switch (kind) {
  case EventKind::Touch: return "E1";
  case EventKind::Sweep: return "E2";
  case EventKind::Vertex: return "E3";
  case EventKind::Death: return "E4";
  }
  return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHullStep = kPi / 64.;
constexpr double kSplitMargin = 1e-9; // radians

struct QueuedEvent {
  double radius;
  int kind;
  int subject;
  bool operator>(const QueuedEvent& o) const {
    return std::tie(radius, kind, subject) > std::tie(o.radius, o.kind, o.subject);
  }
};

// Replays a window propagation as wavefront events. Windows carry the center they descend from (lineage) and the
// angle of their frame's +x axis around that center (heading), so every window maps to an angular position on
// its center's arcs. Events are released in radius order just before the propagation pops a larger key.
class Simulator final : public HeadingObserver {
public:
  Simulator(const HalfedgeMesh& mesh, WavefrontState& st, EventLog& log, std::vector<double>& vertexRadius,
            const SimulationOptions& opts)
      : HeadingObserver(mesh, st.source()), st_(st), log_(log), vr_(vertexRadius), opts_(opts),
        tol_(1e-9 * mesh.diameter()) {
    const int V = mesh.nVertices(), E = mesh.nEdges();
    saddle_.resize(V);
    for (int v = 0; v < V; v++) saddle_[v] = isSaddleVertex(mesh, v);
    periods_.resize(V + 1);
    for (int c = -1; c < V; c++) periods_[c + 1] = st.period(c);
    touched_.assign(E, 0);
    e1Cand_.assign(E, kInf);
    e2Cand_.assign(E, kInf);
    bestDist_.assign(V, kInf);
    arrival_.assign(V, -1);
    reached_.assign(V, 0);
    vr_.assign(V, kInf);
    if (src_ >= 0) {
      bestDist_[src_] = 0.;
      reached_[src_] = 1;
      vr_[src_] = 0.;
    }
    ensureArcs();
    log_.maxSections = static_cast<std::int64_t>(groupSections(st_).size());
    for (int e = 0; e < E; e++) noteFailure(e);
  }

  void inserted(const WindowStore::InsertResult& res, const WindowStore& store) override {
    store_ = &store;
    grow();
    for (int id : res.survivors) attribute(id, true);
    for (int id : res.replacedPending) attribute(id, false);
    for (int id : res.killed) release(id);

    const Window& w = store.record(res.recordId).window;
    const int e = mesh_.edge(w.halfedge);
    if (!st_.inBoundary(e)) return;
    if (!touched_[e]) {
      for (int id : res.survivors) {
        const Window& s = store.record(id).window;
        double m = s.minDistance(mesh_.halfedgeLength(s.halfedge));
        if (m < e1Cand_[e]) {
          e1Cand_[e] = m;
          queue_.push({m, 1, e});
        }
      }
    }
    scheduleSweep(e);
  }

  void popping(double key, int, const WindowStore& store) override {
    store_ = &store;
    lastKey_ = std::max(lastKey_, key);
    flush(key - 1e-12 * mesh_.diameter());
  }

  void popped(int id, const WindowStore& store) override {
    store_ = &store;
    release(id);
  }

  void vertexReached(int v, double d, int windowId, const WindowStore& store) override {
    store_ = &store;
    bestDist_[v] = d;
    arrival_[v] = windowId;
    if (v != src_) queue_.push({d, 3, v});
  }

  void finished(const WindowStore& store) override {
    store_ = &store;
    flush(kInf);
  }

private:
  double period(int center) const { return periods_[center + 1]; }

  void grow() {
    if (static_cast<int>(pendingArc_.size()) < store_->size()) pendingArc_.resize(store_->size(), -2);
  }

  void ensureArcs() {
    arcPending_.resize(st_.arcs().size());
    reach_.resize(st_.arcs().size(), 0.);
  }

  double thetaMid(const Window& w) const {
    double L = mesh_.halfedgeLength(w.halfedge);
    return w.heading + polar(Vec2{0.5 * (w.b0 + w.b1) * L, 0.} - w.source);
  }

  // Alive arc of `center` containing theta; failing that, the one nearest in angle.
  int findArc(int center, double theta) const {
    const double P = period(center);
    int best = -1;
    double bestGap = kInf;
    for (int id : st_.order()) {
      const WavefrontArc& a = st_.arc(id);
      if (a.center != center) continue;
      double x = a.thetaLo + std::fmod(theta - a.thetaLo, P);
      if (x < a.thetaLo) x += P;
      if (x <= a.thetaHi + 1e-12) return id;
      double gap = std::min(x - a.thetaHi, a.thetaLo + P - x);
      if (gap < bestGap) {
        bestGap = gap;
        best = id;
      }
    }
    return best;
  }

  void attribute(int id, bool countCrossing) {
    const Window& w = store_->record(id).window;
    int a = findArc(w.lineage, thetaMid(w));
    pendingArc_[id] = a;
    if (a < 0) {
      unattributed_[w.lineage].insert(id);
      return;
    }
    arcPending_[a].insert(id);
    double L = mesh_.halfedgeLength(w.halfedge);
    reach_[a] = std::max({reach_[a], w.distanceAt(L, w.b0), w.distanceAt(L, w.b1)});
    if (countCrossing) {
      crossingPairs_.insert(static_cast<long long>(a) * mesh_.nEdges() + mesh_.edge(w.halfedge));
      log_.crossings = static_cast<std::int64_t>(crossingPairs_.size());
    }
  }

  void release(int id) {
    if (id >= static_cast<int>(pendingArc_.size())) return;
    int a = pendingArc_[id];
    if (a == -2) return;
    pendingArc_[id] = -2;
    if (a == -1) {
      unattributed_[store_->record(id).window.lineage].erase(id);
      return;
    }
    arcPending_[a].erase(id);
    if (arcPending_[a].empty() && st_.arc(a).alive) scheduleDeath(a);
  }

  void scheduleDeath(int a) { queue_.push({std::max(lastKey_, reach_[a]), 4, a}); }

  // Whether the live windows cover e, and the largest distance over it.
  std::pair<bool, double> coverage(int e) const {
    const double L = mesh_.edgeLength(e);
    const double gap = 1e-9 * L;
    double cur = 0., mx = 0.;
    for (int id : store_->live(e)) {
      CanonicalWindow c = toCanonical(mesh_, store_->record(id).window);
      if (c.lo > cur + gap) return {false, 0.};
      cur = std::max(cur, c.hi);
      mx = std::max({mx, c(c.lo), c(c.hi)});
    }
    return {cur >= L - gap, mx};
  }

  void scheduleSweep(int e) {
    auto [covered, mx] = coverage(e);
    if (!covered || mx == e2Cand_[e]) return;
    e2Cand_[e] = mx;
    queue_.push({std::max(mx, lastKey_), 2, e});
  }

  std::vector<std::pair<double, double>> sweptIntervals(int e, double R) const {
    const double L = mesh_.edgeLength(e);
    std::vector<std::pair<double, double>> parts;
    for (int id : store_->live(e)) {
      CanonicalWindow c = toCanonical(mesh_, store_->record(id).window);
      double rho = R - c.sigma;
      if (rho < c.h) continue;
      double half = std::sqrt(rho * rho - c.h * c.h);
      double lo = std::max(c.lo, c.a - half), hi = std::min(c.hi, c.a + half);
      if (hi >= lo) parts.push_back({lo / L, hi / L});
    }
    std::sort(parts.begin(), parts.end());
    std::vector<std::pair<double, double>> merged;
    for (auto p : parts) {
      if (!merged.empty() && p.first <= merged.back().second + 1e-12) {
        merged.back().second = std::max(merged.back().second, p.second);
      } else {
        merged.push_back(p);
      }
    }
    return merged;
  }

  void noteFailure(int e) {
    if (st_.inBoundary(e) && st_.association(e) < 0) {
      failed_.insert(e);
      log_.associationFailures = static_cast<std::int64_t>(failed_.size());
    }
  }

  void reassociateAll(int arc) {
    for (int e = 0; e < mesh_.nEdges(); e++) {
      if (st_.inBoundary(e) && st_.association(e) == arc) {
        st_.reassociate(e);
        log_.reassociations++;
        noteFailure(e);
      }
    }
  }

  void renearestAll(int e) {
    for (int a : st_.order()) {
      if (st_.nearestEdge(a) == e) st_.renearest(a);
    }
  }

  void flush(double limit) {
    while (!queue_.empty() && queue_.top().radius < limit) {
      QueuedEvent ev = queue_.top();
      queue_.pop();
      fire(ev);
    }
  }

  void fire(const QueuedEvent& ev) {
    if (terminated_ && ev.radius > lastSweep_ + tol_) return;
    WavefrontEvent out{static_cast<EventKind>(ev.kind), ev.radius, ev.subject, -1};
    switch (out.kind) {
    case EventKind::Touch:
      if (!st_.inBoundary(ev.subject) || touched_[ev.subject] || ev.radius != e1Cand_[ev.subject]) return;
      begin(out);
      touch(out);
      break;
    case EventKind::Sweep: {
      int e = ev.subject;
      if (!st_.inBoundary(e)) return;
      auto [covered, mx] = coverage(e);
      if (!covered) return;
      if (mx > ev.radius + tol_) {
        e2Cand_[e] = mx;
        queue_.push({mx, 2, e});
        return;
      }
      if (!touched_[e]) {
        WavefrontEvent t{EventKind::Touch, ev.radius, e, -1};
        begin(t);
        touch(t);
        finish(t);
      }
      begin(out);
      sweep(out);
      break;
    }
    case EventKind::Vertex:
      if (reached_[ev.subject] || ev.radius != bestDist_[ev.subject]) return;
      begin(out);
      reachVertex(out);
      break;
    case EventKind::Death:
      if (!st_.arc(ev.subject).alive || !arcPending_[ev.subject].empty()) return;
      begin(out);
      death(out);
      break;
    }
    finish(out);
  }

  void begin(const WavefrontEvent& ev) {
    if (ev.radius < lastEvent_ - tol_ && opts_.debugChecks) {
      throw InvariantViolation("event " + std::to_string(log_.events.size()) + " (" + eventName(ev.kind) +
                               ") at radius " + std::to_string(ev.radius) + " after " + std::to_string(lastEvent_));
    }
    lastEvent_ = std::max(lastEvent_, ev.radius);
    st_.setRadius(ev.radius);
  }

  void finish(const WavefrontEvent& ev) {
    log_.events.push_back(ev);
    auto sections = groupSections(st_);
    log_.maxSections = std::max(log_.maxSections, static_cast<std::int64_t>(sections.size()));
    if (opts_.debugChecks) check(sections, ev);
    if (opts_.onEvent) opts_.onEvent(ev, st_);
  }

  void check(const std::vector<Section>& sections, const WavefrontEvent& ev) const {
    std::string where = "event " + std::to_string(log_.events.size() - 1) + " (" + eventName(ev.kind) + ")";
    if (sections != groupSectionsFromScratch(st_)) {
      throw InvariantViolation(where + ": incremental sections differ from a full regrouping");
    }
    std::vector<int> seenEdges, seenArcs;
    for (const Section& s : sections) {
      auto& seen = s.kind == Section::Kind::Boundary ? seenEdges : seenArcs;
      seen.insert(seen.end(), s.members.begin(), s.members.end());
    }
    std::sort(seenEdges.begin(), seenEdges.end());
    std::sort(seenArcs.begin(), seenArcs.end());
    std::vector<int> arcs = st_.order();
    std::sort(arcs.begin(), arcs.end());
    if (seenEdges != st_.boundaryEdges()) throw InvariantViolation(where + ": boundary sections do not partition B");
    if (!seenEdges.empty() && seenArcs != arcs) {
      throw InvariantViolation(where + ": wavefront sections do not partition W");
    }
    if (std::adjacent_find(arcs.begin(), arcs.end()) != arcs.end()) {
      throw InvariantViolation(where + ": arc repeated in W");
    }
    for (int a : arcs) {
      const WavefrontArc& arc = st_.arc(a);
      if (!arc.alive || !(arc.extent() > 0.) || arc.extent() > 2. * kPi + 1e-9) {
        throw InvariantViolation(where + ": arc " + std::to_string(a) + " has a bad extent or is dead");
      }
    }
  }

  void touch(WavefrontEvent& ev) {
    const int e = ev.subject;
    touched_[e] = 1;
    log_.touches++;
    int bestId = -1;
    double best = kInf;
    for (int id : store_->live(e)) {
      const Window& w = store_->record(id).window;
      double m = w.minDistance(mesh_.halfedgeLength(w.halfedge));
      if (m < best) {
        best = m;
        bestId = id;
      }
    }
    if (bestId >= 0) {
      const Window& w = store_->record(bestId).window;
      ev.arc = findArc(w.lineage, thetaMid(w));
      if (opts_.hullQueries) hullProbe(w, ev.radius);
    }
    st_.setSwept(e, sweptIntervals(e, ev.radius));
    st_.reassociate(e);
    log_.reassociations++;
    noteFailure(e);
    renearestAll(e);
  }

  // Distance from the touching arc, polygonized at a fixed angular step, to the window's interval.
  void hullProbe(const Window& w, double R) {
    const double L = mesh_.halfedgeLength(w.halfedge);
    const Vec2 S = w.source, x0{w.b0 * L, 0.}, x1{w.b1 * L, 0.};
    const double rho = R - w.sigma;
    std::vector<Vec2> arc;
    if (rho <= 0.) {
      arc.push_back(S);
    } else {
      double pa = polar(x1 - S), pb = polar(x0 - S);
      int n = std::max(1, static_cast<int>(std::ceil((pb - pa) / kHullStep)));
      for (int i = 0; i <= n; i++) {
        double phi = pa + (pb - pa) * i / n;
        arc.push_back(S + Vec2{std::cos(phi), std::sin(phi)} * rho);
      }
    }
    HullQueryResult q = queryHullDistance(buildHull(arc), buildHull({x0, x1}), Rigid2::identity());
    double exact = std::max(0., pointSegmentDistance(S, x0, x1) - std::max(rho, 0.));
    log_.hullQueries++;
    log_.hullVisits += q.visits;
    log_.hullMaxError = std::max(log_.hullMaxError, std::abs(q.distance - exact));
  }

  void sweep(WavefrontEvent& ev) {
    const int e = ev.subject;
    log_.sweeps++;
    st_.removeFromBoundary(e);
    renearestAll(e);
    if (st_.boundarySize() == 0) {
      terminated_ = true;
      lastSweep_ = ev.radius;
    }
  }

  void reachVertex(WavefrontEvent& ev) {
    const int v = ev.subject;
    reached_[v] = 1;
    vr_[v] = ev.radius;
    log_.vertexEvents++;

    // Where v sits in the reaching window's frame, and the direction back along the path.
    const Window& w = store_->record(arrival_[v]).window;
    const int h = w.halfedge;
    auto lay = halfedgeFrameLayout(mesh_, h);
    const Vec2 S = w.source;
    Vec2 V;
    double thetaIn;
    if (v == mesh_.origin(h)) {
      V = lay[0];
      thetaIn = alpha_[h] + signedAngle(lay[1] - lay[0], S - V);
    } else if (v == mesh_.dest(h)) {
      V = lay[1];
      thetaIn = alpha_[mesh_.twin(h)] + signedAngle(lay[0] - lay[1], S - V);
    } else {
      V = lay[2];
      thetaIn = alpha_[mesh_.prev(h)] + signedAngle(lay[0] - lay[2], S - V);
    }
    int arc = -1, left = -1;
    if ((V - S).norm() > 1e-12 * mesh_.diameter()) {
      double theta = w.heading + polar(V - S);
      arc = findArc(w.lineage, theta);
      left = arc;
      if (arc >= 0) {
        const WavefrontArc a = st_.arc(arc);
        const double P = period(a.center);
        double x = a.thetaLo + std::fmod(theta - a.thetaLo, P);
        if (x < a.thetaLo) x += P;
        if (x > a.thetaLo + kSplitMargin && x < a.thetaHi - kSplitMargin) left = split(arc, x);
      }
    }
    ev.arc = arc;

    if (saddle_[v] && v != src_) {
      const double P = period(v);
      double lo = thetaIn + kPi, hi = thetaIn + P - kPi;
      if (hi - lo > kSplitMargin) spawn(v, ev.radius, lo, hi, left);
    }
  }

  // Returns the first half.
  int split(int arc, double theta) {
    auto [a1, a2] = st_.splitArc(arc, theta);
    ensureArcs();
    log_.splits++;
    log_.births += 2;
    reach_[a1] = reach_[a2] = reach_[arc];
    std::set<int> moving;
    moving.swap(arcPending_[arc]);
    for (int id : moving) attribute(id, false);
    reassociateAll(arc);
    st_.renearest(a1);
    st_.renearest(a2);
    for (int a : {a1, a2}) {
      if (arcPending_[a].empty()) scheduleDeath(a);
    }
    return a1;
  }

  void spawn(int v, double d, double lo, double hi, int after) {
    int s = st_.addArc(v, d, lo, hi, after);
    ensureArcs();
    log_.spawns++;
    log_.births++;
    reach_[s] = d;
    std::set<int> waiting;
    waiting.swap(unattributed_[v]);
    for (int id : waiting) attribute(id, true);
    if (arcPending_[s].empty()) scheduleDeath(s);
    st_.offerArc(s);
    st_.renearest(s);
  }

  void death(WavefrontEvent& ev) {
    ev.arc = ev.subject;
    log_.deaths++;
    st_.killArc(ev.subject);
    reassociateAll(ev.subject);
  }

  WavefrontState& st_;
  EventLog& log_;
  std::vector<double>& vr_;
  const SimulationOptions& opts_;
  const WindowStore* store_ = nullptr;
  std::vector<char> saddle_;
  std::vector<double> periods_;
  double tol_;

  std::vector<int> pendingArc_; // per window record: arc, -1 waiting for its center's arc, -2 not pending
  std::vector<std::set<int>> arcPending_;
  std::vector<double> reach_; // largest distance over any window attributed to the arc
  std::map<int, std::set<int>> unattributed_;
  std::unordered_set<long long> crossingPairs_;
  std::set<int> failed_;

  std::vector<char> touched_;
  std::vector<double> e1Cand_, e2Cand_;
  std::vector<double> bestDist_;
  std::vector<int> arrival_;
  std::vector<char> reached_;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue_;
  double lastKey_ = 0.;
  double lastEvent_ = 0.;
  bool terminated_ = false;
  double lastSweep_ = kInf;
};

} // namespace

WavefrontRun simulateWavefront(const HalfedgeMesh& mesh, const SurfacePoint& source, const SimulationOptions& opts) {
  WavefrontState st = initWavefront(mesh, source, std::make_shared<DistanceField>(propagateWithHeadings(mesh, source)));
  EventLog log;
  log.births = 1;
  std::vector<double> vertexRadius;
  Simulator sim(mesh, st, log, vertexRadius, opts);
  PropagateOptions po;
  po.observer = &sim;
  po.debugChecks = opts.debugChecks;
  DistanceField field = propagate(mesh, source, po);
  return WavefrontRun{std::move(st), std::move(log), std::move(vertexRadius), std::move(field)};
}

std::int64_t countPathCrossings(const DistanceField& field) {
  const HalfedgeMesh& mesh = field.mesh();
  const SurfacePoint& s = field.source();
  std::int64_t total = 0;
  for (int v = 0; v < mesh.nVertices(); v++) {
    if (s.isVertex() && s.id == v) continue;
    if (!std::isfinite(field.vertexDistance(v))) continue;
    total += static_cast<std::int64_t>(extractPath(field, SurfacePoint::atVertex(v)).crossedEdges.size());
  }
  return total;
}

} // namespace geowave
