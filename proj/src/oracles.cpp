#include "geowave/oracles.h"

#include "geowave/errors.h"

#include <cmath>
#include <limits>
#include <queue>

namespace geowave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConeEps = 1e-9;

// Barycentric weights of p over faceHalfedges(f) origins; p must lie in the closure of f.
std::array<double, 3> cornerWeights(const HalfedgeMesh& mesh, int f, const SurfacePoint& p) {
  auto vs = mesh.faceVertices(f);
  std::array<double, 3> w{0., 0., 0.};
  switch (p.kind) {
  case SurfacePoint::Kind::Vertex:
    for (int k = 0; k < 3; k++) {
      if (vs[k] == p.id) w[k] = 1.;
    }
    break;
  case SurfacePoint::Kind::Edge: {
    auto [a, b] = mesh.edgeVertices(p.id);
    for (int k = 0; k < 3; k++) {
      if (vs[k] == a) w[k] += 1. - p.coords[0];
      if (vs[k] == b) w[k] += p.coords[0];
    }
    break;
  }
  case SurfacePoint::Kind::Face:
    w = p.coords;
    break;
  }
  return w;
}

bool inClosure(const HalfedgeMesh& mesh, int f, const SurfacePoint& p) {
  for (int g : incidentFaces(mesh, p)) {
    if (g == f) return true;
  }
  return false;
}

struct Cone {
  bool full = true;
  Vec2 right, left; // counter-clockwise from right to left

  bool contains(Vec2 d) const {
    if (full) return true;
    double n = d.norm();
    if (n == 0.) return true;
    return cross(right, d) >= -kConeEps * n && cross(d, left) >= -kConeEps * n;
  }
};

class UnfoldingSearch {
public:
  UnfoldingSearch(const HalfedgeMesh& mesh, const SurfacePoint& s, const SurfacePoint& t, int maxFaces)
      : mesh_(mesh), s_(s), t_(t), maxFaces_(maxFaces), onPath_(mesh.nFaces(), false) {}

  double run() {
    for (int f : incidentFaces(mesh_, s_)) {
      auto corners = faceLayout(mesh_, f);
      auto w = cornerWeights(mesh_, f, s_);
      sImage_ = corners[0] * w[0] + corners[1] * w[1] + corners[2] * w[2];
      path_.assign(1, f);
      onPath_[f] = true;
      visit(f, -1, corners, Cone{});
      onPath_[f] = false;
    }
    return bestLength_;
  }

  const FaceSequence& best() const { return best_; }
  long long visited() const { return visited_; }

private:
  // img[i] is the image of origin(faceHalfedges(f)[i]).
  void visit(int f, int entry, const std::array<Vec2, 3>& img, const Cone& cone) {
    visited_++;
    auto hs = mesh_.faceHalfedges(f);
    if (inClosure(mesh_, f, t_)) {
      auto w = cornerWeights(mesh_, f, t_);
      Vec2 tImage = img[0] * w[0] + img[1] * w[1] + img[2] * w[2];
      Vec2 d = tImage - sImage_;
      if (cone.contains(d) && d.norm() < bestLength_) {
        bestLength_ = d.norm();
        best_ = FaceSequence{path_, sImage_, tImage, bestLength_};
      }
    }
    if (static_cast<int>(path_.size()) >= maxFaces_) return;

    for (int i = 0; i < 3; i++) {
      int k = hs[i];
      if (k == entry) continue;
      int g = mesh_.twin(k);
      int nf = mesh_.face(g);
      if (onPath_[nf]) continue;
      Vec2 P = img[i], Q = img[(i + 1) % 3];
      double len = (Q - P).norm();
      // The source sits on this edge: the only way across is along the edge itself.
      if (std::abs(orient(P, Q, sImage_)) <= kConeEps * len * len) continue;
      if (pointSegmentDistance(sImage_, P, Q) >= bestLength_) continue;

      Cone next;
      next.full = false;
      Vec2 r = P - sImage_, l = Q - sImage_;
      if (!cone.full) {
        if (cross(cone.right, r) <= 0.) r = cone.right;
        if (cross(l, cone.left) <= 0.) l = cone.left;
      }
      if (cross(r, l) < -kConeEps * r.norm() * l.norm()) continue;
      next.right = r;
      next.left = l;

      // Lay out the neighbour: origin(g) = dest(k) -> Q, dest(g) = origin(k) -> P.
      auto ghs = mesh_.faceHalfedges(nf);
      int gi = 0;
      while (ghs[gi] != g) gi++;
      int third = mesh_.origin(mesh_.prev(g));
      Vec3 R3 = mesh_.position(third);
      Vec2 R = layoutTriangleVertex(Q, P, (R3 - mesh_.position(mesh_.origin(g))).norm(),
                                    (R3 - mesh_.position(mesh_.dest(g))).norm());
      std::array<Vec2, 3> nimg;
      nimg[gi] = Q;
      nimg[(gi + 1) % 3] = P;
      nimg[(gi + 2) % 3] = R;

      path_.push_back(nf);
      onPath_[nf] = true;
      visit(nf, g, nimg, next);
      onPath_[nf] = false;
      path_.pop_back();
    }
  }

  const HalfedgeMesh& mesh_;
  SurfacePoint s_, t_;
  int maxFaces_;
  std::vector<bool> onPath_;
  std::vector<int> path_;
  Vec2 sImage_;
  double bestLength_ = kInf;
  FaceSequence best_;
  long long visited_ = 0;
};

bool samePoint(const HalfedgeMesh& mesh, const SurfacePoint& a, const SurfacePoint& b) {
  return (position3D(mesh, a) - position3D(mesh, b)).norm() <= 1e-14 * mesh.diameter() &&
         !incidentFaces(mesh, a).empty() && [&] {
           for (int f : incidentFaces(mesh, a)) {
             if (inClosure(mesh, f, b)) return true;
           }
           return false;
         }();
}

} // namespace

double directUnfoldedDistance(const HalfedgeMesh& mesh, const SurfacePoint& s, const SurfacePoint& t, int maxFaces,
                              FaceSequence* best, long long* visited) {
  validate(mesh, s);
  validate(mesh, t);
  SurfacePoint cs = canonicalize(mesh, s), ct = canonicalize(mesh, t);
  UnfoldingSearch search(mesh, cs, ct, maxFaces);
  double d = search.run();
  if (best) *best = search.best();
  if (visited) *visited += search.visited();
  return d;
}

BruteForceResult bruteForceGeodesic(const HalfedgeMesh& mesh, const SurfacePoint& s, const SurfacePoint& t,
                                    const BruteForceOptions& opts) {
  if (opts.maxFaces < 1) throw BadParameter("maxFaces must be positive");
  validate(mesh, s);
  validate(mesh, t);
  SurfacePoint cs = canonicalize(mesh, s), ct = canonicalize(mesh, t);
  BruteForceResult result;
  if (samePoint(mesh, cs, ct)) return result;

  // Nodes: s, saddle vertices, t. Legs between nodes are straight unfoldings.
  std::vector<SurfacePoint> nodes{cs};
  std::vector<int> nodeVertex{cs.isVertex() ? cs.id : -1};
  for (int v = 0; v < mesh.nVertices(); v++) {
    if (!isSaddleVertex(mesh, v)) continue;
    if ((cs.isVertex() && cs.id == v) || (ct.isVertex() && ct.id == v)) continue;
    nodes.push_back(SurfacePoint::atVertex(v));
    nodeVertex.push_back(v);
  }
  nodes.push_back(ct);
  nodeVertex.push_back(ct.isVertex() ? ct.id : -1);
  const int n = static_cast<int>(nodes.size());

  std::vector<std::vector<double>> leg(n, std::vector<double>(n, kInf));
  std::vector<std::vector<FaceSequence>> seq(n, std::vector<FaceSequence>(n));
  for (int i = 0; i < n; i++) {
    for (int j = i + 1; j < n; j++) {
      leg[i][j] = leg[j][i] = directUnfoldedDistance(mesh, nodes[i], nodes[j], opts.maxFaces, &seq[i][j],
                                                     &result.sequencesVisited);
      seq[j][i] = seq[i][j];
    }
  }

  // Dense Dijkstra; n is small.
  std::vector<double> dist(n, kInf);
  std::vector<int> pred(n, -1);
  std::vector<bool> done(n, false);
  dist[0] = 0.;
  for (int it = 0; it < n; it++) {
    int u = -1;
    for (int i = 0; i < n; i++) {
      if (!done[i] && (u < 0 || dist[i] < dist[u])) u = i;
    }
    if (u < 0 || dist[u] == kInf) break;
    done[u] = true;
    for (int v = 0; v < n; v++) {
      if (!done[v] && dist[u] + leg[u][v] < dist[v]) {
        dist[v] = dist[u] + leg[u][v];
        pred[v] = u;
      }
    }
  }
  if (dist[n - 1] == kInf) {
    throw DepthExceeded("no face sequence of at most " + std::to_string(opts.maxFaces) + " faces reaches the target");
  }
  result.length = dist[n - 1];
  std::vector<int> chain;
  for (int v = n - 1; v >= 0; v = pred[v]) chain.insert(chain.begin(), v);
  for (size_t k = 0; k + 1 < chain.size(); k++) {
    result.legs.push_back(seq[chain[k]][chain[k + 1]]);
    if (k > 0) result.turnVertices.push_back(nodeVertex[chain[k]]);
  }
  return result;
}

// ---------------------------------------------------------------------------------------------------------------

double SteinerGraph::steinerParameter(int j) {
  // Van der Corput sequence in base 2, starting at index 1.
  unsigned i = static_cast<unsigned>(j) + 1;
  double value = 0., scale = 0.5;
  while (i) {
    if (i & 1u) value += scale;
    i >>= 1;
    scale *= 0.5;
  }
  return value;
}

SteinerGraph::SteinerGraph(const HalfedgeMesh& mesh, int level) : mesh_(&mesh), level_(level) {
  if (level < 0) throw BadParameter("Steiner level must be >= 0");
  nodes_ = mesh.positions();
  for (int e = 0; e < mesh.nEdges(); e++) {
    auto [a, b] = mesh.edgeVertices(e);
    for (int j = 0; j < level; j++) {
      double u = steinerParameter(j);
      nodes_.push_back(mesh.position(a) * (1. - u) + mesh.position(b) * u);
    }
  }
  faceNodes_.resize(mesh.nFaces());
  for (int f = 0; f < mesh.nFaces(); f++) {
    for (int h : mesh.faceHalfedges(f)) {
      faceNodes_[f].push_back(mesh.origin(h));
      int base = mesh.nVertices() + mesh.edge(h) * level;
      for (int j = 0; j < level; j++) faceNodes_[f].push_back(base + j);
    }
  }
}

std::vector<double> SteinerGraph::run(const SurfacePoint& s, const SurfacePoint* t, double* tDist) const {
  const HalfedgeMesh& mesh = *mesh_;
  const int V = mesh.nVertices();
  const int N = nNodes();
  // Extra nodes: N for a non-vertex source, N + 1 for a non-vertex target.
  std::vector<Vec3> pos = nodes_;
  pos.push_back(position3D(mesh, s));
  pos.push_back(t ? position3D(mesh, *t) : Vec3{});
  int src = s.isVertex() ? s.id : N;
  int dst = t ? (t->isVertex() ? t->id : N + 1) : -1;
  std::vector<int> srcFaces = incidentFaces(mesh, s);
  std::vector<int> dstFaces = t ? incidentFaces(mesh, *t) : std::vector<int>{};

  auto nodeFaces = [&](int u) {
    std::vector<int> fs;
    if (u == N) return srcFaces;
    if (u == N + 1) return dstFaces;
    if (u < V) {
      for (int h : mesh.outgoingHalfedges(u)) fs.push_back(mesh.face(h));
    } else {
      int e = (u - V) / level_;
      int h = mesh.edgeHalfedge(e);
      fs = {mesh.face(h), mesh.face(mesh.twin(h))};
    }
    return fs;
  };

  std::vector<double> dist(N + 2, kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.;
  pq.push({0., src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == dst) break;
    for (int f : nodeFaces(u)) {
      auto relax = [&](int v) {
        double nd = d + (pos[v] - pos[u]).norm();
        if (nd < dist[v]) {
          dist[v] = nd;
          pq.push({nd, v});
        }
      };
      for (int v : faceNodes_[f]) relax(v);
      if (dst == N + 1) {
        for (int g : dstFaces) {
          if (g == f) relax(N + 1);
        }
      }
    }
  }
  if (tDist) *tDist = dst >= 0 ? dist[dst] : kInf;
  dist.resize(V);
  return dist;
}

double SteinerGraph::distance(const SurfacePoint& s, const SurfacePoint& t) const {
  validate(*mesh_, s);
  validate(*mesh_, t);
  double d = kInf;
  SurfacePoint ct = canonicalize(*mesh_, t);
  run(canonicalize(*mesh_, s), &ct, &d);
  return d;
}

std::vector<double> SteinerGraph::vertexDistances(const SurfacePoint& s) const {
  validate(*mesh_, s);
  return run(canonicalize(*mesh_, s), nullptr, nullptr);
}

double steinerDijkstra(const HalfedgeMesh& mesh, const SurfacePoint& s, const SurfacePoint& t, int level) {
  return SteinerGraph(mesh, level).distance(s, t);
}

} // namespace geowave
