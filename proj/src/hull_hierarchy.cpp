#include "geowave/hull_hierarchy.h"

#include "geowave/errors.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace geowave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kBruteForcePoints = 16;

// Indices of the hull vertices, counter-clockwise starting from the lowest-leftmost point.
std::vector<int> hullIndices(const std::vector<Vec2>& pts) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return pts[i].x < pts[j].x || (pts[i].x == pts[j].x && pts[i].y < pts[j].y);
  });
  order.erase(std::unique(order.begin(), order.end(), [&](int i, int j) { return pts[i] == pts[j]; }), order.end());
  if (order.size() <= 2) return order;

  std::vector<int> h(2 * order.size());
  size_t k = 0;
  for (int i : order) {
    while (k >= 2 && orient(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= 0.) k--;
    h[k++] = i;
  }
  for (size_t t = k + 1, j = order.size() - 1; j-- > 0;) {
    int i = order[j];
    while (k >= t && orient(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= 0.) k--;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

std::vector<Vec2> mapped(const std::vector<Vec2>& pts, const Rigid2& T) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (Vec2 p : pts) out.push_back(T.apply(p));
  return out;
}

void setBounds(HullNode& n) {
  Vec2 c;
  for (Vec2 p : n.hull) c += p;
  c = c / static_cast<double>(n.hull.size());
  double r = 0.;
  for (Vec2 p : n.hull) r = std::max(r, (p - c).norm());
  n.center = c;
  n.radius = r;
}

HullTree makeLeaf(std::vector<Vec2> pts, const Rigid2& frame, HullUpdateStats* stats) {
  auto n = std::make_shared<HullNode>();
  n->size = static_cast<int>(pts.size());
  n->leafCount = 1;
  n->points = std::move(pts);
  n->hull = convexHull2D(n->points);
  setBounds(*n);
  if (stats) stats->touched++;
  return {n, frame};
}

HullTree child(const HullTree& t, bool leftSide) {
  return leftSide ? HullTree{t.node->left, t.frame * t.node->leftAlign}
                  : HullTree{t.node->right, t.frame * t.node->rightAlign};
}

// New node over two handles that share an outer frame; the node's own frame is that outer frame.
HullTree makeNode(const HullTree& L, const HullTree& R, HullUpdateStats* stats) {
  auto n = std::make_shared<HullNode>();
  n->left = L.node;
  n->right = R.node;
  n->leftAlign = L.frame;
  n->rightAlign = R.frame;
  n->height = 1 + std::max(L.node->height, R.node->height);
  n->size = L.node->size + R.node->size;
  n->leafCount = L.node->leafCount + R.node->leafCount;

  std::vector<Vec2> pts = mapped(L.node->hull, L.frame);
  const size_t nLeft = pts.size();
  for (Vec2 p : R.node->hull) pts.push_back(R.frame.apply(p));
  auto idx = hullIndices(pts);
  for (int i : idx) n->hull.push_back(pts[i]);
  if (idx.size() >= 2) {
    for (size_t k = 0; k < idx.size(); k++) {
      size_t j = (k + 1) % idx.size();
      if (idx.size() == 2 && k == 1) break;
      bool fromLeft = static_cast<size_t>(idx[k]) < nLeft, toLeft = static_cast<size_t>(idx[j]) < nLeft;
      if (fromLeft != toLeft) n->bridges.push_back({pts[idx[k]], pts[idx[j]]});
    }
  }
  setBounds(*n);
  if (stats) stats->touched++;
  return {n, Rigid2::identity()};
}

HullTree join(const HullTree& A, const HullTree& B, HullUpdateStats* stats) {
  int hA = A.height(), hB = B.height();
  if (std::abs(hA - hB) <= 1) return makeNode(A, B, stats);
  if (hA > hB) {
    HullTree AL = child(A, true), AR = child(A, false);
    HullTree T = join(AR, B, stats);
    if (T.height() <= AL.height() + 1) return makeNode(AL, T, stats);
    HullTree TL = child(T, true), TR = child(T, false);
    if (TL.height() <= TR.height()) return makeNode(makeNode(AL, TL, stats), TR, stats);
    HullTree TLL = child(TL, true), TLR = child(TL, false);
    return makeNode(makeNode(AL, TLL, stats), makeNode(TLR, TR, stats), stats);
  }
  HullTree BL = child(B, true), BR = child(B, false);
  HullTree T = join(A, BL, stats);
  if (T.height() <= BR.height() + 1) return makeNode(T, BR, stats);
  HullTree TL = child(T, true), TR = child(T, false);
  if (TR.height() <= TL.height()) return makeNode(TL, makeNode(TR, BR, stats), stats);
  HullTree TRL = child(TR, true), TRR = child(TR, false);
  return makeNode(makeNode(TL, TRL, stats), makeNode(TRR, BR, stats), stats);
}

HullTree buildRange(const std::vector<Vec2>& chain, int lo, int hi, HullUpdateStats* stats) {
  int n = hi - lo;
  if (n <= 2) return makeLeaf({chain.begin() + lo, chain.begin() + hi}, Rigid2::identity(), stats);
  int mid = lo + (n + 1) / 2;
  return makeNode(buildRange(chain, lo, mid, stats), buildRange(chain, mid, hi, stats), stats);
}

bool insideConvex(Vec2 p, const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return false;
  for (size_t i = 0; i < poly.size(); i++) {
    if (orient(poly[i], poly[(i + 1) % poly.size()], p) < 0.) return false;
  }
  return true;
}

std::vector<std::pair<Vec2, Vec2>> polygonEdges(const std::vector<Vec2>& poly) {
  std::vector<std::pair<Vec2, Vec2>> e;
  if (poly.size() == 1) e.push_back({poly[0], poly[0]});
  else if (poly.size() == 2) e.push_back({poly[0], poly[1]});
  else {
    for (size_t i = 0; i < poly.size(); i++) e.push_back({poly[i], poly[(i + 1) % poly.size()]});
  }
  return e;
}

double segmentConvexDistance(Vec2 a, Vec2 b, const std::vector<Vec2>& poly) {
  if (insideConvex(a, poly) || insideConvex(b, poly)) return 0.;
  double best = kInf;
  for (auto [p, q] : polygonEdges(poly)) best = std::min(best, segmentSegmentDistance(a, b, p, q));
  return best;
}

// Segments that make up the node's contribution to hull boundaries: its bridges, or the leaf itself.
std::vector<std::pair<Vec2, Vec2>> features(const HullNode& n) {
  if (n.isLeaf()) return polygonEdges(n.hull);
  std::vector<std::pair<Vec2, Vec2>> f;
  for (const auto& br : n.bridges) f.push_back({br.a, br.b});
  return f;
}

} // namespace

std::vector<Vec2> convexHull2D(std::vector<Vec2> points) {
  std::vector<Vec2> out;
  for (int i : hullIndices(points)) out.push_back(points[i]);
  return out;
}

double convexPolygonDistance(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  if (p.empty() || q.empty()) return kInf;
  if (insideConvex(p[0], q) || insideConvex(q[0], p)) return 0.;
  double best = kInf;
  for (auto [a, b] : polygonEdges(p)) {
    for (auto [c, d] : polygonEdges(q)) best = std::min(best, segmentSegmentDistance(a, b, c, d));
  }
  return best;
}

HullTree buildHull(const std::vector<Vec2>& chain, HullUpdateStats* stats) {
  if (chain.empty()) throw BadParameter("hull hierarchy needs at least one point");
  return buildRange(chain, 0, static_cast<int>(chain.size()), stats);
}

HullTree mergeHull(const HullTree& left, const HullTree& right, const Rigid2& rel, HullUpdateStats* stats) {
  if (!right.node) return left;
  HullTree r{right.node, rel * right.frame};
  if (!left.node) return r;
  return join(left, r, stats);
}

std::pair<HullTree, HullTree> splitHull(const HullTree& tree, int at, HullUpdateStats* stats) {
  if (!tree.node || at <= 0 || at >= tree.size()) {
    throw IndexOutOfRange("split index " + std::to_string(at) + " outside (0, " + std::to_string(tree.size()) + ")");
  }
  const HullNode& n = *tree.node;
  if (n.isLeaf()) {
    // Two points, at == 1.
    return {makeLeaf({n.points[0]}, tree.frame, stats), makeLeaf({n.points[1]}, tree.frame, stats)};
  }
  HullTree L = child(tree, true), R = child(tree, false);
  int nl = L.size();
  if (at == nl) return {L, R};
  if (at < nl) {
    auto [a, b] = splitHull(L, at, stats);
    return {a, join(b, R, stats)};
  }
  auto [a, b] = splitHull(R, at - nl, stats);
  return {join(L, a, stats), b};
}

HullQueryResult queryHullDistance(const HullTree& a, const HullTree& b, const Rigid2& rel) {
  if (!a.node || !b.node) throw BadParameter("query on an empty hull hierarchy");
  HullQueryResult res;
  HullTree B{b.node, rel * b.frame};
  auto hullA = mapped(a.node->hull, a.frame), hullB = mapped(B.node->hull, B.frame);
  // One hull inside the other: no boundary feature pair would report the overlap.
  if (insideConvex(hullB[0], hullA) || insideConvex(hullA[0], hullB)) {
    res.visits = 1;
    return res;
  }

  struct Pair {
    double bound;
    HullTree x, y;
  };
  auto lowerBound = [](const HullTree& x, const HullTree& y) {
    Vec2 cx = x.frame.apply(x.node->center), cy = y.frame.apply(y.node->center);
    return std::max(0., (cx - cy).norm() - x.node->radius - y.node->radius);
  };
  auto cmp = [](const Pair& p, const Pair& q) { return p.bound > q.bound; };
  std::priority_queue<Pair, std::vector<Pair>, decltype(cmp)> pq(cmp);
  double best = kInf;
  pq.push({lowerBound(a, B), a, B});
  while (!pq.empty()) {
    Pair cur = pq.top();
    pq.pop();
    if (cur.bound >= best) break;
    res.visits++;
    const HullNode& X = *cur.x.node;
    const HullNode& Y = *cur.y.node;
    auto hx = mapped(X.hull, cur.x.frame), hy = mapped(Y.hull, cur.y.frame);
    if (X.size + Y.size <= kBruteForcePoints) {
      best = std::min(best, convexPolygonDistance(hx, hy));
      continue;
    }
    for (auto [p, q] : features(X)) {
      best = std::min(best, segmentConvexDistance(cur.x.frame.apply(p), cur.x.frame.apply(q), hy));
    }
    for (auto [p, q] : features(Y)) {
      best = std::min(best, segmentConvexDistance(cur.y.frame.apply(p), cur.y.frame.apply(q), hx));
    }
    if (best == 0.) break;
    bool splitX = !X.isLeaf() && (Y.isLeaf() || X.size >= Y.size);
    if (splitX) {
      for (bool side : {true, false}) {
        HullTree c = child(cur.x, side);
        double lb = lowerBound(c, cur.y);
        if (lb < best) pq.push({lb, c, cur.y});
      }
    } else if (!Y.isLeaf()) {
      for (bool side : {true, false}) {
        HullTree c = child(cur.y, side);
        double lb = lowerBound(cur.x, c);
        if (lb < best) pq.push({lb, cur.x, c});
      }
    } else {
      best = std::min(best, convexPolygonDistance(hx, hy));
    }
  }
  res.distance = best;
  return res;
}

std::vector<Vec2> chainPoints(const HullTree& tree) {
  std::vector<Vec2> out;
  if (!tree.node) return out;
  if (tree.node->isLeaf()) return mapped(tree.node->points, tree.frame);
  for (bool side : {true, false}) {
    auto part = chainPoints(child(tree, side));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<Vec2> rootHull(const HullTree& tree) { return tree.node ? mapped(tree.node->hull, tree.frame) : std::vector<Vec2>{}; }

namespace {

void checkNode(const HullNode& n, HullCheck& out) {
  if (!out.ok) return;
  double scale = 1e-300;
  for (Vec2 p : n.hull) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  double tol = 1e-12 * scale * scale;
  if (n.height > 2. * std::log2(std::max(1, n.leafCount)) + 2.) {
    out.ok = false;
    out.message = "height " + std::to_string(n.height) + " exceeds bound for " + std::to_string(n.leafCount) + " leaves";
    return;
  }
  if (n.isLeaf()) return;

  auto pts = mapped(n.left->hull, n.leftAlign);
  for (Vec2 p : n.right->hull) pts.push_back(n.rightAlign.apply(p));
  auto expected = convexHull2D(pts);
  bool same = expected.size() == n.hull.size();
  for (size_t i = 0; same && i < expected.size(); i++) {
    bool found = false;
    for (Vec2 q : n.hull) found = found || (q - expected[i]).norm() <= 1e-9 * scale;
    same = found;
  }
  if (!same) {
    out.ok = false;
    out.message = "node hull differs from the hull of its children";
    return;
  }
  for (const auto& br : n.bridges) {
    out.bridgesChecked++;
    for (Vec2 x : pts) {
      double c = cross(br.b - br.a, x - br.a);
      out.worstTangency = std::min(out.worstTangency, c / (scale * scale));
      if (c < -tol) {
        out.ok = false;
        out.message = "bridge is not tangent";
        return;
      }
    }
  }
  checkNode(*n.left, out);
  checkNode(*n.right, out);
}

} // namespace

HullCheck checkHull(const HullTree& tree) {
  HullCheck out;
  if (tree.node) checkNode(*tree.node, out);
  return out;
}

} // namespace geowave
