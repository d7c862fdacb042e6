#pragma once

#include "geowave/vector.h"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace geowave {

struct HullNode;
using HullNodePtr = std::shared_ptr<const HullNode>;

struct HullBridge {
  Vec2 a, b; // consecutive counter-clockwise vertices of the node hull, one from each child, node frame
};

// Immutable node of a hull hierarchy over an ordered chain of points. Subtrees are shared between versions, so
// split and merge only allocate the nodes along the affected paths.
struct HullNode {
  int height = 0;    // leaves are 0
  int size = 0;      // chain points in the subtree
  int leafCount = 0;
  std::vector<Vec2> points; // leaves only (one or two chain points), node frame
  HullNodePtr left, right;
  Rigid2 leftAlign, rightAlign; // child frame -> node frame
  std::vector<Vec2> hull;       // counter-clockwise, collinear points dropped, node frame
  std::vector<HullBridge> bridges;
  Vec2 center; // bounding circle of the hull
  double radius = 0.;

  bool isLeaf() const { return !left; }
};

// A hierarchy as seen from some outer frame: node frame -> outer frame.
struct HullTree {
  HullNodePtr node;
  Rigid2 frame;

  int size() const { return node ? node->size : 0; }
  int height() const { return node ? node->height : -1; }
  int leafCount() const { return node ? node->leafCount : 0; }
};

struct HullUpdateStats {
  std::int64_t touched = 0; // nodes allocated
};

// Balanced hierarchy by recursive halving; leaves hold at most two points. Throws BadParameter on an empty chain.
HullTree buildHull(const std::vector<Vec2>& chain, HullUpdateStats* stats = nullptr);

// Joins two hierarchies; `rel` maps right's outer frame into left's. The result lives in left's outer frame.
HullTree mergeHull(const HullTree& left, const HullTree& right, const Rigid2& rel, HullUpdateStats* stats = nullptr);

// Splits before chain index `at` (0 < at < size). Throws IndexOutOfRange.
std::pair<HullTree, HullTree> splitHull(const HullTree& tree, int at, HullUpdateStats* stats = nullptr);

struct HullQueryResult {
  double distance = 0.;
  std::int64_t visits = 0; // node pairs examined
};

// Distance between the convex hulls of the two chains; `rel` maps b's outer frame into a's. Zero when they
// intersect.
HullQueryResult queryHullDistance(const HullTree& a, const HullTree& b, const Rigid2& rel);

// Chain points and root hull in the tree's outer frame.
std::vector<Vec2> chainPoints(const HullTree& tree);
std::vector<Vec2> rootHull(const HullTree& tree);

// Convex hull by monotone chain: counter-clockwise, collinear points dropped, duplicates merged.
std::vector<Vec2> convexHull2D(std::vector<Vec2> points);
// Exact distance between two convex polygons (any of them may be a point or a segment); zero if they intersect.
double convexPolygonDistance(const std::vector<Vec2>& p, const std::vector<Vec2>& q);

struct HullCheck {
  bool ok = true;
  std::int64_t bridgesChecked = 0;
  double worstTangency = 0.; // most negative signed area found, normalised by scale^2
  std::string message;
};

// Verifies bridge tangency (tolerance 1e-12 * scale^2), node hull = hull of the mapped child hulls, and the height
// bound, at every node.
HullCheck checkHull(const HullTree& tree);

} // namespace geowave
