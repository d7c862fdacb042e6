#include "geowave/generators.h"

#include "geowave/errors.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace geowave {

PolygonSoup stripSoup(int n) {
  if (n < 4) throw BadParameter("strip needs n >= 4, got " + std::to_string(n));
  const int m = n / 2; // cells along the strip
  const int k = std::max(1, n / 4);

  PolygonSoup s;
  auto add = [&](double x, double y) {
    s.positions.push_back({x, y, 0.});
    return static_cast<int>(s.positions.size()) - 1;
  };
  std::vector<int> l(m + 1), r(m + 1), b(m, -1), far(k);
  for (int i = 0; i <= m; i++) l[i] = add(i, 0.);
  for (int i = 0; i <= m; i++) r[i] = add(i, 1.);
  for (int j = 0; j < k; j++) far[j] = add(m, (j + 1.) / (k + 1.));
  for (int i = 1; i < m; i++) b[i] = add(i, 0.5);

  // Top sheet, counter-clockwise seen from +z.
  for (int i = 0; i + 1 < m; i++) {
    s.polygons.push_back({l[i], l[i + 1], r[i + 1]});
    s.polygons.push_back({l[i], r[i + 1], r[i]});
  }
  std::vector<int> endChain{l[m]};
  endChain.insert(endChain.end(), far.begin(), far.end());
  endChain.push_back(r[m]);
  endChain.push_back(r[m - 1]);
  for (size_t j = 0; j + 1 < endChain.size(); j++) s.polygons.push_back({l[m - 1], endChain[j], endChain[j + 1]});

  // Bottom sheet, built counter-clockwise from +z and flipped.
  std::vector<std::vector<int>> bottom;
  if (m == 1) throw BadParameter("strip needs n >= 4");
  bottom.push_back({l[0], l[1], b[1]});
  bottom.push_back({l[0], b[1], r[0]});
  bottom.push_back({r[0], b[1], r[1]});
  for (int i = 1; i + 1 < m; i++) {
    bottom.push_back({l[i], l[i + 1], b[i + 1]});
    bottom.push_back({l[i], b[i + 1], b[i]});
    bottom.push_back({b[i], b[i + 1], r[i + 1]});
    bottom.push_back({b[i], r[i + 1], r[i]});
  }
  if (m >= 2) {
    std::vector<int> chain{l[m - 1], l[m]};
    chain.insert(chain.end(), far.begin(), far.end());
    chain.push_back(r[m]);
    chain.push_back(r[m - 1]);
    for (size_t j = 0; j + 1 < chain.size(); j++) bottom.push_back({b[m - 1], chain[j], chain[j + 1]});
  }
  // Cell 0 already covers up to rung 1; when m == 2 the loop above emitted nothing and the far fan closes it.
  for (auto& tri : bottom) {
    std::reverse(tri.begin(), tri.end());
    s.polygons.push_back(tri);
  }
  return s;
}

PolygonSoup convexHull(const std::vector<Vec3>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw BadParameter("convex hull needs at least 4 points");

  double scale = 0.;
  for (const auto& p : pts) scale = std::max(scale, (p - pts[0]).norm());
  const double eps = 1e-12 * scale;

  // Initial tetrahedron from four points in general position.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < n && i1 < 0; i++) {
    if ((pts[i] - pts[i0]).norm() > eps) i1 = i;
  }
  for (int i = 1; i < n && i2 < 0 && i1 >= 0; i++) {
    if (cross(pts[i1] - pts[i0], pts[i] - pts[i0]).norm() > eps * scale) i2 = i;
  }
  for (int i = 1; i < n && i3 < 0 && i2 >= 0; i++) {
    if (std::abs(dot(cross(pts[i1] - pts[i0], pts[i2] - pts[i0]), pts[i] - pts[i0])) > eps * scale * scale) i3 = i;
  }
  if (i3 < 0) throw BadParameter("convex hull input is degenerate (coplanar)");

  struct Face {
    std::array<int, 3> v;
    Vec3 normal;
    double offset;
    bool alive = true;
  };
  std::vector<Face> faces;
  auto makeFace = [&](int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.normal = cross(pts[b] - pts[a], pts[c] - pts[a]);
    f.offset = dot(f.normal, pts[a]);
    faces.push_back(f);
  };
  Vec3 interior = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.;
  for (auto tri : std::vector<std::array<int, 3>>{{i0, i1, i2}, {i0, i1, i3}, {i0, i2, i3}, {i1, i2, i3}}) {
    Vec3 nrm = cross(pts[tri[1]] - pts[tri[0]], pts[tri[2]] - pts[tri[0]]);
    if (dot(nrm, interior - pts[tri[0]]) > 0) std::swap(tri[1], tri[2]);
    makeFace(tri[0], tri[1], tri[2]);
  }

  for (int p = 0; p < n; p++) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<int> visible;
    for (int f = 0; f < (int)faces.size(); f++) {
      if (!faces[f].alive) continue;
      double len = faces[f].normal.norm();
      if (dot(faces[f].normal, pts[p]) - faces[f].offset > 1e-10 * scale * len) visible.push_back(f);
    }
    if (visible.empty()) continue;
    std::set<std::pair<int, int>> visEdges;
    for (int f : visible) {
      for (int k = 0; k < 3; k++) visEdges.insert({faces[f].v[k], faces[f].v[(k + 1) % 3]});
    }
    for (int f : visible) faces[f].alive = false;
    for (auto [a, b] : visEdges) {
      if (!visEdges.count({b, a})) makeFace(a, b, p);
    }
  }

  PolygonSoup out;
  std::map<int, int> remap;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    std::vector<int> poly;
    for (int v : f.v) {
      remap.emplace(v, 0);
      poly.push_back(v);
    }
    out.polygons.push_back(poly);
  }
  int next = 0;
  for (auto& [v, idx] : remap) {
    idx = next++;
    out.positions.push_back(pts[v]);
  }
  for (auto& poly : out.polygons) {
    for (int& v : poly) v = remap[v];
  }
  return out;
}

PolygonSoup convexRandomSoup(int n, std::uint64_t seed) {
  if (n < 4) throw BadParameter("convex_random needs n >= 4, got " + std::to_string(n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0., 1.);
  std::vector<Vec3> pts;
  while ((int)pts.size() < n) {
    Vec3 p{gauss(rng), gauss(rng), gauss(rng)};
    if (p.norm() < 1e-6) continue;
    pts.push_back(p.normalized());
  }
  return convexHull(pts);
}

PolygonSoup sphereApproxSoup(int n) {
  if (n < 4) throw BadParameter("sphere_approx needs n >= 4, got " + std::to_string(n));
  const double t = (1. + std::sqrt(5.)) / 2.;
  std::vector<Vec3> pos{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pos) p = p.normalized();
  std::vector<std::array<int, 3>> tris{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  // Vertex count after k subdivisions: 10 * 4^k + 2.
  int level = 0;
  while (std::abs(10 * (1 << (2 * (level + 1))) + 2 - n) < std::abs(10 * (1 << (2 * level)) + 2 - n)) level++;

  for (int it = 0; it < level; it++) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto found = mid.find(key);
      if (found != mid.end()) return found->second;
      pos.push_back(((pos[a] + pos[b]) / 2.).normalized());
      int id = static_cast<int>(pos.size()) - 1;
      mid[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (auto [a, b, c] : tris) {
      int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  PolygonSoup s;
  s.positions = pos;
  for (auto [a, b, c] : tris) s.polygons.push_back({a, b, c});
  return s;
}

PolygonSoup lPrismSoup() {
  // L-shaped cross-section, counter-clockwise; vertex 3 is the reflex corner.
  const std::vector<Vec2> ring{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  PolygonSoup s;
  for (double z : {0., 1.}) {
    for (Vec2 p : ring) s.positions.push_back({p.x, p.y, z});
  }
  // Caps are listed from the reflex corner so the fan triangulation stays inside the L.
  s.polygons.push_back({3, 2, 1, 0, 5, 4});
  s.polygons.push_back({9, 10, 11, 6, 7, 8});
  for (int i = 0; i < 6; i++) {
    int j = (i + 1) % 6;
    s.polygons.push_back({i, j, j + 6, i + 6});
  }
  return s;
}

PolygonSoup generateSoup(const std::string& kind, int n, std::uint64_t seed) {
  if (kind == "strip") return stripSoup(n);
  if (kind == "convex_random") return convexRandomSoup(n, seed);
  if (kind == "sphere_approx") return sphereApproxSoup(n);
  throw BadParameter("unknown mesh kind '" + kind + "' (expected strip, convex_random or sphere_approx)");
}

} // namespace geowave
