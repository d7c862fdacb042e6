#include "geowave/mesh.h"

#include "geowave/errors.h"

#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace geowave {

namespace {

std::string describeEdge(int u, int v) { return "(" + std::to_string(u) + ", " + std::to_string(v) + ")"; }

} // namespace

HalfedgeMesh::HalfedgeMesh(std::vector<Vec3> positions, const std::vector<std::vector<int>>& polygons,
                           std::string name)
    : name_(std::move(name)), positions_(std::move(positions)) {
  const int nV = nVertices();
  if (nV == 0) throw ParseError("mesh has no vertices");
  if (polygons.empty()) throw ParseError("mesh has no faces");

  Vec3 lo = positions_[0], hi = positions_[0];
  for (Vec3 p : positions_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) throw ParseError("non-finite coordinate");
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  diameter_ = (hi - lo).norm();

  // Fan triangulation from the first listed vertex.
  std::vector<std::array<int, 3>> triangles;
  for (const auto& poly : polygons) {
    if (poly.size() < 3) throw ParseError("face with fewer than 3 vertices");
    for (size_t i = 0; i < poly.size(); i++) {
      if (poly[i] < 0 || poly[i] >= nV) throw ParseError("face references vertex " + std::to_string(poly[i]));
      for (size_t j = 0; j < i; j++) {
        if (poly[i] == poly[j]) throw DegenerateFace("face repeats vertex " + std::to_string(poly[i]));
      }
    }
    for (size_t i = 1; i + 1 < poly.size(); i++) triangles.push_back({poly[0], poly[i], poly[i + 1]});
  }

  const double areaTol = 1e-12 * diameter_ * diameter_;
  std::map<std::pair<int, int>, int> directed;
  halfedges_.reserve(3 * triangles.size());
  for (const auto& tri : triangles) {
    int f = static_cast<int>(faceHalfedge_.size());
    Vec3 a = positions_[tri[0]], b = positions_[tri[1]], c = positions_[tri[2]];
    double area = 0.5 * cross(b - a, c - a).norm();
    if (!(area > areaTol)) throw DegenerateFace("face " + std::to_string(f) + " has area " + std::to_string(area));

    int h0 = static_cast<int>(halfedges_.size());
    faceHalfedge_.push_back(h0);
    for (int k = 0; k < 3; k++) {
      Halfedge he;
      he.origin = tri[k];
      he.next = h0 + (k + 1) % 3;
      he.face = f;
      auto key = std::make_pair(tri[k], tri[(k + 1) % 3]);
      if (!directed.emplace(key, h0 + k).second) {
        throw NonManifold("edge " + describeEdge(key.first, key.second) +
                          " is used twice with the same orientation (more than two faces, or inconsistent winding)");
      }
      halfedges_.push_back(he);
    }
  }

  for (auto& [key, h] : directed) {
    auto it = directed.find({key.second, key.first});
    if (it == directed.end()) throw OpenSurface("boundary edge " + describeEdge(key.first, key.second));
    halfedges_[h].twin = it->second;
  }

  for (int h = 0; h < nHalfedges(); h++) {
    if (h < halfedges_[h].twin) {
      int e = static_cast<int>(edgeHalfedge_.size());
      edgeHalfedge_.push_back(h);
      halfedges_[h].edge = e;
      halfedges_[halfedges_[h].twin].edge = e;
      edgeLength_.push_back((positions_[dest(h)] - positions_[origin(h)]).norm());
    }
  }

  vertexHalfedge_.assign(nV, -1);
  std::vector<int> outDegree(nV, 0);
  for (int h = 0; h < nHalfedges(); h++) {
    vertexHalfedge_[halfedges_[h].origin] = h;
    outDegree[halfedges_[h].origin]++;
  }
  for (int v = 0; v < nV; v++) {
    if (vertexHalfedge_[v] < 0) throw ParseError("vertex " + std::to_string(v) + " is not used by any face");
    int count = 0;
    int h = vertexHalfedge_[v];
    do {
      h = twin(prev(h));
      count++;
    } while (h != vertexHalfedge_[v] && count <= outDegree[v]);
    if (count != outDegree[v]) throw NonManifold("vertex " + std::to_string(v) + " has a non-disk neighborhood");
  }

  if (eulerCharacteristic() != 2) {
    warnings_.push_back("Euler characteristic is " + std::to_string(eulerCharacteristic()) +
                        ", expected 2 for a genus-0 surface");
  }
}

std::array<int, 3> HalfedgeMesh::faceHalfedges(int f) const {
  int h = faceHalfedge_[f];
  return {h, next(h), next(next(h))};
}

std::array<int, 3> HalfedgeMesh::faceVertices(int f) const {
  auto hs = faceHalfedges(f);
  return {origin(hs[0]), origin(hs[1]), origin(hs[2])};
}

std::vector<int> HalfedgeMesh::outgoingHalfedges(int v) const {
  std::vector<int> out;
  int start = vertexHalfedge_[v];
  int h = start;
  do {
    out.push_back(h);
    h = twin(prev(h));
  } while (h != start);
  return out;
}

double HalfedgeMesh::faceArea(int f) const {
  auto vs = faceVertices(f);
  return 0.5 * cross(positions_[vs[1]] - positions_[vs[0]], positions_[vs[2]] - positions_[vs[0]]).norm();
}

double HalfedgeMesh::totalArea() const {
  double a = 0.;
  for (int f = 0; f < nFaces(); f++) a += faceArea(f);
  return a;
}

int HalfedgeMesh::sharedHalfedge(int from, int to) const {
  for (int h : faceHalfedges(from)) {
    if (face(twin(h)) == to) return h;
  }
  return -1;
}

// ---------------------------------------------------------------------------------------------------------------
// File formats

namespace {

// Strips comments and blank lines.
std::vector<std::string> contentLines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

} // namespace

HalfedgeMesh readOFF(std::istream& in, std::string name) {
  std::vector<std::string> lines = contentLines(in);
  if (lines.empty()) throw ParseError("empty OFF file");

  // The counts may share the header line ("OFF 8 6 12").
  std::istringstream tokens;
  std::string all;
  for (const auto& l : lines) all += l + "\n";
  tokens.str(all);

  std::string header;
  tokens >> header;
  if (header != "OFF") throw ParseError("missing OFF header");
  long nV = -1, nF = -1, nE = -1;
  if (!(tokens >> nV >> nF >> nE) || nV <= 0 || nF <= 0) throw ParseError("bad OFF counts");

  std::vector<Vec3> positions(nV);
  for (auto& p : positions) {
    if (!(tokens >> p.x >> p.y >> p.z)) throw ParseError("truncated OFF vertex list");
  }

  // Faces are line-oriented: trailing color values are allowed after the index list.
  std::string rest;
  std::getline(tokens, rest);
  std::vector<std::vector<int>> polygons;
  std::string line;
  while ((long)polygons.size() < nF && std::getline(tokens, line)) {
    std::istringstream ls(line);
    long k;
    if (!(ls >> k)) continue;
    if (k < 3) throw ParseError("face with fewer than 3 vertices");
    std::vector<int> poly(k);
    for (auto& idx : poly) {
      if (!(ls >> idx)) throw ParseError("truncated OFF face");
    }
    polygons.push_back(std::move(poly));
  }
  if ((long)polygons.size() != nF) throw ParseError("truncated OFF face list");
  return HalfedgeMesh(std::move(positions), polygons, std::move(name));
}

HalfedgeMesh readOBJ(std::istream& in, std::string name) {
  std::vector<Vec3> positions;
  std::vector<std::vector<int>> polygons;
  for (const auto& line : contentLines(in)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw ParseError("bad OBJ vertex: " + line);
      positions.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string item;
      while (ls >> item) {
        // "v", "v/vt", "v//vn", "v/vt/vn"
        long idx;
        try {
          idx = std::stol(item.substr(0, item.find('/')));
        } catch (const std::exception&) {
          throw ParseError("bad OBJ face index: " + item);
        }
        if (idx < 0) idx += static_cast<long>(positions.size()) + 1;
        poly.push_back(static_cast<int>(idx - 1));
      }
      polygons.push_back(std::move(poly));
    }
  }
  return HalfedgeMesh(std::move(positions), polygons, std::move(name));
}

HalfedgeMesh loadMesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  if (format == MeshFormat::Auto) {
    std::string ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == ".off") format = MeshFormat::OFF;
    else if (ext == ".obj") format = MeshFormat::OBJ;
    else throw ParseError("cannot infer mesh format from extension '" + ext + "'");
  }
  std::string name = path.stem().string();
  return format == MeshFormat::OFF ? readOFF(in, name) : readOBJ(in, name);
}

void writeOFF(std::ostream& out, const std::vector<Vec3>& positions, const std::vector<std::vector<int>>& polygons) {
  auto old = out.precision(17);
  out << "OFF\n" << positions.size() << " " << polygons.size() << " 0\n";
  for (Vec3 p : positions) out << p.x << " " << p.y << " " << p.z << "\n";
  for (const auto& poly : polygons) {
    out << poly.size();
    for (int v : poly) out << " " << v;
    out << "\n";
  }
  out.precision(old);
}

void writeOFF(std::ostream& out, const HalfedgeMesh& mesh) {
  std::vector<std::vector<int>> polys;
  for (int f = 0; f < mesh.nFaces(); f++) {
    auto vs = mesh.faceVertices(f);
    polys.push_back({vs[0], vs[1], vs[2]});
  }
  writeOFF(out, mesh.positions(), polys);
}

// ---------------------------------------------------------------------------------------------------------------
// Angles

double vertexTotalAngle(const HalfedgeMesh& mesh, int v) {
  if (v < 0 || v >= mesh.nVertices()) throw IndexOutOfRange("vertex " + std::to_string(v));
  double total = 0.;
  for (int h : mesh.outgoingHalfedges(v)) {
    Vec3 p = mesh.position(v);
    Vec3 a = mesh.position(mesh.dest(h)) - p;
    Vec3 b = mesh.position(mesh.origin(mesh.prev(h))) - p;
    total += std::atan2(cross(a, b).norm(), dot(a, b));
  }
  return total;
}

bool isSaddleVertex(const HalfedgeMesh& mesh, int v) {
  return vertexTotalAngle(mesh, v) > 2. * std::numbers::pi + kAngleTolerance;
}

// ---------------------------------------------------------------------------------------------------------------
// Surface points

void validate(const HalfedgeMesh& mesh, const SurfacePoint& p) {
  using K = SurfacePoint::Kind;
  auto bad = [](const std::string& what) { throw BadParameter("invalid surface point: " + what); };
  switch (p.kind) {
  case K::Vertex:
    if (p.id < 0 || p.id >= mesh.nVertices()) bad("vertex id " + std::to_string(p.id));
    break;
  case K::Edge:
    if (p.id < 0 || p.id >= mesh.nEdges()) bad("edge id " + std::to_string(p.id));
    if (!(p.coords[0] >= 0. && p.coords[0] <= 1.)) bad("edge parameter outside [0,1]");
    break;
  case K::Face: {
    if (p.id < 0 || p.id >= mesh.nFaces()) bad("face id " + std::to_string(p.id));
    double sum = 0.;
    for (double c : p.coords) {
      if (!(c >= -1e-12 && c <= 1. + 1e-12)) bad("barycentric coordinate outside [0,1]");
      sum += c;
    }
    if (std::abs(sum - 1.) > 1e-9) bad("barycentric coordinates do not sum to 1");
    break;
  }
  }
}

Vec3 position3D(const HalfedgeMesh& mesh, const SurfacePoint& p) {
  using K = SurfacePoint::Kind;
  switch (p.kind) {
  case K::Vertex:
    return mesh.position(p.id);
  case K::Edge: {
    auto [a, b] = mesh.edgeVertices(p.id);
    return mesh.position(a) * (1. - p.coords[0]) + mesh.position(b) * p.coords[0];
  }
  case K::Face: {
    auto vs = mesh.faceVertices(p.id);
    return mesh.position(vs[0]) * p.coords[0] + mesh.position(vs[1]) * p.coords[1] +
           mesh.position(vs[2]) * p.coords[2];
  }
  }
  return {};
}

SurfacePoint canonicalize(const HalfedgeMesh& mesh, const SurfacePoint& p, double tol) {
  using K = SurfacePoint::Kind;
  if (p.kind == K::Edge) {
    auto [a, b] = mesh.edgeVertices(p.id);
    if (p.coords[0] <= tol) return SurfacePoint::atVertex(a);
    if (p.coords[0] >= 1. - tol) return SurfacePoint::atVertex(b);
    return p;
  }
  if (p.kind == K::Face) {
    auto vs = mesh.faceVertices(p.id);
    auto hs = mesh.faceHalfedges(p.id);
    for (int k = 0; k < 3; k++) {
      if (p.coords[k] >= 1. - tol) return SurfacePoint::atVertex(vs[k]);
    }
    for (int k = 0; k < 3; k++) {
      // Halfedge hs[k] runs vs[k] -> vs[k+1]; the opposite corner is vs[k+2].
      if (p.coords[(k + 2) % 3] <= tol) {
        double s = p.coords[(k + 1) % 3] / (p.coords[k] + p.coords[(k + 1) % 3]);
        int e = mesh.edge(hs[k]);
        double t = mesh.edgeHalfedge(e) == hs[k] ? s : 1. - s;
        return canonicalize(mesh, SurfacePoint::onEdge(e, t), tol);
      }
    }
  }
  return p;
}

std::vector<int> incidentFaces(const HalfedgeMesh& mesh, const SurfacePoint& p) {
  using K = SurfacePoint::Kind;
  switch (p.kind) {
  case K::Vertex: {
    std::vector<int> fs;
    for (int h : mesh.outgoingHalfedges(p.id)) fs.push_back(mesh.face(h));
    return fs;
  }
  case K::Edge: {
    int h = mesh.edgeHalfedge(p.id);
    return {mesh.face(h), mesh.face(mesh.twin(h))};
  }
  case K::Face:
    return {p.id};
  }
  return {};
}

Vec2 layoutTriangleVertex(Vec2 a, Vec2 b, double distA, double distB) {
  Vec2 ab = b - a;
  double len = ab.norm();
  Vec2 u = ab / len;
  double x = (len * len + distA * distA - distB * distB) / (2. * len);
  double y = std::sqrt(std::max(0., distA * distA - x * x));
  return a + u * x + u.perp() * y;
}

std::array<Vec2, 3> halfedgeFrameLayout(const HalfedgeMesh& mesh, int h) {
  int hn = mesh.next(h);
  Vec2 a{0., 0.};
  Vec2 b{mesh.halfedgeLength(h), 0.};
  Vec2 c = layoutTriangleVertex(a, b, mesh.halfedgeLength(mesh.next(hn)), mesh.halfedgeLength(hn));
  return {a, b, c};
}

Vec2 positionInHalfedgeFrame(const HalfedgeMesh& mesh, int h, const SurfacePoint& p) {
  using K = SurfacePoint::Kind;
  auto corners = halfedgeFrameLayout(mesh, h);
  int f = mesh.face(h);
  std::array<int, 3> vs{mesh.origin(h), mesh.dest(h), mesh.origin(mesh.prev(h))};
  auto cornerOf = [&](int v) -> Vec2 {
    for (int k = 0; k < 3; k++) {
      if (vs[k] == v) return corners[k];
    }
    throw InvariantViolation("vertex " + std::to_string(v) + " is not on face " + std::to_string(f));
  };
  switch (p.kind) {
  case K::Vertex:
    return cornerOf(p.id);
  case K::Edge: {
    auto [a, b] = mesh.edgeVertices(p.id);
    return cornerOf(a) * (1. - p.coords[0]) + cornerOf(b) * p.coords[0];
  }
  case K::Face: {
    if (p.id != f) throw InvariantViolation("face point is not on face " + std::to_string(f));
    auto fv = mesh.faceVertices(f);
    return cornerOf(fv[0]) * p.coords[0] + cornerOf(fv[1]) * p.coords[1] + cornerOf(fv[2]) * p.coords[2];
  }
  }
  return {};
}

Vec2 positionInFace(const HalfedgeMesh& mesh, int f, const SurfacePoint& p) {
  return positionInHalfedgeFrame(mesh, mesh.faceHalfedge(f), p);
}

// ---------------------------------------------------------------------------------------------------------------
// Unfolding

namespace {

Rigid2 frameToPlane(Vec2 localOrigin, Vec2 localX, Vec2 planeOrigin, Vec2 planeX) {
  // Rigid map sending localOrigin -> planeOrigin and the direction localX-localOrigin onto planeX-planeOrigin.
  double angle = std::atan2((planeX - planeOrigin).y, (planeX - planeOrigin).x) -
                 std::atan2((localX - localOrigin).y, (localX - localOrigin).x);
  Rigid2 r{angle, {}};
  r.offset = planeOrigin - r.rotate(localOrigin);
  return r;
}

} // namespace

PlanarUnfolding unfoldStrip(const HalfedgeMesh& mesh, const std::vector<int>& strip) {
  PlanarUnfolding out;
  if (strip.empty()) return out;
  for (int f : strip) {
    if (f < 0 || f >= mesh.nFaces()) throw IndexOutOfRange("face " + std::to_string(f));
  }

  FacePlacement first;
  first.face = strip[0];
  first.transform = Rigid2::identity();
  first.corners = faceLayout(mesh, strip[0]);
  out.placements.push_back(first);

  for (size_t i = 1; i < strip.size(); i++) {
    const FacePlacement& prevPlace = out.placements.back();
    int h = mesh.sharedHalfedge(strip[i - 1], strip[i]);
    if (h < 0) {
      throw NotAdjacent("faces " + std::to_string(strip[i - 1]) + " and " + std::to_string(strip[i]) +
                        " share no edge");
    }
    auto prevVerts = mesh.faceVertices(prevPlace.face);
    auto prevCorner = [&](int v) {
      for (int k = 0; k < 3; k++) {
        if (prevVerts[k] == v) return prevPlace.corners[k];
      }
      return Vec2{};
    };
    Vec2 pa = prevCorner(mesh.origin(h)), pb = prevCorner(mesh.dest(h));

    int f = strip[i];
    auto local = faceLayout(mesh, f);
    auto verts = mesh.faceVertices(f);
    Vec2 la, lb;
    for (int k = 0; k < 3; k++) {
      if (verts[k] == mesh.origin(h)) la = local[k];
      if (verts[k] == mesh.dest(h)) lb = local[k];
    }
    FacePlacement place;
    place.face = f;
    place.transform = frameToPlane(la, lb, pa, pb);
    for (int k = 0; k < 3; k++) place.corners[k] = place.transform.apply(local[k]);
    // Pin the shared edge to the previous images exactly.
    for (int k = 0; k < 3; k++) {
      if (verts[k] == mesh.origin(h)) place.corners[k] = pa;
      if (verts[k] == mesh.dest(h)) place.corners[k] = pb;
    }
    out.placements.push_back(place);

    int e = mesh.edge(h);
    auto [ea, eb] = mesh.edgeVertices(e);
    out.folds.push_back({e, ea == mesh.origin(h) ? pa : pb, ea == mesh.origin(h) ? pb : pa});
  }
  return out;
}

Vec2 PlanarUnfolding::image(const HalfedgeMesh& mesh, int i, const SurfacePoint& p) const {
  const FacePlacement& place = placements.at(i);
  return place.transform.apply(positionInFace(mesh, place.face, p));
}

} // namespace geowave
