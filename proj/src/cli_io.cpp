#include "geowave/cli_io.h"

#include "geowave/errors.h"
#include "geowave/hull_hierarchy.h"
#include "geowave/oracles.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace geowave {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<std::string> splitColon(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (!s.empty() && s.back() == ':') parts.push_back("");
  return parts;
}

int parseInt(const std::string& s, const std::string& what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadParameter("bad " + what + " '" + s + "'");
  return v;
}

double parseDouble(const std::string& s, const std::string& what) {
  double v = 0.;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw BadParameter("bad " + what + " '" + s + "'");
  }
  return v;
}

Json point3(Vec3 p) { return Json::array({p.x, p.y, p.z}); }

} // namespace

SurfacePoint parseSurfacePoint(const std::string& text) {
  auto parts = splitColon(text);
  const std::string usage = "expected v:<id>, e:<id>:<t> or f:<id>:<u>:<v>, got '" + text + "'";
  if (parts.empty()) throw BadParameter(usage);
  if (parts[0] == "v" && parts.size() == 2) return SurfacePoint::atVertex(parseInt(parts[1], "vertex id"));
  if (parts[0] == "e" && parts.size() == 3) {
    return SurfacePoint::onEdge(parseInt(parts[1], "edge id"), parseDouble(parts[2], "edge parameter"));
  }
  if (parts[0] == "f" && parts.size() == 4) {
    double u = parseDouble(parts[2], "barycentric"), v = parseDouble(parts[3], "barycentric");
    return SurfacePoint::inFace(parseInt(parts[1], "face id"), u, v, 1. - u - v);
  }
  throw BadParameter(usage);
}

std::string formatSurfacePoint(const SurfacePoint& p) {
  std::ostringstream os;
  os.precision(17);
  switch (p.kind) {
  case SurfacePoint::Kind::Vertex: os << "v:" << p.id; break;
  case SurfacePoint::Kind::Edge: os << "e:" << p.id << ":" << p.coords[0]; break;
  case SurfacePoint::Kind::Face: os << "f:" << p.id << ":" << p.coords[0] << ":" << p.coords[1]; break;
  }
  return os.str();
}

std::uint64_t defaultSeed(std::uint64_t fallback) {
  const char* env = std::getenv("GEOWAVE_SEED");
  if (!env || !*env) return fallback;
  std::string s(env);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadParameter("bad GEOWAVE_SEED '" + s + "'");
  return v;
}

Json withoutWallTime(Json j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (auto& [k, v] : j.items()) {
      if (k.find("wall_time") == std::string::npos) out[k] = withoutWallTime(v);
    }
    return out;
  }
  if (j.is_array()) {
    for (auto& v : j) v = withoutWallTime(v);
  }
  return j;
}

Algorithm parseAlgorithm(const std::string& name) {
  if (name == "exact") return Algorithm::Exact;
  if (name == "steiner") return Algorithm::Steiner;
  if (name == "bruteforce") return Algorithm::BruteForce;
  throw BadParameter("unknown algorithm '" + name + "' (expected exact, steiner or bruteforce)");
}

const char* algorithmName(Algorithm a) {
  switch (a) {
  case Algorithm::Exact: return "exact";
  case Algorithm::Steiner: return "steiner";
  case Algorithm::BruteForce: return "bruteforce";
  }
  return "?";
}

// ---------------------------------------------------------------------------------------------------------------
// solve

SolveResult solve(const HalfedgeMesh& mesh, const SolveRequest& req) {
  auto t0 = Clock::now();
  validate(mesh, req.source);
  std::vector<SurfacePoint> targets = req.targets;
  if (req.allVertices) {
    targets.clear();
    for (int v = 0; v < mesh.nVertices(); v++) targets.push_back(SurfacePoint::atVertex(v));
  }
  if (targets.empty()) throw BadParameter("no targets: give --target or --all-vertices");
  for (const SurfacePoint& t : targets) validate(mesh, t);

  SolveResult res;
  switch (req.algorithm) {
  case Algorithm::Exact: {
    DistanceField field = propagate(mesh, req.source);
    for (const SurfacePoint& t : targets) {
      GeodesicPath path = extractPath(field, t);
      res.paths.push_back({t, path.length, std::move(path)});
    }
    break;
  }
  case Algorithm::Steiner: {
    if (req.steinerLevel < 0) throw BadParameter("steiner level must be >= 0");
    SteinerGraph g(mesh, req.steinerLevel);
    for (const SurfacePoint& t : targets) res.paths.push_back({t, g.distance(req.source, t), {}});
    break;
  }
  case Algorithm::BruteForce:
    for (const SurfacePoint& t : targets) {
      double d = bruteForceGeodesic(mesh, req.source, t, {req.bruteForceMaxFaces}).length;
      res.paths.push_back({t, d, {}});
    }
    break;
  }
  res.wallTime = secondsSince(t0);
  return res;
}

Json solveJson(const HalfedgeMesh& mesh, const SolveRequest& req, const SolveResult& res) {
  Json j;
  j["schema"] = kStatsSchema;
  j["command"] = "solve";
  j["mesh"] = mesh.name();
  j["n"] = mesh.nVertices();
  j["algorithm"] = algorithmName(req.algorithm);
  if (req.algorithm == Algorithm::Steiner) j["steiner_level"] = req.steinerLevel;
  j["source"] = formatSurfacePoint(req.source);
  j["wall_time_s"] = res.wallTime;
  Json targets = Json::array();
  std::int64_t crossings = 0;
  for (const SolvedPath& p : res.paths) {
    Json t;
    t["target"] = formatSurfacePoint(p.target);
    t["distance"] = p.distance;
    if (req.algorithm == Algorithm::Exact) {
      Json pts = Json::array();
      for (const SurfacePoint& q : p.path.points) pts.push_back(point3(position3D(mesh, q)));
      t["path"] = pts;
      t["crossed_edges"] = p.path.crossedEdges;
      Json params = Json::array();
      for (const SurfacePoint& q : p.path.points) {
        if (q.kind == SurfacePoint::Kind::Edge) params.push_back({{"edge", q.id}, {"t", q.edgeParam()}});
      }
      t["edge_crossings"] = params;
      t["crossings"] = p.path.crossedEdges.size();
      crossings += static_cast<std::int64_t>(p.path.crossedEdges.size());
    }
    targets.push_back(t);
  }
  j["targets"] = targets;
  if (req.algorithm == Algorithm::Exact) j["crossings"] = crossings;
  return j;
}

// ---------------------------------------------------------------------------------------------------------------
// path geometry

std::vector<std::pair<int, int>> crossingPathPairs(const HalfedgeMesh& mesh, const std::vector<GeodesicPath>& paths) {
  struct Piece {
    int path;
    Vec2 a, b;
  };
  std::vector<std::vector<Piece>> byFace(mesh.nFaces());
  for (int i = 0; i < static_cast<int>(paths.size()); i++) {
    const auto& pts = paths[i].points;
    for (size_t k = 0; k + 1 < pts.size(); k++) {
      int f = commonFace(mesh, pts[k], pts[k + 1]);
      if (f < 0) continue;
      byFace[f].push_back({i, positionInFace(mesh, f, pts[k]), positionInFace(mesh, f, pts[k + 1])});
    }
  }
  const double eps = 1e-12 * mesh.diameter() * mesh.diameter();
  std::vector<std::pair<int, int>> out;
  for (const auto& pieces : byFace) {
    for (size_t x = 0; x < pieces.size(); x++) {
      for (size_t y = x + 1; y < pieces.size(); y++) {
        const Piece &p = pieces[x], &q = pieces[y];
        if (p.path == q.path) continue;
        if (segmentsProperlyIntersect(p.a, p.b, q.a, q.b, eps)) {
          out.push_back({std::min(p.path, q.path), std::max(p.path, q.path)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string pathTreeSvg(const HalfedgeMesh& mesh, const std::vector<GeodesicPath>& paths) {
  // Front view: x right, y up. The back view is its mirror image in x.
  double minX = INFINITY, maxX = -INFINITY, minY = INFINITY, maxY = -INFINITY;
  for (int v = 0; v < mesh.nVertices(); v++) {
    Vec3 p = mesh.position(v);
    minX = std::min(minX, p.x);
    maxX = std::max(maxX, p.x);
    minY = std::min(minY, p.y);
    maxY = std::max(maxY, p.y);
  }
  const double span = std::max({maxX - minX, maxY - minY, 1e-12});
  const double size = 400., margin = 20., scale = (size - 2. * margin) / span;
  const double cx = 0.5 * (minX + maxX), cy = 0.5 * (minY + maxY);

  std::ostringstream os;
  os.precision(9);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\""
     << 2. * size << "\" height=\"" << size + 30. << "\" viewBox=\"0 0 " << 2. * size << " " << size + 30. << "\">\n";
  std::string title = mesh.name();
  std::string escaped;
  for (char c : title) {
    switch (c) {
    case '&': escaped += "&amp;"; break;
    case '<': escaped += "&lt;"; break;
    case '>': escaped += "&gt;"; break;
    case '"': escaped += "&quot;"; break;
    default: escaped += c;
    }
  }
  os << "<title>" << escaped << ": " << paths.size() << " shortest paths</title>\n";
  os << "<style>.edge{stroke:#555;stroke-width:0.6}.hidden{stroke:#bbb;stroke-width:0.4;stroke-dasharray:2 2}"
        ".path{fill:none;stroke:#e8b4ae;stroke-width:0.5}.seen{fill:none;stroke:#c0392b;stroke-width:0.9}"
        "text{font:14px sans-serif}</style>\n";

  // Paths in view coordinates of the front view, centered at the origin; shared by both views.
  os << "<defs>\n<g id=\"paths\">\n";
  for (const GeodesicPath& path : paths) {
    os << "<polyline class=\"path\" vector-effect=\"non-scaling-stroke\" points=\"";
    for (size_t k = 0; k < path.points.size(); k++) {
      Vec3 p = position3D(mesh, path.points[k]);
      os << (k ? " " : "") << (p.x - cx) * scale << "," << -(p.y - cy) * scale;
    }
    os << "\"/>\n";
  }
  os << "</g>\n</defs>\n";

  auto facing = [&](int f, double flip) {
    auto fv = mesh.faceVertices(f);
    Vec3 n = cross(mesh.position(fv[1]) - mesh.position(fv[0]), mesh.position(fv[2]) - mesh.position(fv[0]));
    return flip * n.z > 0.;
  };
  for (int view = 0; view < 2; view++) {
    const double ox = view * size + 0.5 * size, oy = 0.5 * size + 30.;
    const double flip = view == 0 ? 1. : -1.;
    os << "<text x=\"" << view * size + margin << "\" y=\"20\">" << (view == 0 ? "front" : "back") << "</text>\n";
    os << "<g transform=\"translate(" << ox << "," << oy << ")\">\n";
    // Edges: solid where an adjacent face looks at the viewer, dashed otherwise. Hidden edges first.
    for (int pass = 0; pass < 2; pass++) {
      for (int e = 0; e < mesh.nEdges(); e++) {
        int h = mesh.edgeHalfedge(e);
        bool visible = facing(mesh.face(h), flip) || facing(mesh.face(mesh.twin(h)), flip);
        if (visible != (pass == 1)) continue;
        auto [u, v] = mesh.edgeVertices(e);
        Vec3 a = mesh.position(u), b = mesh.position(v);
        os << "<line class=\"" << (visible ? "edge" : "hidden") << "\" x1=\"" << flip * (a.x - cx) * scale
           << "\" y1=\"" << -(a.y - cy) * scale << "\" x2=\"" << flip * (b.x - cx) * scale << "\" y2=\""
           << -(b.y - cy) * scale << "\"/>\n";
      }
    }
    // Whole paths faintly, then the pieces lying on faces turned to the viewer.
    os << "<use xlink:href=\"#paths\" href=\"#paths\"" << (view == 1 ? " transform=\"scale(-1,1)\"" : "") << "/>\n";
    for (const GeodesicPath& path : paths) {
      std::ostringstream d;
      d.precision(9);
      bool open = false;
      for (size_t k = 0; k + 1 < path.points.size(); k++) {
        int f = commonFace(mesh, path.points[k], path.points[k + 1]);
        if (f < 0 || !facing(f, flip)) {
          open = false;
          continue;
        }
        Vec3 a = position3D(mesh, path.points[k]), b = position3D(mesh, path.points[k + 1]);
        if (!open) d << " M" << flip * (a.x - cx) * scale << "," << -(a.y - cy) * scale;
        d << " L" << flip * (b.x - cx) * scale << "," << -(b.y - cy) * scale;
        open = true;
      }
      if (!d.str().empty()) os << "<path class=\"seen\" d=\"" << d.str().substr(1) << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------------------------------------------
// simulate

Json simulateJson(const HalfedgeMesh& mesh, const SurfacePoint& source, bool debugChecks) {
  auto t0 = Clock::now();
  SimulationOptions opts;
  opts.debugChecks = debugChecks;
  WavefrontRun run = simulateWavefront(mesh, source, opts);
  double simTime = secondsSince(t0);
  std::int64_t crossings = countPathCrossings(run.field);
  double wall = secondsSince(t0);

  const EventLog& log = run.log;
  Json j;
  j["schema"] = kStatsSchema;
  j["command"] = "simulate";
  j["mesh"] = mesh.name();
  j["n"] = mesh.nVertices();
  j["algorithm"] = "wavefront";
  j["source"] = formatSurfacePoint(source);
  j["wall_time_s"] = wall;
  j["simulation_wall_time_s"] = simTime;
  j["vertex_distances"] = run.vertexRadius;
  j["crossings"] = crossings;
  j["events"] = {{"E1", log.touches}, {"E2", log.sweeps}, {"E3", log.vertexEvents}, {"E4", log.deaths}};
  j["section_events"] = log.touches;
  j["arc_edge_crossings"] = log.crossings;
  j["arcs"] = {{"births", log.births}, {"splits", log.splits}, {"spawns", log.spawns}};
  j["reassociations"] = log.reassociations;
  j["association_failures"] = log.associationFailures;
  j["max_sections"] = log.maxSections;
  j["hull"] = {{"queries", log.hullQueries}, {"node_visits", log.hullVisits}, {"max_error", log.hullMaxError}};
  double maxDelta = 0.;
  for (int v = 0; v < mesh.nVertices(); v++) {
    maxDelta = std::max(maxDelta, std::abs(run.vertexRadius[v] - run.field.vertexDistance(v)));
  }
  j["oracle"] = {{"max_e3_vs_exact", maxDelta}};
  j["boundary_remaining"] = run.state.boundarySize();
  return j;
}

// ---------------------------------------------------------------------------------------------------------------
// verify

VerifyReport verify(const HalfedgeMesh& mesh, const VerifyOptions& opts) {
  auto t0 = Clock::now();
  if (opts.trials < 0) throw BadParameter("trials must be >= 0");
  if (mesh.nVertices() < 2) throw BadParameter("verify needs at least two vertices");
  VerifyReport rep;
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> pick(0, mesh.nVertices() - 1);
  std::map<int, DistanceField> fields;
  SteinerGraph steiner(mesh, opts.steinerLevel);
  const double sandwichTol = 1e-9 * mesh.diameter();

  for (int trial = 0; trial < opts.trials; trial++) {
    int s = pick(rng), t = pick(rng);
    while (t == s) t = pick(rng);
    auto it = fields.find(s);
    if (it == fields.end()) it = fields.emplace(s, propagate(mesh, SurfacePoint::atVertex(s))).first;
    const double exact = it->second.vertexDistance(t) + opts.injectError;
    const std::string pair = "v:" + std::to_string(s) + " -> v:" + std::to_string(t);
    rep.trials++;

    try {
      double bf = bruteForceGeodesic(mesh, SurfacePoint::atVertex(s), SurfacePoint::atVertex(t),
                                     {opts.bruteForceMaxFaces})
                      .length;
      rep.bruteForceTrials++;
      double dev = std::abs(exact - bf);
      rep.maxDeviation = std::max(rep.maxDeviation, dev);
      if (dev > opts.tolerance) {
        rep.ok = false;
        rep.failures.push_back(pair + ": exact " + std::to_string(exact) + " vs brute force " + std::to_string(bf));
      }
    } catch (const DepthExceeded&) {
      rep.ok = false;
      rep.failures.push_back(pair + ": brute force found no sequence within " +
                             std::to_string(opts.bruteForceMaxFaces) + " faces");
    }

    double st = steiner.distance(SurfacePoint::atVertex(s), SurfacePoint::atVertex(t));
    double viol = std::max(0., exact - st);
    rep.maxSandwichViolation = std::max(rep.maxSandwichViolation, viol);
    if (viol > sandwichTol) {
      rep.ok = false;
      rep.failures.push_back(pair + ": exact " + std::to_string(exact) + " above Steiner " + std::to_string(st));
    }
  }
  rep.wallTime = secondsSince(t0);
  return rep;
}

Json verifyJson(const HalfedgeMesh& mesh, const VerifyOptions& opts, const VerifyReport& rep) {
  Json j;
  j["schema"] = kStatsSchema;
  j["command"] = "verify";
  j["mesh"] = mesh.name();
  j["n"] = mesh.nVertices();
  j["algorithm"] = "exact";
  j["seed"] = opts.seed;
  j["trials"] = rep.trials;
  j["brute_force_trials"] = rep.bruteForceTrials;
  j["tolerance"] = opts.tolerance;
  j["steiner_level"] = opts.steinerLevel;
  j["inject_error"] = opts.injectError;
  j["ok"] = rep.ok;
  j["oracle"] = {{"max_deviation", rep.maxDeviation}, {"max_sandwich_violation", rep.maxSandwichViolation}};
  j["failures"] = rep.failures;
  j["wall_time_s"] = rep.wallTime;
  return j;
}

// ---------------------------------------------------------------------------------------------------------------
// hull-bench

std::vector<HullBenchRow> hullBench(const HullBenchOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> g(0., 1.);
  std::uniform_real_distribution<double> u(0., 1.);
  auto chain = [&](int n) {
    std::vector<Vec2> c;
    Vec2 p{};
    for (int i = 0; i < n; i++) {
      p += Vec2{g(rng), g(rng)};
      c.push_back(p);
    }
    return c;
  };
  std::vector<HullBenchRow> rows;
  for (int leaves : opts.leafCounts) {
    if (leaves < 1) throw BadParameter("leaf count must be positive");
    HullTree a = buildHull(chain(2 * leaves)), b = buildHull(chain(2 * leaves));
    // Separate the hulls by a random gap so queries descend instead of stopping at an overlap.
    auto ha = rootHull(a), hb = rootHull(b);
    double ra = 0., rb = 0.;
    for (Vec2 p : ha) ra = std::max(ra, p.norm());
    for (Vec2 p : hb) rb = std::max(rb, p.norm());
    HullBenchRow row;
    row.leaves = a.leafCount();
    double total = 0.;
    for (int q = 0; q < opts.queries; q++) {
      double dir = 2. * std::numbers::pi * u(rng);
      double dist = ra + rb + (0.05 + u(rng)) * (ra + rb);
      Rigid2 rel{2. * std::numbers::pi * u(rng), Vec2{std::cos(dir), std::sin(dir)} * dist};
      HullQueryResult r = queryHullDistance(a, b, rel);
      total += static_cast<double>(r.visits);
      row.maxVisits = std::max(row.maxVisits, r.visits);
    }
    row.meanVisits = opts.queries > 0 ? total / opts.queries : 0.;
    double lg = std::log2(static_cast<double>(std::max(2, row.leaves)));
    row.visitsPerLog2 = static_cast<double>(row.maxVisits) / (lg * lg);
    rows.push_back(row);
  }
  return rows;
}

Json hullBenchJson(const HullBenchOptions& opts, const std::vector<HullBenchRow>& rows, double wallTime) {
  Json j;
  j["schema"] = kStatsSchema;
  j["command"] = "hull-bench";
  j["seed"] = opts.seed;
  j["queries"] = opts.queries;
  Json arr = Json::array();
  for (const HullBenchRow& r : rows) {
    arr.push_back({{"leaves", r.leaves},
                   {"mean_visits", r.meanVisits},
                   {"max_visits", r.maxVisits},
                   {"max_visits_per_log2_sq", r.visitsPerLog2}});
  }
  j["rows"] = arr;
  j["wall_time_s"] = wallTime;
  return j;
}

} // namespace geowave
