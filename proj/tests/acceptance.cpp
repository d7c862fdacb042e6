// Acceptance checks: one PASS/FAIL line per criterion. Usage: geowave_acceptance [--out DIR] [criterion...]
#include "geowave/cli_io.h"
#include "geowave/errors.h"
#include "geowave/hull_hierarchy.h"
#include "geowave/oracles.h"
#include "hull_oracle.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace geowave;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleTol = 1e-7;        // exact vs brute force (1), E3 vs exact (7)
constexpr double kCubeTol = 1e-9;          // cube distance and crossing parameter (2)
constexpr double kStraightTol = 1e-9;      // path deviation per unit length (3)
constexpr double kSlopeTol = 0.2;          // log-log slopes (4)
constexpr double kHullTol = 1e-9;          // hull query vs brute force (5)
constexpr double kHullVisitConstant = 8.;  // frozen C in visits <= C log2(leaves)^2 (5)
constexpr double kSteinerGap = 0.02;       // level-16 relative gap (6)
constexpr double kBudget1 = 60., kBudget3 = 30., kBudget4 = 120., kBudget5 = 120.; // seconds

fs::path outDir = ".";

struct Outcome {
  bool pass = true;
  std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

HalfedgeMesh dataMesh(const std::string& name) { return loadMesh(fs::path(GEOWAVE_DATA_DIR) / name); }

// Tetrahedron, cube (two triangulations), the flat square slab, the L-prism and random convex hulls with 6..12
// vertices.
std::vector<HalfedgeMesh> smallCorpus(bool convexOnly) {
  std::vector<HalfedgeMesh> out;
  out.push_back(dataMesh("tetrahedron.off"));
  out.push_back(dataMesh("cube.off"));
  out.push_back(dataMesh("cube_corner3.off"));
  if (!convexOnly) {
    out.push_back(dataMesh("square_slab.off"));
    out.push_back(lPrismSoup().toMesh("l_prism"));
  }
  for (int n = 6; n <= 12; n++) {
    for (std::uint64_t seed = 1; seed <= 3; seed++) {
      out.push_back(convexRandomSoup(n, seed).toMesh("convex_random_" + std::to_string(n) + "_" + std::to_string(seed)));
    }
  }
  return out;
}

std::vector<std::pair<int, int>> randomPairs(int nVertices, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, nVertices - 1);
  std::vector<std::pair<int, int>> out;
  while (static_cast<int>(out.size()) < count) {
    int s = pick(rng), t = pick(rng);
    if (s != t) out.push_back({s, t});
  }
  return out;
}

double logSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0., sy = 0., sxx = 0., sxy = 0.;
  for (size_t i = 0; i < x.size(); i++) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. Exact solver against the brute-force unfolding oracle.
Outcome oracleEquivalence() {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0.;
  int pairs = 0;
  auto corpus = smallCorpus(false);
  for (size_t m = 0; m < corpus.size(); m++) {
    const HalfedgeMesh& mesh = corpus[m];
    if (mesh.nVertices() > 12) throw BadParameter("corpus mesh with more than 12 vertices");
    std::map<int, std::vector<double>> exact;
    for (auto [s, t] : randomPairs(mesh.nVertices(), 100, 1000 + m)) {
      auto it = exact.find(s);
      if (it == exact.end()) it = exact.emplace(s, propagate(mesh, SurfacePoint::atVertex(s)).vertexDistances()).first;
      double bf = bruteForceGeodesic(mesh, SurfacePoint::atVertex(s), SurfacePoint::atVertex(t)).length;
      double dev = std::abs(it->second[t] - bf);
      if (dev > worst) worst = dev;
      if (dev > kOracleTol && o.pass) {
        o.pass = false;
        o.detail = mesh.name() + " v" + std::to_string(s) + "->v" + std::to_string(t) + " off by " + fmt(dev) + "; ";
      }
      pairs++;
    }
  }
  double secs = elapsed(t0);
  if (corpus.size() < 20) o.pass = false;
  if (secs >= kBudget1) o.pass = false;
  o.detail += std::to_string(corpus.size()) + " meshes, " + std::to_string(pairs) + " pairs, max |exact - brute| = " +
              fmt(worst) + " (tol " + fmt(kOracleTol) + "), " + fmt(secs) + " s";
  return o;
}

// 2. Cube corner to opposite corner.
Outcome cubeBenchmark() {
  HalfedgeMesh cube = dataMesh("cube.off");
  DistanceField field = propagate(cube, SurfacePoint::atVertex(0));
  GeodesicPath path = extractPath(field, SurfacePoint::atVertex(6));
  double bf = bruteForceGeodesic(cube, SurfacePoint::atVertex(0), SurfacePoint::atVertex(6), {4}).length;
  Outcome o;
  double err = std::abs(path.length - std::sqrt(5.));
  std::vector<double> params;
  for (const SurfacePoint& p : path.points) {
    if (p.kind == SurfacePoint::Kind::Edge) params.push_back(p.edgeParam());
  }
  o.pass = err <= kCubeTol && std::abs(bf - std::sqrt(5.)) <= kCubeTol && path.crossedEdges.size() == 1 &&
           params.size() == 1 && std::abs(params[0] - 0.5) <= kCubeTol;
  o.detail = "distance " + std::to_string(path.length) + " (|d - sqrt5| = " + fmt(err) + ", brute force " +
             std::to_string(bf) + "), " + std::to_string(path.crossedEdges.size()) + " crossing(s)";
  if (!params.empty()) o.detail += " at parameter " + std::to_string(params[0]);
  return o;
}

// 3. Shortest-path tree to all 100 vertices of a random convex polyhedron.
Outcome pathTree() {
  auto t0 = std::chrono::steady_clock::now();
  HalfedgeMesh mesh = convexRandomSoup(100, 1).toMesh("convex_random_100");
  SolveRequest req;
  req.source = SurfacePoint::atVertex(0);
  req.allVertices = true;
  SolveResult res = solve(mesh, req);
  std::vector<GeodesicPath> paths;
  double worstStraight = 0.;
  for (const auto& p : res.paths) {
    paths.push_back(p.path);
    if (p.path.length > 0.) worstStraight = std::max(worstStraight, pathMaxDeviation(mesh, p.path) / p.path.length);
  }
  auto crossings = crossingPathPairs(mesh, paths);
  std::string svg = pathTreeSvg(mesh, paths);
  fs::path svgPath = outDir / "convex_random_100_paths.svg";
  std::ofstream(svgPath) << svg;
  int polylines = 0;
  for (size_t at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) polylines++;
  bool views = svg.find(">front<") != std::string::npos && svg.find(">back<") != std::string::npos;
  double secs = elapsed(t0);
  Outcome o;
  o.pass = paths.size() == 100 && worstStraight <= kStraightTol && crossings.empty() && polylines == 100 && views &&
           secs < kBudget3;
  o.detail = std::to_string(paths.size()) + " paths, max deviation/length " + fmt(worstStraight) + ", " +
             std::to_string(crossings.size()) + " crossing pairs, SVG " + svgPath.string() + " with " +
             std::to_string(polylines) + " polylines" + (views ? " (front + back)" : " (views missing)") + ", " +
             fmt(secs) + " s";
  return o;
}

// 4. Quadratic crossings against linear section-edge events on strip(n).
Outcome quadraticCrossings() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> ns, crossings, touches;
  std::string counts;
  for (int n : {16, 32, 64, 128}) {
    HalfedgeMesh strip = stripSoup(n).toMesh();
    WavefrontRun run = simulateWavefront(strip, SurfacePoint::atVertex(0));
    ns.push_back(n);
    crossings.push_back(static_cast<double>(countPathCrossings(run.field)));
    touches.push_back(static_cast<double>(run.log.touches));
    counts += " n=" + std::to_string(n) + ":" + std::to_string(static_cast<long long>(crossings.back())) + "/" +
              std::to_string(static_cast<long long>(touches.back()));
  }
  double sc = logSlope(ns, crossings), se = logSlope(ns, touches), secs = elapsed(t0);
  Outcome o;
  o.pass = std::abs(sc - 2.) <= kSlopeTol && std::abs(se - 1.) <= kSlopeTol && secs < kBudget4;
  o.detail = "crossing slope " + fmt(sc) + ", E1 slope " + fmt(se) + " (crossings/E1:" + counts + "), " + fmt(secs) +
             " s";
  return o;
}

// 5. Hull hierarchy: randomized operations against brute force, and node visits per query.
Outcome hullHierarchy() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(55);
  std::normal_distribution<double> g(0., 1.);
  std::uniform_real_distribution<double> u(0., 1.);
  auto chain = [&](int n) {
    std::vector<Vec2> c;
    Vec2 p{4. * g(rng), 4. * g(rng)};
    for (int i = 0; i < n; i++) {
      p += Vec2{g(rng), g(rng)};
      c.push_back(p);
    }
    return c;
  };
  auto randomRigid = [&]() { return Rigid2{2. * std::numbers::pi * u(rng), Vec2{g(rng), g(rng)} * 6.}; };
  std::uniform_int_distribution<int> sizeDist(1, 256);

  std::vector<HullTree> pool;
  for (int i = 0; i < 8; i++) pool.push_back(buildHull(chain(sizeDist(rng))));
  int ops = 0, queries = 0, checks = 0;
  std::int64_t bridges = 0;
  double worstQuery = 0.;
  std::string failure;
  auto check = [&](const HullTree& t) {
    HullCheck c = checkHull(t);
    checks++;
    bridges += c.bridgesChecked;
    if (!c.ok && failure.empty()) failure = "bridge check failed: " + c.message;
  };
  for (; ops < 10000; ops++) {
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    int kind = static_cast<int>(u(rng) * 4.);
    if (kind == 0) {
      size_t i = pick(rng);
      pool[i] = buildHull(chain(sizeDist(rng)));
      check(pool[i]);
    } else if (kind == 1) {
      size_t i = pick(rng);
      if (pool[i].size() < 2) continue;
      std::uniform_int_distribution<int> at(1, pool[i].size() - 1);
      auto [a, b] = splitHull(pool[i], at(rng));
      check(a);
      check(b);
      pool[i] = a;
      pool[pick(rng)] = b;
    } else if (kind == 2) {
      size_t i = pick(rng), j = pick(rng);
      if (i == j || pool[i].size() + pool[j].size() > 256) continue;
      HullTree m = mergeHull(pool[i], pool[j], randomRigid());
      check(m);
      pool[i] = m;
    } else {
      size_t i = pick(rng), j = pick(rng);
      Rigid2 rel = randomRigid();
      auto pa = chainPoints(pool[i]), pb = chainPoints(pool[j]);
      for (Vec2& p : pb) p = rel.apply(p);
      double got = queryHullDistance(pool[i], pool[j], rel).distance;
      double want = geowave::testing::bruteHullDistance(pa, pb);
      double dev = std::abs(got - want);
      worstQuery = std::max(worstQuery, dev);
      if (dev > kHullTol && failure.empty()) failure = "query off by " + fmt(dev);
      queries++;
    }
  }

  // Node visits: separated hulls of random walks at fixed leaf counts.
  std::string visits;
  bool visitsOk = true;
  for (int leaves : {64, 256, 1024, 4096}) {
    auto ca = chain(2 * leaves), cb = chain(2 * leaves);
    HullTree a = buildHull(ca), b = buildHull(cb);
    auto ha = geowave::testing::jarvisHull(ca), hb = geowave::testing::jarvisHull(cb);
    Vec2 centerA{}, centerB{};
    for (Vec2 p : ha) centerA += p * (1. / ha.size());
    for (Vec2 p : hb) centerB += p * (1. / hb.size());
    double ra = 0., rb = 0.;
    for (Vec2 p : ha) ra = std::max(ra, (p - centerA).norm());
    for (Vec2 p : hb) rb = std::max(rb, (p - centerB).norm());
    std::int64_t worst = 0;
    for (int q = 0; q < 200; q++) {
      double angle = 2. * std::numbers::pi * u(rng), dir = 2. * std::numbers::pi * u(rng);
      double gap = (ra + rb) * (1.05 + u(rng));
      // Rotate b about its hull center, then place that center at the chosen offset from a's.
      Rigid2 spin{angle, {}};
      Rigid2 rel{angle, centerA + Vec2{std::cos(dir), std::sin(dir)} * gap - spin.apply(centerB)};
      HullQueryResult r = queryHullDistance(a, b, rel);
      std::vector<Vec2> hbMapped;
      for (Vec2 p : hb) hbMapped.push_back(rel.apply(p));
      double dev = std::abs(r.distance - geowave::testing::bruteHullDistance(ha, hbMapped));
      worstQuery = std::max(worstQuery, dev);
      if (dev > kHullTol && failure.empty()) failure = "query off by " + fmt(dev);
      worst = std::max(worst, r.visits);
    }
    double lg = std::log2(static_cast<double>(a.leafCount()));
    double ratio = static_cast<double>(worst) / (lg * lg);
    visitsOk = visitsOk && a.leafCount() == leaves && ratio <= kHullVisitConstant;
    visits += " " + std::to_string(a.leafCount()) + ":" + std::to_string(worst) + "(" + fmt(ratio) + ")";
  }
  double secs = elapsed(t0);
  Outcome o;
  o.pass = failure.empty() && visitsOk && secs < kBudget5;
  o.detail = (failure.empty() ? "" : failure + "; ") + std::to_string(ops) + " ops (" + std::to_string(queries) +
             " queries, " + std::to_string(checks) + " tree checks, " + std::to_string(bridges) +
             " bridges), max query error " + fmt(worstQuery) + "; max visits by leaves (/log2^2):" + visits +
             " vs C = " + fmt(kHullVisitConstant) + ", " + fmt(secs) + " s";
  return o;
}

// 6. Exact distances never exceed Steiner distances; level 16 is within 2%.
Outcome sandwich() {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double worstViolation = 0., worstGap = 0.;
  int queries = 0;
  auto corpus = smallCorpus(false);
  for (size_t m = 0; m < corpus.size(); m++) {
    const HalfedgeMesh& mesh = corpus[m];
    auto pairs = randomPairs(mesh.nVertices(), 100, 2000 + m);
    std::map<int, std::vector<double>> exact;
    for (auto [s, t] : pairs) {
      if (!exact.count(s)) exact[s] = propagate(mesh, SurfacePoint::atVertex(s)).vertexDistances();
    }
    for (int level = 0; level <= 16; level++) {
      SteinerGraph graph(mesh, level);
      std::map<int, std::vector<double>> st;
      for (auto [s, t] : pairs) {
        if (!st.count(s)) st[s] = graph.vertexDistances(SurfacePoint::atVertex(s));
        double e = exact[s][t], d = st[s][t];
        worstViolation = std::max(worstViolation, e - d);
        if (level == 16) worstGap = std::max(worstGap, (d - e) / e);
        if (level == 0) queries++;
      }
    }
  }
  o.pass = worstViolation <= 1e-12 && worstGap < kSteinerGap;
  o.detail = std::to_string(corpus.size()) + " meshes, " + std::to_string(queries) +
             " queries x 17 levels, max (exact - steiner) = " + fmt(worstViolation) + ", max level-16 gap " +
             fmt(100. * worstGap) + "% (limit " + fmt(100. * kSteinerGap) + "%), " + fmt(elapsed(t0)) + " s";
  return o;
}

// 7. Vertex events of the wavefront simulation against the solver.
Outcome simulationConsistency() {
  auto t0 = std::chrono::steady_clock::now();
  auto corpus = smallCorpus(true);
  corpus.push_back(convexRandomSoup(100, 1).toMesh("convex_random_100"));
  corpus.push_back(sphereApproxSoup(162).toMesh("sphere_approx_162"));
  double worst = 0.;
  int runs = 0;
  std::int64_t failures = 0;
  for (const HalfedgeMesh& mesh : corpus) {
    int step = std::max(1, mesh.nVertices() / 6);
    for (int s = 0; s < mesh.nVertices(); s += step) {
      WavefrontRun run = simulateWavefront(mesh, SurfacePoint::atVertex(s));
      DistanceField ref = propagate(mesh, SurfacePoint::atVertex(s));
      for (int v = 0; v < mesh.nVertices(); v++) worst = std::max(worst, std::abs(run.vertexRadius[v] - ref.vertexDistance(v)));
      failures += run.log.associationFailures + run.state.boundarySize();
      runs++;
    }
  }
  Outcome o;
  o.pass = worst <= kOracleTol && failures == 0;
  o.detail = std::to_string(corpus.size()) + " convex meshes, " + std::to_string(runs) +
             " sources, max |E3 radius - exact| = " + fmt(worst) + " (tol " + fmt(kOracleTol) + ")" +
             (failures ? ", unfinished runs" : "") + ", " + fmt(elapsed(t0)) + " s";
  return o;
}

// 8. Every command twice with identical flags and seed.
Outcome determinism() {
  const fs::path dir = outDir / "determinism";
  fs::create_directories(dir);
  const std::string cli = GEOWAVE_CLI_PATH;
  const std::string data = GEOWAVE_DATA_DIR;
  auto run = [&](const std::string& args) {
    std::string cmd = "\"" + cli + "\" " + args + " > /dev/null";
    return std::system(cmd.c_str());
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string mesh = (dir / "convex40.off").string();
  const std::string strip = (dir / "strip32.off").string();
  std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "gen --kind convex_random --n 40 --seed 7 --out {}"},
      {"gen-env", "gen --kind convex_random --n 40 --out {}"},
      {"solve", "solve --mesh " + mesh + " --source v:3 --all-vertices --emit-json {}"},
      {"solve-steiner", "solve --mesh " + data + "/cube.off --target v:6 --algorithm steiner --emit-json {}"},
      {"solve-bruteforce", "solve --mesh " + data + "/cube.off --target v:6 --algorithm bruteforce --emit-json {}"},
      {"simulate", "simulate --mesh " + strip + " --emit-json {}"},
      {"verify", "verify --mesh " + mesh + " --trials 30 --seed 11 --emit-json {}"},
      {"verify-env", "verify --mesh " + data + "/cube.off --trials 30 --emit-json {}"},
      {"hull-bench", "hull-bench --queries 30 --emit-json {}"},
  };
  if (run("gen --kind convex_random --n 40 --seed 7 --out " + mesh) != 0 ||
      run("gen --kind strip --n 32 --out " + strip) != 0) {
    return {false, "could not generate meshes with " + cli};
  }
  setenv("GEOWAVE_SEED", "4242", 1);
  Outcome o;
  int compared = 0;
  for (const auto& [name, pattern] : commands) {
    std::string outputs[2];
    for (int k = 0; k < 2; k++) {
      fs::path out = dir / (name + "_" + std::to_string(k) + (name.starts_with("gen") ? ".off" : ".json"));
      std::string args = pattern;
      args.replace(args.find("{}"), 2, out.string());
      if (run(args) != 0) {
        o.pass = false;
        o.detail += name + " exited nonzero; ";
      }
      std::string text = slurp(out);
      outputs[k] = name.starts_with("gen") ? text : withoutWallTime(Json::parse(text)).dump();
    }
    if (outputs[0] != outputs[1] || outputs[0].empty()) {
      o.pass = false;
      o.detail += name + " differs; ";
    }
    compared++;
  }
  unsetenv("GEOWAVE_SEED");
  o.detail += std::to_string(compared) + " commands run twice, outputs identical apart from wall time: " +
              (o.pass ? "yes" : "no");
  return o;
}

} // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; i++) {
    std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) {
      outDir = argv[++i];
      fs::create_directories(outDir);
    } else {
      selected.push_back(std::atoi(a.c_str()));
    }
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"oracle equivalence", oracleEquivalence}},
      {2, {"cube benchmark", cubeBenchmark}},
      {3, {"shortest-path tree figure", pathTree}},
      {4, {"quadratic crossings vs linear E1", quadraticCrossings}},
      {5, {"hull hierarchy", hullHierarchy}},
      {6, {"sandwich", sandwich}},
      {7, {"simulation/solver consistency", simulationConsistency}},
      {8, {"determinism", determinism}},
  };
  bool all = true;
  for (int c : selected) {
    auto it = criteria.find(c);
    if (it == criteria.end()) {
      std::cout << "criterion " << c << ": FAIL - unknown criterion\n";
      all = false;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << c << " (" << it->second.first << "): " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
