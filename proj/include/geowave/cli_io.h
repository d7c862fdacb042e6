#pragma once

#include "geowave/exact_geodesics.h"
#include "geowave/generators.h"
#include "geowave/wavefront.h"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geowave {

using Json = nlohmann::json;

constexpr int kStatsSchema = 1;

// "v:<id>", "e:<id>:<t>" or "f:<id>:<u>:<v>" (barycentrics u, v, 1-u-v). Throws BadParameter.
SurfacePoint parseSurfacePoint(const std::string& text);
std::string formatSurfacePoint(const SurfacePoint& p);

// Seed from GEOWAVE_SEED, else `fallback`. Throws BadParameter on a malformed value.
std::uint64_t defaultSeed(std::uint64_t fallback = 1);

// Drops every key containing "wall_time", recursively; what remains must be identical across repeated runs.
Json withoutWallTime(Json j);

enum class Algorithm { Exact, Steiner, BruteForce };
Algorithm parseAlgorithm(const std::string& name);
const char* algorithmName(Algorithm a);

struct SolveRequest {
  SurfacePoint source;
  std::vector<SurfacePoint> targets; // ignored when allVertices
  bool allVertices = false;
  Algorithm algorithm = Algorithm::Exact;
  int steinerLevel = 4;
  int bruteForceMaxFaces = 24;
};

struct SolvedPath {
  SurfacePoint target;
  double distance = 0.;
  GeodesicPath path; // exact algorithm only
};

struct SolveResult {
  std::vector<SolvedPath> paths;
  double wallTime = 0.;
};

SolveResult solve(const HalfedgeMesh& mesh, const SolveRequest& req);
Json solveJson(const HalfedgeMesh& mesh, const SolveRequest& req, const SolveResult& res);

// Pairs of paths whose pieces cross transversally inside some face. Shared endpoints and overlapping pieces near a
// common start do not count.
std::vector<std::pair<int, int>> crossingPathPairs(const HalfedgeMesh& mesh, const std::vector<GeodesicPath>& paths);

// Two orthographic views side by side, front (looking down -z) and back (looking down +z). The document holds one
// <polyline class="path"> per path, shared by both views and drawn faintly; each view overlays the pieces on faces
// turned towards it.
std::string pathTreeSvg(const HalfedgeMesh& mesh, const std::vector<GeodesicPath>& paths);

// Wavefront run plus the solver comparison as RunStats.
Json simulateJson(const HalfedgeMesh& mesh, const SurfacePoint& source, bool debugChecks);

struct VerifyOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-7;   // exact vs brute force
  int steinerLevel = 4;
  int bruteForceMaxFaces = 24;
  double injectError = 0.;   // added to every exact distance (negative control)
};

struct VerifyReport {
  bool ok = true;
  int trials = 0;
  int bruteForceTrials = 0;  // trials where the brute force finished within its face budget
  double maxDeviation = 0.;  // |exact - brute force|
  double maxSandwichViolation = 0.; // max(0, exact - steiner)
  std::vector<std::string> failures;
  double wallTime = 0.;
};

VerifyReport verify(const HalfedgeMesh& mesh, const VerifyOptions& opts);
Json verifyJson(const HalfedgeMesh& mesh, const VerifyOptions& opts, const VerifyReport& rep);

struct HullBenchOptions {
  std::vector<int> leafCounts{64, 256, 1024, 4096};
  int queries = 200;
  std::uint64_t seed = 1;
};

struct HullBenchRow {
  int leaves = 0;
  double meanVisits = 0.;
  std::int64_t maxVisits = 0;
  double visitsPerLog2 = 0.; // maxVisits / log2(leaves)^2
};

std::vector<HullBenchRow> hullBench(const HullBenchOptions& opts);
Json hullBenchJson(const HullBenchOptions& opts, const std::vector<HullBenchRow>& rows, double wallTime);

} // namespace geowave
