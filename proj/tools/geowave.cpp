// geowave: shortest paths on triangulated polyhedral surfaces.
#include "geowave/cli_io.h"
#include "geowave/errors.h"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace geowave;

namespace {

void writeText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BadParameter("cannot write '" + path + "'");
  out << text;
  if (!out) throw BadParameter("failed writing '" + path + "'");
}

// JSON to a file when a path is given, else to stdout.
void emitJson(const Json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    writeText(path, j.dump(2) + "\n");
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact geodesics and wavefront simulation on triangulated polyhedral surfaces"};
  app.require_subcommand(1);

  // solve
  std::string meshPath, sourceText = "v:0", svgPath, jsonPath, algorithm = "exact";
  std::vector<std::string> targetTexts;
  bool allVertices = false;
  int steinerLevel = 4, maxFaces = 24;
  auto* solveCmd = app.add_subcommand("solve", "Distances and paths from one source");
  solveCmd->add_option("--mesh", meshPath, "OFF or OBJ mesh")->required()->check(CLI::ExistingFile);
  solveCmd->add_option("--source", sourceText, "v:<id>, e:<id>:<t> or f:<id>:<u>:<v>")->capture_default_str();
  auto* targetOpt = solveCmd->add_option("--target", targetTexts, "target point (repeatable)");
  solveCmd->add_flag("--all-vertices", allVertices, "every mesh vertex as a target")->excludes(targetOpt);
  solveCmd->add_option("--emit-svg", svgPath, "path tree drawing (needs --all-vertices and the exact algorithm)");
  solveCmd->add_option("--emit-json", jsonPath, "write JSON here instead of stdout");
  solveCmd->add_option("--algorithm", algorithm, "exact, steiner or bruteforce")->capture_default_str();
  solveCmd->add_option("--steiner-level", steinerLevel, "Steiner points per edge")->capture_default_str();
  solveCmd->add_option("--max-faces", maxFaces, "brute-force face budget")->capture_default_str();

  // verify
  int trials = 100;
  std::uint64_t seed = 0;
  double injectError = 0.;
  std::string verifyJsonPath;
  auto* verifyCmd = app.add_subcommand("verify", "Exact solver against the brute-force and Steiner oracles");
  verifyCmd->add_option("--mesh", meshPath, "OFF or OBJ mesh")->required()->check(CLI::ExistingFile);
  verifyCmd->add_option("--trials", trials, "random vertex pairs")->capture_default_str();
  auto* verifySeed = verifyCmd->add_option("--seed", seed, "RNG seed (default: GEOWAVE_SEED or 1)");
  verifyCmd->add_option("--steiner-level", steinerLevel, "Steiner level for the sandwich check")->capture_default_str();
  verifyCmd->add_option("--max-faces", maxFaces, "brute-force face budget")->capture_default_str();
  verifyCmd->add_option("--inject-error", injectError, "add this to every exact distance (negative control)");
  verifyCmd->add_option("--emit-json", verifyJsonPath, "write JSON here");

  // simulate
  bool debugChecks = false;
  auto* simCmd = app.add_subcommand("simulate", "Wavefront/boundary section simulation with event counts");
  simCmd->add_option("--mesh", meshPath, "OFF or OBJ mesh")->required()->check(CLI::ExistingFile);
  simCmd->add_option("--source", sourceText, "v:<id>, e:<id>:<t> or f:<id>:<u>:<v>")->capture_default_str();
  simCmd->add_flag("--debug-checks", debugChecks, "compare incremental sections with a full regrouping per event");
  simCmd->add_option("--emit-json", jsonPath, "write JSON here instead of stdout");

  // gen
  std::string kind, outPath;
  int n = 0;
  auto* genCmd = app.add_subcommand("gen", "Generate a mesh as OFF");
  genCmd->add_option("--kind", kind, "strip, convex_random or sphere_approx")->required();
  genCmd->add_option("--n", n, "size parameter")->required();
  auto* genSeed = genCmd->add_option("--seed", seed, "RNG seed (default: GEOWAVE_SEED or 1)");
  genCmd->add_option("--out", outPath, "output path (default: stdout)");

  // hull-bench
  HullBenchOptions bench;
  std::string benchJsonPath;
  auto* benchCmd = app.add_subcommand("hull-bench", "Node visits of hull-distance queries by leaf count");
  benchCmd->add_option("--leaves", bench.leafCounts, "leaf counts")->capture_default_str();
  benchCmd->add_option("--queries", bench.queries, "queries per leaf count")->capture_default_str();
  auto* benchSeed = benchCmd->add_option("--seed", seed, "RNG seed (default: GEOWAVE_SEED or 1)");
  benchCmd->add_option("--emit-json", benchJsonPath, "write JSON here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solveCmd->parsed()) {
      HalfedgeMesh mesh = loadMesh(meshPath);
      SolveRequest req;
      req.source = parseSurfacePoint(sourceText);
      for (const auto& t : targetTexts) req.targets.push_back(parseSurfacePoint(t));
      req.allVertices = allVertices;
      req.algorithm = parseAlgorithm(algorithm);
      req.steinerLevel = steinerLevel;
      req.bruteForceMaxFaces = maxFaces;
      if (!svgPath.empty() && (!allVertices || req.algorithm != Algorithm::Exact)) {
        throw BadParameter("--emit-svg needs --all-vertices and --algorithm exact");
      }
      SolveResult res = solve(mesh, req);
      emitJson(solveJson(mesh, req, res), jsonPath);
      if (!svgPath.empty()) {
        std::vector<GeodesicPath> paths;
        for (const auto& p : res.paths) paths.push_back(p.path);
        writeText(svgPath, pathTreeSvg(mesh, paths));
      }
      return 0;
    }
    if (verifyCmd->parsed()) {
      HalfedgeMesh mesh = loadMesh(meshPath);
      VerifyOptions opts;
      opts.trials = trials;
      opts.seed = verifySeed->count() ? seed : defaultSeed();
      opts.steinerLevel = steinerLevel;
      opts.bruteForceMaxFaces = maxFaces;
      opts.injectError = injectError;
      VerifyReport rep = verify(mesh, opts);
      if (!verifyJsonPath.empty()) emitJson(verifyJson(mesh, opts, rep), verifyJsonPath);
      std::cout << (rep.ok ? "ok" : "FAIL") << ": " << rep.trials << " trials, max deviation " << rep.maxDeviation
                << ", max sandwich violation " << rep.maxSandwichViolation << "\n";
      for (const auto& f : rep.failures) std::cerr << "  " << f << "\n";
      return rep.ok ? 0 : 1;
    }
    if (simCmd->parsed()) {
      HalfedgeMesh mesh = loadMesh(meshPath);
      emitJson(simulateJson(mesh, parseSurfacePoint(sourceText), debugChecks), jsonPath);
      return 0;
    }
    if (genCmd->parsed()) {
      PolygonSoup soup = generateSoup(kind, n, genSeed->count() ? seed : defaultSeed());
      soup.toMesh(); // rejects anything the solver would not load
      if (outPath.empty()) {
        writeOFF(std::cout, soup.positions, soup.polygons);
      } else {
        std::ofstream out(outPath);
        if (!out) throw BadParameter("cannot write '" + outPath + "'");
        writeOFF(out, soup.positions, soup.polygons);
      }
      return 0;
    }
    if (benchCmd->parsed()) {
      bench.seed = benchSeed->count() ? seed : defaultSeed();
      auto t0 = std::chrono::steady_clock::now();
      auto rows = hullBench(bench);
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      emitJson(hullBenchJson(bench, rows, wall), benchJsonPath);
      return 0;
    }
  } catch (const GeowaveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
