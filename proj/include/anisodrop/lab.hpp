#pragma once

#include <random>
#include <string>
#include <vector>

#include "anisodrop/json_io.hpp"
#include "anisodrop/optimize.hpp"

namespace anisodrop {

inline constexpr const char* kVersion = "0.1.0";

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // distance to the failure boundary, sign = slack
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// wulff, scaling, bounded, slicing, lipschitz, maximality, ball-potential.
std::vector<std::string> verify_suite_names();

/// Runs the named suites (all when empty). Deterministic for a fixed spec
/// (the seed drives every random shape).
std::vector<SuiteReport> run_verify(const std::vector<std::string>& suites,
                                    const QuadratureSpec& spec);

Json verify_report_json(const std::vector<SuiteReport>& reports,
                        const QuadratureSpec& spec);
std::string verify_report_csv(const std::vector<SuiteReport>& reports,
                              const std::string& comment);

struct ExperimentConfig {
  std::string name;
  Json tension;  // empty object = experiment default
  EnergyParams params = EnergyParams::from_epsilon(2, 1.0, 1e-3);
  QuadratureSpec quad;
  Json family;
  std::vector<double> sweep;
  Json thresholds;  // oracle-fixed assertion constants, version controlled
  std::string out_dir = ".";
  std::uint64_t config_hash = 0;
};

ExperimentConfig experiment_config_from_json(const Json& j);

/// crystal-min, wulff-noncritical, riesz-constancy, dual-potential-min,
/// nonexistence-slice, energy-scaling, fuglede.
std::vector<std::string> experiment_names();

/// Runs one named experiment; writes CSV + JSON summary + manifest under
/// cfg.out_dir and returns the process exit code (0 pass, 1 assertion
/// failure, 3 non-convergence).
int run_experiment(const ExperimentConfig& cfg);

/// Random convex polygon: hull of `vertices` points sampled in a disk.
Polygon2D random_convex_polygon(std::mt19937_64& rng, int vertices,
                                double radius);

/// Family spec: {"variant": "rectangle"|"box"|"polygon_fixed_normals"|
/// "star_fourier", variant fields}; star/polygon families read the tension
/// object.
ShapeFamily family_from_json(const Json& family, const Json& tension);

/// Scan table with the report columns of the external interface.
std::string scan_csv(const std::vector<double>& sweep,
                     const std::vector<OptimizationReport>& reports,
                     const std::string& comment);

/// ISO-8601 UTC timestamp.
std::string utc_timestamp();

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::vector<std::pair<std::string, std::string>> artifacts;  // file, hash
};

Json manifest_to_json(const RunManifest& m);

}  // namespace anisodrop
