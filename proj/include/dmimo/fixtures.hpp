#pragma once
// Golden fixtures: regenerate an artifact from a config and compare it with a stored result.

#include <map>
#include <string>
#include <vector>

namespace dmimo {

enum class ToleranceClass { BitExact, Numeric, Statistical };

std::string to_string(ToleranceClass c);
ToleranceClass parse_tolerance_class(const std::string& name);

/// One summary statistic checked as mean +- band.
struct StatBand {
  std::string metric;
  double mean = 0.0;
  double band = 0.0;
};

struct FixtureSpec {
  std::string name;
  /// track | activation | summary | peb_map | monte_carlo | bounds | selection
  std::string artifact;
  std::string config;  ///< relative to the manifest directory
  ToleranceClass tolerance_class = ToleranceClass::BitExact;
  std::string golden;      ///< stored artifact (bit-exact, numeric), relative to the manifest
  std::string digest;      ///< fnv1a64 of the golden text (bit-exact)
  double tolerance = 1e-8; ///< per-cell absolute tolerance (numeric)
  std::vector<StatBand> stats;

  // Artifact parameters.
  int nx = 50, ny = 35;                    ///< peb_map
  std::vector<double> snr_db = {10, 20, 30};  ///< monte_carlo
  int trials = 100;                        ///< monte_carlo
  int k_prime = 0;                         ///< selection (0: from the config)
  std::string method;                      ///< selection (empty: from the config)
};

struct Manifest {
  std::string directory;  ///< where relative paths resolve
  std::vector<FixtureSpec> fixtures;
};

Manifest load_manifest(const std::string& path);
std::string serialize_manifest(const Manifest& manifest);

/// Regenerated artifact text plus the named statistics the artifact supports.
struct Artifact {
  std::string text;
  std::map<std::string, double> metrics;
};

Artifact generate_artifact(const FixtureSpec& spec, const std::string& directory, int workers = 1);

struct FixtureReport {
  std::string name;
  bool passed = false;
  std::string message;
  double seconds = 0.0;
};

/// "fnv1a64:" followed by 16 hex digits.
std::string fnv1a_digest(const std::string& text);

/// Compares a regenerated artifact with the stored expectation. `golden_text` may be empty when
/// no golden file exists. Failures name the first divergent row and column.
FixtureReport compare_artifact(const FixtureSpec& spec, const Artifact& produced, const std::string& golden_text);

FixtureReport verify_fixture(const FixtureSpec& spec, const std::string& directory, int workers = 1);
/// All fixtures, run independently on up to `workers` threads; reports keep manifest order.
std::vector<FixtureReport> verify_manifest(const Manifest& manifest, int workers = 1);
/// Rewrites golden files and digests from fresh runs; statistical bands are left untouched.
Manifest update_manifest(const Manifest& manifest, int workers = 1);

}  // namespace dmimo
