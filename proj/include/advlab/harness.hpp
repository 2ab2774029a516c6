#pragma once

// Scenario harness: named fixtures, the seeded verification battery, and the
// report formats the CLI emits.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advlab/boolfn.hpp"
#include "advlab/compose.hpp"
#include "advlab/json_io.hpp"

namespace advlab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr double kDefaultBatteryTol = 1e-9;

// Resolves named fixtures.  A file <dir>/<name>.json wins when present (the
// directory comes from the constructor, else the ADVLAB_FIXTURES environment
// variable); otherwise the built-in definition is used.  A file that exists
// but fails to parse is an error, not a fallback.  Unknown names raise
// ConfigError.
class FixtureRegistry {
 public:
  explicit FixtureRegistry(std::string dir = "");

  BooleanFunction function(const std::string& name) const;
  Relation relation(const std::string& name) const;

  static const std::vector<std::string>& function_names();
  static const std::vector<std::string>& relation_names();

 private:
  std::optional<Json> try_load(const std::string& name) const;
  std::string dir_;
};

struct ScenarioResult {
  std::string name;
  bool pass = false;
  std::map<std::string, double> values;
  std::map<std::string, double> residuals;
  std::map<std::string, bool> verdicts;
  std::string note;
  double wall_ms = 0.0;  // excluded from determinism comparisons
};

struct RunReport {
  std::string version = kToolVersion;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::string timestamp;  // excluded from determinism comparisons
  std::vector<ScenarioResult> scenarios;
  int passed = 0;
  int failed = 0;
  bool pass = false;
  double wall_ms = 0.0;
};

// Runs the full fixed scenario list: three seeded spectral property batteries
// (200 instances each), the frozen functional and relational bound values,
// function-as-relation equivalence, the functional and relational composition
// checks (all routes), witness hygiene with target-state perturbations, the
// verifiability ratios of the search relation, and the filtered-norm program.
//
// The direct mode applies to the relational composition scenarios only; the
// functional composition scenarios always solve the composed program, since
// their whole point is comparing against it.  Identical (seed, tol, direct,
// fixture contents) reproduce the report bit for bit except for the timestamp
// and wall_ms fields.
RunReport run_battery(std::uint64_t seed, double tol, DirectMode direct,
                      const FixtureRegistry& fixtures);

Json to_json(const RunReport& rep);
std::string render_markdown(const RunReport& rep);

}  // namespace advlab
