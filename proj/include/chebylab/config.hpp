#pragma once

// Scenario configuration (strict JSON, schema_version 1), grid generation,
// report/CSV writers and the CLI entry points.  Unknown config fields are
// rejected by name so schema drift is caught loudly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chebylab/harness.hpp"

namespace chebylab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "chebylab";
inline constexpr const char* kToolVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config error at '" + field + "': " + what),
        field_path(field) {}
  std::string field_path;
};

struct LatticeSpec {
  Vec lo;
  Vec hi;
  std::vector<int> counts;
  double jitter = 0.0;
  int target_count = 0;  // 0 = keep every off-set lattice point
};

struct GridSpec {
  std::optional<LatticeSpec> lattice;
  std::vector<Vec> points;        // explicit points (alternative to lattice)
  std::vector<Vec> extra_points;  // appended verbatim, never filtered
};

struct PlotSpec {
  Vec lo;
  Vec hi;
  std::vector<int> counts;
};

// Per-field overrides on top of the solver-class defaults.
struct ToleranceOverrides {
  std::optional<double> limit_tol;
  std::optional<double> sub_tol;
  std::optional<double> convexity_tol;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::uint64_t seed = 1;
  NormSpec norm;
  SetSpec set;
  GridSpec grid;
  std::optional<Box> region;
  int pair_samples = 400;
  ToleranceOverrides tolerances;  // applied over the solver-class defaults
  std::optional<PlotSpec> plot;
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

// Materializes the grid (lattice generation + off-set filtering), sampling
// region and tolerances.  Overrides replace the config seed / limit_tol.
Scenario build_scenario(const ScenarioConfig& cfg,
                        std::optional<std::uint64_t> seed_override = {},
                        std::optional<double> tol_override = {});

struct AnalysisArtifacts {
  ScenarioReport report;
  SlopeScanReport slope_scan;
  std::vector<ImplicationChecks> implications;  // one per grid point
};

AnalysisArtifacts run_analysis(const Scenario& sc);

nlohmann::json build_report_json(const ScenarioConfig& cfg, const Scenario& sc,
                                 const AnalysisArtifacts& art);
std::string points_csv(const Scenario& sc, const AnalysisArtifacts& art);

// CLI entry points; return process exit codes:
//   0 consistent / applicable-report written, 1 hypothesis failure or
//   non-Čebyšev finding, 2 violation, 3 input error.
int cmd_analyze(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::optional<double> tol);
int cmd_norm_info(const NormSpec& spec, const std::optional<Vec>& point);
int cmd_chebyshev_scan(const std::string& config_path, const std::string& out_dir,
                       std::optional<std::uint64_t> seed, std::optional<double> tol);
int cmd_plot_data(const std::string& config_path, const std::string& out_dir,
                  std::optional<std::uint64_t> seed, std::optional<double> tol);

}  // namespace chebylab
