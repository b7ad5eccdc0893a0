#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spinwire/lattice.hpp"
#include "spinwire/observables.hpp"
#include "spinwire/scenario.hpp"

namespace spinwire {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

/// Decimated density samples for CSV output: (tau, x, f_e) triples.
struct DensityTable {
  std::vector<double> taus;
  std::vector<double> xs;
  std::vector<std::vector<double>> values;  // [tau][x]
};

struct ScenarioResult {
  ScenarioConfig config;
  EntanglementCurve curve;          // spectral (or closed-form for static)
  EntanglementCurve lattice_curve;  // engine lattice/both
  bool has_spectral = false;
  bool has_lattice = false;
  std::vector<double> fe0, p_region;            // per sample time
  std::vector<double> fe0_free, p_region_free;  // free-propagation references
  DensityTable density;
  double max_unitarity_defect = 0.0;
  double max_condition = 0.0;
  double norm_drift = 0.0;
  double lattice_norm_drift = 0.0;
  double lattice_boundary_density = 0.0;
  std::vector<std::string> warnings;
  std::vector<CheckResult> checks;

  const EntanglementCurve& primary_curve() const {
    return has_spectral ? curve : lattice_curve;
  }
  bool all_pass() const;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

/// Writes entanglement.csv, density.csv and report.txt (plus
/// lattice_entanglement.csv and free_reference.csv when available) under dir.
void write_scenario_outputs(const ScenarioResult& result,
                            const std::filesystem::path& dir);

struct PresetResult {
  std::string name;
  std::vector<std::string> labels;
  std::vector<ScenarioResult> runs;
  std::vector<CheckResult> checks;
};

PresetResult run_preset(const Preset& preset);
void write_preset_outputs(const PresetResult& result, const std::filesystem::path& dir);

struct SweepResult {
  std::string axis;
  std::vector<std::string> labels;
  std::vector<ScenarioResult> runs;
  std::vector<CheckResult> checks;
};

/// axis is one of dk_over_k0, j_over_v, k0d, spin, model; values are config
/// literals for that axis (model values like "xy:3,6,0").
SweepResult sweep(const ScenarioConfig& base, const std::string& axis,
                  const std::vector<std::string>& values);
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

/// Interval where the sampled curve exceeds frac * max, linearly interpolated.
std::pair<double, double> threshold_window(const std::vector<double>& times,
                                           const std::vector<double>& values,
                                           double frac);

/// Intersection-over-union of two intervals.
double interval_iou(std::pair<double, double> a, std::pair<double, double> b);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Pairwise sup-distance of curves rescaled to their steady values.
double collapse_distance(const std::vector<const EntanglementCurve*>& curves);

}  // namespace spinwire
