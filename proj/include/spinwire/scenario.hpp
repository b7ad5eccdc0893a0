#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinwire/evolve.hpp"
#include "spinwire/spin_algebra.hpp"
#include "spinwire/wavepacket.hpp"

namespace spinwire {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field(field) {}
  std::string field;
};

/// One experiment: all physics inputs are dimensionless ratios; internally
/// k0 = v = 1 and hbar = m* = 1, so times are in units of 1/(v k0) and
/// lengths in 1/k0.
struct ScenarioConfig {
  std::string name = "scenario";

  // model
  std::string model = "heisenberg";  // heisenberg | xxz | xy | xyz | static
  int scatterers = 1;
  std::vector<double> spins{0.5};        // scalar broadcast over scatterers
  std::vector<double> j_over_v{1.0};     // heisenberg strengths (static: J rate)
  double jx_over_v = 0.0, jy_over_v = 0.0, jz_over_v = 0.0;
  double k0d = 3.141592653589793;

  // packet
  double dk_over_k0 = 1e-2;
  double x0_over_dx = 5.0;
  bool allow_small_x0 = false;
  std::vector<int> initial_levels;  // empty: electron up, scatterers lowest m

  // numerics
  int time_samples = 200;
  double time_max = 0.0;  // 0 -> automatic
  int quadrature_nodes = 257;
  double quadrature_window_dks = 6.0;
  std::string mode = "quasi";      // quasi | exact
  std::string engine = "spectral";  // spectral | lattice | both
  int mesh_ppw = 20;
  double mesh_margin_dx = 10.0;
  double support_margin_dx = 12.0;
  int lattice_ppw = 40;
  double lattice_dt_factor = 0.05;
  long lattice_max_steps = 4000000;
  int density_x_samples = 200;
  int density_t_samples = 40;

  void validate() const;

  bool is_static() const { return model == "static"; }
  SpinSpace space() const;
  CouplingSpec coupling() const;
  GaussianPacket packet() const;
  InitialState initial() const;
  std::vector<double> times() const;
  double horizon() const;  // resolved time_max
  QuadratureSpec quadrature() const;
  ProjectionMode projection_mode() const;
  std::vector<int> keep_slots() const;
  std::vector<int> negativity_part() const;

  /// Deterministic serialized form; doubles as a cache key.
  std::string canonical() const;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ScenarioConfig& config);

struct PresetVariant {
  std::string label;
  ScenarioConfig config;
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetVariant> variants;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

}  // namespace spinwire
