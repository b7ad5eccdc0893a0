#include "spinwire/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace spinwire {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& field, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "not a number: '" + value + "'");
  }
}

long parse_long(const std::string& field, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "not an integer: '" + value + "'");
  }
}

bool parse_bool(const std::string& field, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(field, "expected true/false");
}

std::vector<double> parse_double_list(const std::string& field, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(field, item));
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

bool is_half_integer(double s) {
  return std::abs(2.0 * s - std::round(2.0 * s)) < 1e-9;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_double_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  static const std::vector<std::string> models{"heisenberg", "xxz", "xy", "xyz",
                                               "static"};
  if (std::find(models.begin(), models.end(), model) == models.end()) {
    throw ConfigError("model.type", "unknown model '" + model + "'");
  }
  if (is_static()) {
    if (j_over_v.size() != 1 || !(j_over_v[0] > 0)) {
      throw ConfigError("model.j_over_v", "static benchmark needs one positive rate");
    }
    return;
  }
  if (scatterers < 1) throw ConfigError("model.scatterers", "need at least one scatterer");
  if (spins.size() != 1 && static_cast<int>(spins.size()) != scatterers) {
    throw ConfigError("model.spin", "one value or one per scatterer");
  }
  for (double s : spins) {
    if (!(s >= 0.5) || !is_half_integer(s)) {
      throw ConfigError("model.spin", "spins must be half-integers >= 1/2");
    }
  }
  if (model == "heisenberg") {
    if (j_over_v.size() != 1 && static_cast<int>(j_over_v.size()) != scatterers) {
      throw ConfigError("model.j_over_v", "one value or one per scatterer");
    }
  } else {
    if (jx_over_v == 0.0 && jy_over_v == 0.0 && jz_over_v == 0.0) {
      throw ConfigError("model.jx_over_v", "anisotropic model needs couplings");
    }
    if (model == "xxz" && jy_over_v != 0.0 && jy_over_v != jx_over_v) {
      throw ConfigError("model.jy_over_v", "xxz requires jx = jy");
    }
    if (model == "xy" && jz_over_v != 0.0) {
      throw ConfigError("model.jz_over_v", "xy requires jz = 0");
    }
  }
  if (scatterers >= 2 && !(k0d > 0)) {
    throw ConfigError("geometry.k0d", "scatterer spacing must be positive");
  }
  if (!(dk_over_k0 > 0)) throw ConfigError("packet.dk_over_k0", "must be positive");
  if (!(x0_over_dx > 0)) throw ConfigError("packet.x0_over_dx", "must be positive");
  if (x0_over_dx < 3.0 && !allow_small_x0) {
    throw ConfigError("packet.x0_over_dx",
                      "below 3 (set packet.allow_small_x0 = true to override)");
  }
  if (!initial_levels.empty() &&
      static_cast<int>(initial_levels.size()) != scatterers + 1) {
    throw ConfigError("initial.levels", "one level per slot (electron first)");
  }
  if (time_samples < 20) throw ConfigError("time.samples", "need at least 20 samples");
  if (time_max < 0) throw ConfigError("time.max", "must be >= 0");
  if (quadrature_nodes < 15) throw ConfigError("quadrature.nodes", "too few nodes");
  if (!(quadrature_window_dks > 0)) {
    throw ConfigError("quadrature.window_dks", "must be positive");
  }
  if (quadrature_window_dks * dk_over_k0 >= 1.0) {
    throw ConfigError("quadrature.window_dks", "k-window reaches k <= 0");
  }
  if (mode != "quasi" && mode != "exact") {
    throw ConfigError("mode", "expected quasi or exact");
  }
  if (engine != "spectral" && engine != "lattice" && engine != "both") {
    throw ConfigError("engine", "expected spectral, lattice or both");
  }
  if (mesh_ppw < 4) throw ConfigError("mesh.points_per_wavelength", "too coarse");
  if (!(mesh_margin_dx >= 4)) throw ConfigError("mesh.margin_dx", "margin too small");
  if (!(support_margin_dx >= 6)) {
    throw ConfigError("mesh.support_margin_dx", "margin below 6 risks clipping");
  }
  if (lattice_ppw < 40) {
    throw ConfigError("lattice.points_per_wavelength", "below the 40-point floor");
  }
  if (!(lattice_dt_factor > 0) || lattice_dt_factor > 0.05 + 1e-12) {
    throw ConfigError("lattice.dt_factor", "must lie in (0, 0.05]");
  }
}

SpinSpace ScenarioConfig::space() const {
  std::vector<double> s(scatterers, spins.front());
  if (spins.size() > 1) s = spins;
  return SpinSpace(s);
}

CouplingSpec ScenarioConfig::coupling() const {
  std::vector<double> pos(scatterers);
  for (int i = 0; i < scatterers; ++i) pos[i] = i * k0d;  // k0 = 1
  if (model == "heisenberg") {
    std::vector<double> j(scatterers, j_over_v.front());
    if (j_over_v.size() > 1) j = j_over_v;
    return CouplingSpec::heisenberg(j, pos);
  }
  double jx = jx_over_v, jy = jy_over_v, jz = jz_over_v;
  if (model == "xxz") jy = jx;
  if (model == "xy") jz = 0.0;
  std::vector<std::array<double, 3>> triples(scatterers, {jx, jy, jz});
  return CouplingSpec::xyz(triples, pos);
}

GaussianPacket ScenarioConfig::packet() const {
  return GaussianPacket::from_ratios(dk_over_k0, x0_over_dx, 1.0);
}

InitialState ScenarioConfig::initial() const {
  const SpinSpace sp = space();
  std::vector<int> levels = initial_levels;
  if (levels.empty()) {
    levels.assign(sp.slots(), 0);
    for (int s = 1; s < sp.slots(); ++s) levels[s] = sp.local_dim(s) - 1;
  }
  return InitialState{packet(), sp.index_of(levels)};
}

double ScenarioConfig::horizon() const {
  if (time_max > 0) return time_max;
  if (is_static()) return 4.0 * std::numbers::pi / j_over_v.front();
  const GaussianPacket p = packet();
  const double d = (scatterers - 1) * k0d;
  return 3.0 * (p.x0 + d) / p.group_velocity() + 3.0 / (p.group_velocity() * p.dk());
}

std::vector<double> ScenarioConfig::times() const {
  const double tmax = horizon();
  std::vector<double> t(time_samples);
  for (int i = 0; i < time_samples; ++i) t[i] = tmax * i / (time_samples - 1);
  return t;
}

QuadratureSpec ScenarioConfig::quadrature() const {
  return QuadratureSpec{quadrature_nodes, quadrature_window_dks};
}

ProjectionMode ScenarioConfig::projection_mode() const {
  return mode == "exact" ? ProjectionMode::exact : ProjectionMode::quasi_monochromatic;
}

std::vector<int> ScenarioConfig::keep_slots() const {
  if (scatterers == 1) return {0, 1};
  std::vector<int> keep;
  for (int s = 1; s <= scatterers; ++s) keep.push_back(s);
  return keep;
}

std::vector<int> ScenarioConfig::negativity_part() const { return {0}; }

std::string ScenarioConfig::canonical() const {
  std::ostringstream out;
  write_config(out, *this);
  return out.str();
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig c;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  for (const auto& [key, value] : kv) {
    if (key == "name") c.name = value;
    else if (key == "model.type") c.model = value;
    else if (key == "model.scatterers") c.scatterers = static_cast<int>(parse_long(key, value));
    else if (key == "model.spin") c.spins = parse_double_list(key, value);
    else if (key == "model.j_over_v") c.j_over_v = parse_double_list(key, value);
    else if (key == "model.jx_over_v") c.jx_over_v = parse_double(key, value);
    else if (key == "model.jy_over_v") c.jy_over_v = parse_double(key, value);
    else if (key == "model.jz_over_v") c.jz_over_v = parse_double(key, value);
    else if (key == "geometry.k0d") c.k0d = parse_double(key, value);
    else if (key == "packet.dk_over_k0") c.dk_over_k0 = parse_double(key, value);
    else if (key == "packet.x0_over_dx") c.x0_over_dx = parse_double(key, value);
    else if (key == "packet.allow_small_x0") c.allow_small_x0 = parse_bool(key, value);
    else if (key == "initial.levels") {
      c.initial_levels.clear();
      for (const auto& item : split_list(value)) {
        c.initial_levels.push_back(static_cast<int>(parse_long(key, item)));
      }
    } else if (key == "time.samples") c.time_samples = static_cast<int>(parse_long(key, value));
    else if (key == "time.max") c.time_max = parse_double(key, value);
    else if (key == "quadrature.nodes") c.quadrature_nodes = static_cast<int>(parse_long(key, value));
    else if (key == "quadrature.window_dks") c.quadrature_window_dks = parse_double(key, value);
    else if (key == "mode") c.mode = value;
    else if (key == "engine") c.engine = value;
    else if (key == "mesh.points_per_wavelength") c.mesh_ppw = static_cast<int>(parse_long(key, value));
    else if (key == "mesh.margin_dx") c.mesh_margin_dx = parse_double(key, value);
    else if (key == "mesh.support_margin_dx") c.support_margin_dx = parse_double(key, value);
    else if (key == "lattice.points_per_wavelength") c.lattice_ppw = static_cast<int>(parse_long(key, value));
    else if (key == "lattice.dt_factor") c.lattice_dt_factor = parse_double(key, value);
    else if (key == "lattice.max_steps") c.lattice_max_steps = parse_long(key, value);
    else if (key == "output.density_x_samples") c.density_x_samples = static_cast<int>(parse_long(key, value));
    else if (key == "output.density_t_samples") c.density_t_samples = static_cast<int>(parse_long(key, value));
    else throw ConfigError(key, "unknown key");
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ScenarioConfig& c) {
  out << "name = " << c.name << "\n";
  out << "model.type = " << c.model << "\n";
  out << "model.scatterers = " << c.scatterers << "\n";
  out << "model.spin = " << format_double_list(c.spins) << "\n";
  out << "model.j_over_v = " << format_double_list(c.j_over_v) << "\n";
  out << "model.jx_over_v = " << format_double(c.jx_over_v) << "\n";
  out << "model.jy_over_v = " << format_double(c.jy_over_v) << "\n";
  out << "model.jz_over_v = " << format_double(c.jz_over_v) << "\n";
  out << "geometry.k0d = " << format_double(c.k0d) << "\n";
  out << "packet.dk_over_k0 = " << format_double(c.dk_over_k0) << "\n";
  out << "packet.x0_over_dx = " << format_double(c.x0_over_dx) << "\n";
  out << "packet.allow_small_x0 = " << (c.allow_small_x0 ? "true" : "false") << "\n";
  if (!c.initial_levels.empty()) {
    out << "initial.levels = ";
    for (size_t i = 0; i < c.initial_levels.size(); ++i) {
      out << (i ? "," : "") << c.initial_levels[i];
    }
    out << "\n";
  }
  out << "time.samples = " << c.time_samples << "\n";
  out << "time.max = " << format_double(c.time_max) << "\n";
  out << "quadrature.nodes = " << c.quadrature_nodes << "\n";
  out << "quadrature.window_dks = " << format_double(c.quadrature_window_dks) << "\n";
  out << "mode = " << c.mode << "\n";
  out << "engine = " << c.engine << "\n";
  out << "mesh.points_per_wavelength = " << c.mesh_ppw << "\n";
  out << "mesh.margin_dx = " << format_double(c.mesh_margin_dx) << "\n";
  out << "mesh.support_margin_dx = " << format_double(c.support_margin_dx) << "\n";
  out << "lattice.points_per_wavelength = " << c.lattice_ppw << "\n";
  out << "lattice.dt_factor = " << format_double(c.lattice_dt_factor) << "\n";
  out << "lattice.max_steps = " << c.lattice_max_steps << "\n";
  out << "output.density_x_samples = " << c.density_x_samples << "\n";
  out << "output.density_t_samples = " << c.density_t_samples << "\n";
}

namespace {

ScenarioConfig scattering_base(const std::string& name, int n, double dk, double j) {
  ScenarioConfig c;
  c.name = name;
  c.scatterers = n;
  c.dk_over_k0 = dk;
  c.j_over_v = {j};
  return c;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;

  {
    Preset p;
    p.name = "static";
    p.description = "two static exchange-coupled qubits: E_N = log2(1 + |sin(J tau)|)";
    ScenarioConfig c;
    c.name = "static";
    c.model = "static";
    c.j_over_v = {1.0};
    c.time_samples = 200;
    p.variants.push_back({"static", c});
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "fig1a";
    p.description = "single scatterer, J/v = 1: rise time vs packet width";
    for (double dk : {1e-2, 1e-3, 1e-4}) {
      auto c = scattering_base("fig1a_dk" + format_double(dk), 1, dk, 1.0);
      p.variants.push_back({"dk" + format_double(dk), c});
    }
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "fig1b";
    p.description = "single scatterer, dk/k0 = 1e-2: steady value vs coupling";
    for (double j : {1.0, 3.0, 10.0}) {
      auto c = scattering_base("fig1b_j" + format_double(j), 1, 1e-2, j);
      p.variants.push_back({"j" + format_double(j), c});
    }
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "fig2a";
    p.description = "two scatterers, k0 d = pi, J/v = 1: rise time vs packet width";
    for (double dk : {1e-2, 1e-3, 1e-4}) {
      auto c = scattering_base("fig2a_dk" + format_double(dk), 2, dk, 1.0);
      p.variants.push_back({"dk" + format_double(dk), c});
    }
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "fig2b";
    p.description = "two scatterers, dk/k0 = 1e-2: steady value vs coupling";
    for (double j : {0.5, 1.0, 3.0}) {
      auto c = scattering_base("fig2b_j" + format_double(j), 2, 1e-2, j);
      p.variants.push_back({"j" + format_double(j), c});
    }
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "fig3a";
    p.description = "two scatterers: couplings and spin numbers";
    {
      auto c = scattering_base("fig3a_equal", 2, 1e-2, 1.0);
      p.variants.push_back({"equal_couplings", c});
    }
    {
      auto c = scattering_base("fig3a_unequal", 2, 1e-2, 1.0);
      c.j_over_v = {2.6, 1.3};
      p.variants.push_back({"unequal_couplings", c});
    }
    {
      auto c = scattering_base("fig3a_spin1", 2, 1e-2, 1.0);
      c.spins = {1.0};
      p.variants.push_back({"spin1", c});
    }
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "fig3b";
    p.description = "two scatterers: anisotropic coupling models";
    {
      auto c = scattering_base("fig3b_xxz", 2, 1e-2, 1.0);
      c.model = "xxz";
      c.jx_over_v = 1.0;
      c.jy_over_v = 1.0;
      c.jz_over_v = 2.0;
      p.variants.push_back({"xxz", c});
    }
    {
      auto c = scattering_base("fig3b_xy_iso", 2, 1e-2, 1.0);
      c.model = "xy";
      c.jx_over_v = 1.0;
      c.jy_over_v = 1.0;
      p.variants.push_back({"xy_iso", c});
    }
    {
      auto c = scattering_base("fig3b_xy_aniso", 2, 1e-2, 1.0);
      c.model = "xy";
      c.jx_over_v = 3.0;
      c.jy_over_v = 6.0;
      p.variants.push_back({"xy_aniso", c});
    }
    out.push_back(p);
  }
  for (auto& p : out) {
    for (auto& v : p.variants) v.config.validate();
  }
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace spinwire
