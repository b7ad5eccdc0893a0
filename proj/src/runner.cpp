#include "spinwire/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace spinwire {

namespace {

std::string model_label(const ScenarioConfig& c) {
  if (c.model == "heisenberg" || c.model == "static") return c.model;
  std::ostringstream out;
  out << c.model << "(jx=" << c.jx_over_v << ",jy=" << c.jy_over_v
      << ",jz=" << c.jz_over_v << ")";
  return out.str();
}

CurveMeta make_meta(const ScenarioConfig& c) {
  CurveMeta meta;
  meta.model = model_label(c);
  meta.dk_over_k0 = c.is_static() ? 0.0 : c.dk_over_k0;
  meta.k0d = c.scatterers >= 2 ? c.k0d : 0.0;
  std::ostringstream sp, j;
  if (!c.is_static()) {
    for (int i = 0; i < c.scatterers; ++i) {
      sp << (i ? "," : "")
         << (c.spins.size() > 1 ? c.spins[i] : c.spins.front());
    }
  }
  for (size_t i = 0; i < c.j_over_v.size(); ++i) j << (i ? "," : "") << c.j_over_v[i];
  meta.spins = sp.str();
  meta.couplings = j.str();
  return meta;
}

void add_check(std::vector<CheckResult>& checks, const std::string& name, double value,
               double tol, bool pass, const std::string& detail = "") {
  checks.push_back(CheckResult{name, value, tol, pass, detail});
}

ScenarioResult run_static(const ScenarioConfig& config) {
  ScenarioResult result;
  result.config = config;
  const double j = config.j_over_v.front();
  result.curve.times = config.times();
  result.curve.meta = make_meta(config);
  double max_dev = 0.0;
  for (double tau : result.curve.times) {
    result.curve.values.push_back(static_benchmark(j, tau));
    // cross-check the closed form against the explicitly evolved state
    DensityMatrix rho;
    const Eigen::Vector4cd chi = static_benchmark_state(j, tau);
    rho.rho = chi * chi.adjoint();
    rho.slots = {0, 1};
    rho.dims = {2, 2};
    const double en = logarithmic_negativity(rho, {0});
    max_dev = std::max(max_dev, std::abs(en - result.curve.values.back()));
  }
  result.has_spectral = true;
  add_check(result.checks, "static_closed_form_vs_negativity", max_dev, 1e-10,
            max_dev < 1e-10);
  return result;
}

void run_spectral_engine(const ScenarioConfig& config, ScenarioResult& result) {
  const SpinSpace space = config.space();
  const CouplingSpec coupling = config.coupling();
  const InitialState init = config.initial();
  const std::vector<double> times = config.times();
  const double tau_max = times.back();

  if (auto warning = init.separation_warning()) result.warnings.push_back(*warning);

  SpectralEvolver evolver(init, coupling, space, config.quadrature(),
                          config.projection_mode(), config.support_margin_dx);
  const UniformGrid grid = default_mesh(init, coupling, tau_max, config.mesh_ppw,
                                        config.mesh_margin_dx);

  const std::vector<int> keep = config.keep_slots();
  const std::vector<int> part = config.negativity_part();
  const double d = (config.scatterers - 1) * config.k0d;

  result.curve.times = times;
  result.curve.meta = make_meta(config);

  // density decimation layout (anchored so that x = 0 is on the sample set)
  const int zero_idx = grid.index_near(0.0);
  const int stride = std::max(1, grid.n / std::max(1, config.density_x_samples));
  std::vector<int> xs_idx;
  for (int i = zero_idx % stride; i < grid.n; i += stride) xs_idx.push_back(i);
  for (int i : xs_idx) result.density.xs.push_back(grid.x(i));
  const int t_stride =
      std::max(1, static_cast<int>(times.size()) / std::max(1, config.density_t_samples));

  for (size_t s = 0; s < times.size(); ++s) {
    const double tau = times[s];
    const SpinorSlice slice = evolver.slice(tau, grid);
    result.norm_drift = std::max(result.norm_drift, std::abs(slice.norm() - 1.0));

    const DensityMatrix rho = reduced_spin_state(slice, space, keep);
    result.curve.values.push_back(logarithmic_negativity(rho, part));

    result.fe0.push_back(slice.density_at(0.0));
    result.fe0_free.push_back(std::norm(init.packet.free_propagate(0.0, tau)));
    if (config.scatterers >= 2) {
      result.p_region.push_back(region_probability(slice, d));
      result.p_region_free.push_back(init.packet.free_mass_right_of(0.0, tau) -
                                     init.packet.free_mass_right_of(d, tau));
    }

    if (s % t_stride == 0) {
      result.density.taus.push_back(tau);
      std::vector<double> row;
      row.reserve(xs_idx.size());
      for (int i : xs_idx) row.push_back(slice.values.row(i).squaredNorm());
      result.density.values.push_back(std::move(row));
    }
  }

  result.has_spectral = true;
  result.max_unitarity_defect = evolver.max_unitarity_defect();
  result.max_condition = evolver.max_condition();
}

void run_lattice_engine(const ScenarioConfig& config, ScenarioResult& result) {
  const SpinSpace space = config.space();
  const CouplingSpec coupling = config.coupling();
  const InitialState init = config.initial();
  const std::vector<double> times = config.times();

  const LatticeConfig cfg = default_lattice_config(
      init, coupling, times.back(), config.lattice_ppw, config.lattice_dt_factor,
      config.mesh_margin_dx);
  const double est_steps = times.back() / cfg.dt;
  if (est_steps > static_cast<double>(config.lattice_max_steps)) {
    throw ConfigError("lattice.max_steps",
                      "run would need about " + std::to_string(est_steps) +
                          " steps; raise the budget or shrink the scenario");
  }

  const LatticeRunResult run = lattice_entanglement_curve(
      init, coupling, space, cfg, times, config.keep_slots(), config.negativity_part());
  result.lattice_curve = run.curve;
  result.lattice_curve.meta = make_meta(config);
  result.has_lattice = true;
  result.lattice_norm_drift = run.norm_drift;
  result.lattice_boundary_density = run.boundary_density;
}

}  // namespace

bool ScenarioResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  if (config.is_static()) return run_static(config);

  ScenarioResult result;
  result.config = config;
  if (config.engine == "spectral" || config.engine == "both") {
    run_spectral_engine(config, result);
  }
  if (config.engine == "lattice" || config.engine == "both") {
    run_lattice_engine(config, result);
  }

  // per-run invariants
  if (result.has_spectral) {
    add_check(result.checks, "flux_conservation_defect", result.max_unitarity_defect,
              1e-10, result.max_unitarity_defect < 1e-10);
    add_check(result.checks, "norm_drift", result.norm_drift, 1e-3,
              result.norm_drift <= 1e-3);
  }
  if (result.has_lattice) {
    add_check(result.checks, "lattice_norm_drift", result.lattice_norm_drift, 1e-8,
              result.lattice_norm_drift < 1e-8);
    add_check(result.checks, "lattice_boundary_density",
              result.lattice_boundary_density, 1e-8,
              result.lattice_boundary_density < 1e-8);
  }

  const EntanglementCurve& curve = result.primary_curve();
  const double min_inc = min_consecutive_increment(curve);
  add_check(result.checks, "monotonic_rise_min_increment", min_inc, -1e-3,
            min_inc >= -1e-3);
  try {
    const RiseTime rt = rise_time(curve);
    add_check(result.checks, "saturation", rt.steady, 0.0, true,
              "steady = " + std::to_string(rt.steady) +
                  ", delta_tau = " + std::to_string(rt.delta_tau));
  } catch (const std::exception& e) {
    add_check(result.checks, "saturation", 0.0, 0.0, false, e.what());
  }
  if (result.has_spectral && result.has_lattice) {
    const double dist = sup_distance(result.curve, result.lattice_curve);
    add_check(result.checks, "engine_agreement_sup_distance", dist, 0.02, dist < 0.02);
  }
  return result;
}

namespace {

void write_report(const ScenarioResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  const auto now = std::chrono::system_clock::now();
  out << "# generated_at: "
      << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
      << "\n";
  out << "scenario: " << result.config.name << "\n\n";
  out << "[config]\n";
  write_config(out, result.config);
  out << "\n[warnings]\n";
  for (const auto& w : result.warnings) out << w << "\n";
  out << "\n[stats]\n";
  if (result.has_spectral) {
    out << "max_unitarity_defect = " << result.max_unitarity_defect << "\n";
    out << "max_condition_estimate = " << result.max_condition << "\n";
    out << "norm_drift = " << result.norm_drift << "\n";
  }
  if (result.has_lattice) {
    out << "lattice_norm_drift = " << result.lattice_norm_drift << "\n";
    out << "lattice_boundary_density = " << result.lattice_boundary_density << "\n";
  }
  try {
    const RiseTime rt = rise_time(result.primary_curve());
    out << "steady_value = " << rt.steady << "\n";
    out << "t10 = " << rt.t10 << "\nt90 = " << rt.t90 << "\n";
    out << "delta_tau = " << rt.delta_tau << "\n";
  } catch (const std::exception& e) {
    out << "rise_time_error = " << e.what() << "\n";
  }
  out << "\n[checks]\n";
  for (const auto& c : result.checks) {
    out << (c.pass ? "PASS" : "FAIL") << " " << c.name << " value=" << c.value
        << " tolerance=" << c.tolerance;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
  }
}

}  // namespace

void write_scenario_outputs(const ScenarioResult& result,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "entanglement.csv");
    write_curve_csv(out, result.has_spectral ? result.curve : result.lattice_curve);
  }
  if (result.has_spectral && result.has_lattice) {
    std::ofstream out(dir / "lattice_entanglement.csv");
    write_curve_csv(out, result.lattice_curve);
  }
  {
    std::ofstream out(dir / "density.csv");
    out << "tau,x,f_e\n";
    char line[96];
    for (size_t t = 0; t < result.density.taus.size(); ++t) {
      for (size_t i = 0; i < result.density.xs.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", result.density.taus[t],
                      result.density.xs[i], result.density.values[t][i]);
        out << line;
      }
    }
  }
  if (!result.fe0.empty()) {
    std::ofstream out(dir / "free_reference.csv");
    out << "tau,f_e0,f_e0_free,p_region,p_region_free\n";
    char line[160];
    for (size_t i = 0; i < result.curve.times.size(); ++i) {
      const double pr = result.p_region.empty() ? 0.0 : result.p_region[i];
      const double prf = result.p_region_free.empty() ? 0.0 : result.p_region_free[i];
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    result.curve.times[i], result.fe0[i], result.fe0_free[i], pr, prf);
      out << line;
    }
  }
  {
    std::ofstream out(dir / "plot.gp");
    out << "# gnuplot script for the scenario outputs\n"
        << "set datafile separator ','\n"
        << "set key left top\n"
        << "set xlabel 'tau (units of 1/(v k0))'\n"
        << "set terminal push\n"
        << "set terminal dumb size 120,30\n"
        << "set ylabel 'E_N'\n"
        << "plot 'entanglement.csv' every ::1 using 1:2 with lines title 'E_N(tau)'"
        << (result.has_spectral && result.has_lattice
                ? ", 'lattice_entanglement.csv' every ::1 using 1:2 with lines title 'lattice'\n"
                : "\n")
        << "set terminal pop\n";
  }
  write_report(result, dir / "report.txt");
}

PresetResult run_preset(const Preset& preset) {
  PresetResult out;
  out.name = preset.name;
  for (const auto& variant : preset.variants) {
    out.labels.push_back(variant.label);
    out.runs.push_back(run_scenario(variant.config));
    for (const auto& c : out.runs.back().checks) {
      out.checks.push_back(c);
      out.checks.back().name = variant.label + "." + c.name;
    }
  }

  // preset-level comparisons
  const auto curves = [&]() {
    std::vector<const EntanglementCurve*> cs;
    for (const auto& r : out.runs) cs.push_back(&r.primary_curve());
    return cs;
  }();

  if (preset.name == "fig1a" || preset.name == "fig2a") {
    std::vector<double> dks, dtaus, steadies;
    for (size_t i = 0; i < out.runs.size(); ++i) {
      const RiseTime rt = rise_time(*curves[i]);
      dks.push_back(out.runs[i].config.dk_over_k0);
      dtaus.push_back(rt.delta_tau);
      steadies.push_back(rt.steady);
    }
    const double slope = loglog_slope(dks, dtaus);
    add_check(out.checks, "rise_time_loglog_slope", slope, 0.1,
              std::abs(slope + 1.0) <= 0.1, "target -1");
    double spread = 0.0;
    for (double s : steadies) {
      spread = std::max(spread, std::abs(s - steadies.front()) / steadies.front());
    }
    add_check(out.checks, "steady_value_dk_insensitivity", spread, 0.01, spread < 0.01);
  }
  if (preset.name == "fig1b" || preset.name == "fig2b" || preset.name == "fig3a" ||
      preset.name == "fig3b") {
    const double tol = (preset.name == "fig1b" || preset.name == "fig2b") ? 0.02 : 0.03;
    const double dist = collapse_distance(curves);
    add_check(out.checks, "rescaled_collapse_sup_distance", dist, tol, dist < tol);
  }
  return out;
}

void write_preset_outputs(const PresetResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < result.runs.size(); ++i) {
    write_scenario_outputs(result.runs[i], dir / result.labels[i]);
  }
  std::ofstream out(dir / "report.txt");
  const auto now = std::chrono::system_clock::now();
  out << "# generated_at: "
      << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
      << "\n";
  out << "preset: " << result.name << "\n\n[checks]\n";
  for (const auto& c : result.checks) {
    out << (c.pass ? "PASS" : "FAIL") << " " << c.name << " value=" << c.value
        << " tolerance=" << c.tolerance;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
  }
}

SweepResult sweep(const ScenarioConfig& base, const std::string& axis,
                  const std::vector<std::string>& values) {
  SweepResult out;
  out.axis = axis;
  for (const auto& value : values) {
    ScenarioConfig c = base;
    if (axis == "dk_over_k0") {
      c.dk_over_k0 = std::stod(value);
    } else if (axis == "j_over_v") {
      c.j_over_v = {std::stod(value)};
    } else if (axis == "k0d") {
      c.k0d = std::stod(value);
    } else if (axis == "spin") {
      c.spins = {std::stod(value)};
    } else if (axis == "model") {
      // literal like "heisenberg" or "xyz:1,2,0"
      const auto colon = value.find(':');
      c.model = value.substr(0, colon == std::string::npos ? value.size() : colon);
      if (colon != std::string::npos) {
        std::stringstream ss(value.substr(colon + 1));
        std::string item;
        std::vector<double> js;
        while (std::getline(ss, item, ',')) js.push_back(std::stod(item));
        if (js.size() != 3) throw ConfigError("sweep.model", "expected jx,jy,jz");
        c.jx_over_v = js[0];
        c.jy_over_v = js[1];
        c.jz_over_v = js[2];
      }
    } else {
      throw ConfigError("sweep.axis", "unknown axis '" + axis + "'");
    }
    c.name = base.name + "_" + axis + "_" + value;
    c.validate();
    out.labels.push_back(value);
    out.runs.push_back(run_scenario(c));
  }

  if (axis == "dk_over_k0" && out.runs.size() >= 2) {
    std::vector<double> dks, dtaus;
    for (const auto& r : out.runs) {
      dks.push_back(r.config.dk_over_k0);
      dtaus.push_back(rise_time(r.primary_curve()).delta_tau);
    }
    const double slope = loglog_slope(dks, dtaus);
    out.checks.push_back(CheckResult{"rise_time_loglog_slope", slope, 0.1,
                                     std::abs(slope + 1.0) <= 0.1, "target -1"});
  } else if (out.runs.size() >= 2) {
    std::vector<const EntanglementCurve*> cs;
    for (const auto& r : out.runs) cs.push_back(&r.primary_curve());
    const double dist = collapse_distance(cs);
    out.checks.push_back(CheckResult{"rescaled_collapse_sup_distance", dist, 0.03,
                                     dist < 0.03, ""});
  }
  return out;
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < result.runs.size(); ++i) {
    write_scenario_outputs(result.runs[i], dir / (result.axis + "_" + result.labels[i]));
  }
  std::ofstream out(dir / "report.txt");
  const auto now = std::chrono::system_clock::now();
  out << "# generated_at: "
      << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
      << "\n";
  out << "sweep_axis: " << result.axis << "\n\n[checks]\n";
  for (const auto& c : result.checks) {
    out << (c.pass ? "PASS" : "FAIL") << " " << c.name << " value=" << c.value
        << " tolerance=" << c.tolerance << "\n";
  }
}

std::pair<double, double> threshold_window(const std::vector<double>& times,
                                           const std::vector<double>& values,
                                           double frac) {
  if (times.size() != values.size() || times.size() < 2) {
    throw std::invalid_argument("bad curve");
  }
  const double level = frac * *std::max_element(values.begin(), values.end());
  double lo = times.back(), hi = times.front();
  for (size_t i = 1; i < times.size(); ++i) {
    const bool below = values[i - 1] < level, above = values[i] >= level;
    if (below && above) {
      const double f = (level - values[i - 1]) / (values[i] - values[i - 1]);
      lo = std::min(lo, times[i - 1] + f * (times[i] - times[i - 1]));
    }
    if (values[i - 1] >= level && values[i] < level) {
      const double f = (values[i - 1] - level) / (values[i - 1] - values[i]);
      hi = std::max(hi, times[i - 1] + f * (times[i] - times[i - 1]));
    }
  }
  if (values.front() >= level) lo = times.front();
  if (values.back() >= level) hi = times.back();
  if (!(hi > lo)) throw std::runtime_error("threshold window not found");
  return {lo, hi};
}

double interval_iou(std::pair<double, double> a, std::pair<double, double> b) {
  const double inter =
      std::max(0.0, std::min(a.second, b.second) - std::max(a.first, b.first));
  const double uni = std::max(a.second, b.second) - std::min(a.first, b.first);
  return uni > 0 ? inter / uni : 0.0;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("bad fit data");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double collapse_distance(const std::vector<const EntanglementCurve*>& curves) {
  double worst = 0.0;
  std::vector<EntanglementCurve> rescaled;
  for (const auto* c : curves) rescaled.push_back(rescale_to_steady(*c));
  for (size_t i = 0; i < rescaled.size(); ++i) {
    for (size_t j = i + 1; j < rescaled.size(); ++j) {
      worst = std::max(worst, sup_distance(rescaled[i], rescaled[j]));
    }
  }
  return worst;
}

}  // namespace spinwire
