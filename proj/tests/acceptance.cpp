// Acceptance suite: end-to-end checks of the production claims, one test
// case per criterion, each printing a single PASS/FAIL line. Heavy scenario
// runs are cached and shared between criteria, so the cases are meant to run
// in file order within one process.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "spinwire/runner.hpp"

using namespace spinwire;
using Complex = std::complex<double>;

namespace {

ScenarioResult& cached_run(const ScenarioConfig& config) {
  static std::map<std::string, std::unique_ptr<ScenarioResult>> cache;
  const std::string key = config.canonical();
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::printf("[acceptance] running scenario '%s' ...\n", config.name.c_str());
    std::fflush(stdout);
    it = cache.emplace(key, std::make_unique<ScenarioResult>(run_scenario(config)))
             .first;
  }
  return *it->second;
}

const Preset& preset(const std::string& name) {
  const Preset* p = find_preset(name);
  REQUIRE(p != nullptr);
  return *p;
}

void announce(const char* id, bool pass, const std::string& detail) {
  std::printf("[ACCEPTANCE] %s: %s (%s)\n", id, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::vector<const EntanglementCurve*> preset_curves(const std::string& name) {
  std::vector<const EntanglementCurve*> out;
  for (const auto& variant : preset(name).variants) {
    out.push_back(&cached_run(variant.config).primary_curve());
  }
  return out;
}

}  // namespace

TEST_CASE("criterion 1: static two-spin closed form") {
  const double j = 1.0;
  double max_dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double tau = 4.0 * std::numbers::pi * i / 99.0;
    const double closed = static_benchmark(j, tau);
    DensityMatrix rho;
    const Eigen::Vector4cd chi = static_benchmark_state(j, tau);
    rho.rho = chi * chi.adjoint();
    rho.slots = {0, 1};
    rho.dims = {2, 2};
    max_dev = std::max(max_dev, std::abs(closed - logarithmic_negativity(rho, {0})));
  }
  // the oscillation peaks at exactly one ebit when J tau = pi/2
  const double at_peak = static_benchmark(j, 0.5 * std::numbers::pi);
  const bool pass = max_dev < 1e-10 && std::abs(at_peak - 1.0) < 1e-12;
  announce("C01 static-closed-form", pass,
           "max deviation " + fmt(max_dev) + ", peak " + fmt(at_peak));
  CHECK(max_dev < 1e-10);
  CHECK(at_peak == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("criterion 2: s-matrix unitarity under random draws") {
  std::mt19937 rng(987654321u);
  std::uniform_real_distribution<double> jdist(0.1, 10.0);
  std::uniform_real_distribution<double> kddist(0.05, 2.0 * std::numbers::pi - 0.05);
  std::uniform_real_distribution<double> kdist(0.4, 2.5);
  std::uniform_int_distribution<int> model_dist(0, 3);
  std::uniform_int_distribution<int> coin(0, 1);

  double worst = 0.0;
  for (int draw = 0; draw < 500; ++draw) {
    const int n = 1 + coin(rng);
    const double s = coin(rng) ? 1.0 : 0.5;
    const double k = kdist(rng);
    const int eta = coin(rng) ? +1 : -1;
    std::vector<double> pos{0.0};
    if (n == 2) pos.push_back(kddist(rng) / k);
    std::vector<std::array<double, 3>> triples;
    for (int j = 0; j < n; ++j) {
      const double jv = jdist(rng) * k;
      switch (model_dist(rng)) {
        case 0: triples.push_back({jv, jv, jv}); break;
        case 1: triples.push_back({jv, jv, 2.0 * jv}); break;
        case 2: triples.push_back({jv, jv, 0.0}); break;
        default: triples.push_back({jv, 2.0 * jv, 0.0}); break;
      }
    }
    const auto spec = CouplingSpec::xyz(triples, pos);
    const SpinSpace space(std::vector<double>(n, s));
    worst = std::max(worst, unitarity_defect(solve_channels(spec, space, k, eta)));
  }
  announce("C02 s-matrix-unitarity", worst < 1e-10,
           "worst defect " + fmt(worst) + " over 500 draws");
  CHECK(worst < 1e-10);
}

TEST_CASE("criterion 3: single-scatterer closed-form cross-check") {
  const SpinSpace space({0.5});
  Eigen::Matrix2cd basis;
  const double r = 1.0 / std::sqrt(2.0);
  basis << r, r, r, -r;

  double worst = 0.0;
  for (int a = 0; a < 20; ++a) {
    const double jv = 0.1 * std::pow(100.0, a / 19.0);  // [0.1, 10]
    for (int b = 0; b < 20; ++b) {
      const double k = 0.3 + 2.7 * b / 19.0;
      const auto spec = CouplingSpec::heisenberg({jv * k}, {0.0});
      const auto sol = solve_channels(spec, space, k, +1);
      const auto amp = closed_form_single_site(jv * k, k);
      for (auto [mat, plus, minus] :
           {std::tuple{&sol.r, amp.r_plus, amp.r_minus},
            std::tuple{&sol.t, amp.t_plus, amp.t_minus}}) {
        Eigen::Matrix2cd block;
        block << (*mat)(1, 1), (*mat)(1, 2), (*mat)(2, 1), (*mat)(2, 2);
        const Eigen::Matrix2cd rot = basis.adjoint() * block * basis;
        worst = std::max(worst, std::abs(rot(0, 0) - plus));
        worst = std::max(worst, std::abs(rot(1, 1) - minus));
        worst = std::max(worst, std::abs(rot(0, 1)));
        worst = std::max(worst, std::abs(rot(1, 0)));
      }
    }
  }
  announce("C03 closed-form-cross-check", worst < 1e-10,
           "worst deviation " + fmt(worst) + " on the 20x20 grid");
  CHECK(worst < 1e-10);
}

TEST_CASE("criterion 4: rise-time scaling with packet width") {
  std::map<double, double> dtau;
  std::vector<double> dks, dtaus;
  for (const auto& variant : preset("fig1a").variants) {
    const auto& run = cached_run(variant.config);
    const RiseTime rt = rise_time(run.curve);
    dtau[variant.config.dk_over_k0] = rt.delta_tau;
    dks.push_back(variant.config.dk_over_k0);
    dtaus.push_back(rt.delta_tau);
  }
  const double ratio = dtau.at(1e-3) / dtau.at(1e-2);
  const double slope = loglog_slope(dks, dtaus);
  const bool pass = std::abs(ratio - 10.0) <= 1.0 && std::abs(slope + 1.0) <= 0.1;
  announce("C04 rise-time-scaling", pass,
           "ratio " + fmt(ratio) + " (10 +- 1), slope " + fmt(slope) + " (-1 +- 0.1)");
  CHECK(std::abs(ratio - 10.0) <= 1.0);
  CHECK(std::abs(slope + 1.0) <= 0.1);
}

TEST_CASE("criterion 5: coupling-strength collapse of rescaled curves") {
  const auto curves = preset_curves("fig1b");
  const double dist = collapse_distance(curves);

  std::vector<double> steadies;
  for (const auto* c : curves) steadies.push_back(rise_time(*c).steady);
  double min_spread = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < steadies.size(); ++i) {
    for (size_t j = i + 1; j < steadies.size(); ++j) {
      min_spread = std::min(min_spread, std::abs(steadies[i] - steadies[j]) /
                                            std::max(steadies[i], steadies[j]));
    }
  }
  const bool pass = dist < 0.02 && min_spread > 0.05;
  announce("C05 coupling-collapse", pass,
           "rescaled sup-distance " + fmt(dist) + " (tol 0.02), steady spread " +
               fmt(min_spread) + " (> 0.05)");
  CHECK(dist < 0.02);
  CHECK(min_spread > 0.05);
}

TEST_CASE("criterion 6: monotonic rise and phase containment") {
  double worst_increment = std::numeric_limits<double>::infinity();
  std::string worst_name;
  for (const char* name : {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b"}) {
    for (const auto& variant : preset(name).variants) {
      const auto& run = cached_run(variant.config);
      const double inc = min_consecutive_increment(run.primary_curve());
      if (inc < worst_increment) {
        worst_increment = inc;
        worst_name = variant.config.name;
      }
    }
  }

  double dr_lo = std::numeric_limits<double>::infinity(), dr_hi = 0.0;
  bool contained = true;
  for (int i = 0; i <= 400; ++i) {
    const double jv = 0.1 + (20.0 - 0.1) * i / 400.0;
    const auto d = phase_differences(jv, 1.0);
    contained = contained && d.delta_r >= 0.0 &&
                d.delta_r <= 0.5 * std::numbers::pi + 1e-12 && d.delta_t >= 0.0 &&
                d.delta_t <= 0.5 * std::numbers::pi + 1e-12;
    dr_lo = std::min(dr_lo, d.delta_r);
    dr_hi = std::max(dr_hi, d.delta_r);
  }

  const bool pass = worst_increment >= -1e-3 && contained;
  announce("C06 monotonicity", pass,
           "min increment " + fmt(worst_increment) + " (" + worst_name +
               "), phase angles in [" + fmt(dr_lo) + ", " + fmt(dr_hi) + "]");
  CHECK(worst_increment >= -1e-3);
  CHECK(contained);
}

TEST_CASE("criterion 7: entanglement rise tracks the free transit window") {
  double worst_iou = 1.0;
  std::string detail;
  for (const auto& variant : preset("fig1a").variants) {
    if (variant.config.dk_over_k0 < 1e-3 - 1e-12) continue;  // 1e-2 and 1e-3
    const auto& run = cached_run(variant.config);
    const RiseTime rt = rise_time(run.curve);
    const auto window = threshold_window(run.curve.times, run.fe0_free, 0.1);
    const double iou = interval_iou(window, {rt.t10, rt.t90});
    worst_iou = std::min(worst_iou, iou);
    detail += variant.label + " iou=" + fmt(iou) + " ";
  }
  {
    const auto& variant = preset("fig2a").variants.front();  // dk = 1e-2
    const auto& run = cached_run(variant.config);
    const RiseTime rt = rise_time(run.curve);
    const auto window = threshold_window(run.curve.times, run.p_region_free, 0.1);
    const double iou = interval_iou(window, {rt.t10, rt.t90});
    worst_iou = std::min(worst_iou, iou);
    detail += "fig2a " + variant.label + " iou=" + fmt(iou);
  }
  announce("C07 transit-window", worst_iou >= 0.5, detail);
  CHECK(worst_iou >= 0.5);
}

TEST_CASE("criterion 8: two-scatterer steady value ignores the packet width") {
  std::map<double, double> steady;
  for (const auto& variant : preset("fig2a").variants) {
    const double dk = variant.config.dk_over_k0;
    if (dk > 1e-3 + 1e-12) continue;  // compare 1e-3 and 1e-4
    steady[dk] = rise_time(cached_run(variant.config).curve).steady;
  }
  REQUIRE(steady.size() == 2);
  const double rel = std::abs(steady.at(1e-3) - steady.at(1e-4)) / steady.at(1e-3);
  announce("C08 steady-dk-insensitivity", rel < 0.01,
           "steady(1e-3) = " + fmt(steady.at(1e-3)) + ", steady(1e-4) = " +
               fmt(steady.at(1e-4)) + ", rel diff " + fmt(rel));
  CHECK(rel < 0.01);
}

TEST_CASE("criterion 9: rescaled collapse across couplings, spins and models") {
  const double dist_a = collapse_distance(preset_curves("fig3a"));
  const double dist_b = collapse_distance(preset_curves("fig3b"));
  const bool pass = dist_a < 0.03 && dist_b < 0.03;
  announce("C09 model-spin-collapse", pass,
           "couplings/spin sup-distance " + fmt(dist_a) +
               ", anisotropic-model sup-distance " + fmt(dist_b) + " (tol 0.03)");
  CHECK(dist_a < 0.03);
  CHECK(dist_b < 0.03);
}

TEST_CASE("criterion 10: lattice oracle agrees with the spectral pipeline") {
  ScenarioConfig single;
  single.name = "oracle_single";
  single.scatterers = 1;
  single.j_over_v = {1.0};
  single.dk_over_k0 = 1e-2;
  single.x0_over_dx = 3.0;
  single.time_samples = 120;
  single.time_max = 600.0;
  single.engine = "both";
  const auto& run1 = cached_run(single);
  const double sup = sup_distance(run1.curve, run1.lattice_curve);
  const double steady1 = rise_time(run1.curve).steady;

  ScenarioConfig twin = single;
  twin.name = "oracle_two";
  twin.scatterers = 2;
  twin.dk_over_k0 = 0.025;
  twin.time_samples = 100;
  twin.time_max = 380.0;
  const auto& run2 = cached_run(twin);
  const double s_spec = rise_time(run2.curve).steady;
  const double s_lat = rise_time(run2.lattice_curve).steady;
  const double rel = std::abs(s_spec - s_lat) / s_spec;

  const bool pass = sup < 0.02 && rel < 0.02;
  announce("C10 oracle-equivalence", pass,
           "single sup-distance " + fmt(sup) + " (steady " + fmt(steady1) +
               "), two-scatterer steady rel diff " + fmt(rel));
  CHECK(sup < 0.02);
  CHECK(rel < 0.02);
}

TEST_CASE("criterion 11: overlap closed form against the full pipeline") {
  // the dk/k0 = 1e-3 single-scatterer run is shared with criterion 4
  const ScenarioConfig* config = nullptr;
  for (const auto& variant : preset("fig1a").variants) {
    if (std::abs(variant.config.dk_over_k0 - 1e-3) < 1e-12) config = &variant.config;
  }
  REQUIRE(config != nullptr);
  const auto& run = cached_run(*config);
  const GaussianPacket packet = config->packet();
  const double j = config->j_over_v.front();

  double sup = 0.0;
  for (size_t i = 0; i < run.curve.times.size(); ++i) {
    const double sigma_en = sigma_entanglement(j, packet, run.curve.times[i]);
    sup = std::max(sup, std::abs(sigma_en - run.curve.values[i]));
  }

  // amplitude variation over [k0 - 3 dk, k0 + 3 dk] at dk/k0 = 1e-2
  double worst_var = 0.0;
  const double dk = 1e-2;
  for (double jv = 0.5; jv <= 10.0 + 1e-9; jv += 0.5) {
    const auto ref = closed_form_single_site(jv, 1.0);
    for (int i = -30; i <= 30; ++i) {
      const double k = 1.0 + 3.0 * dk * i / 30.0;
      const auto amp = closed_form_single_site(jv, k);
      worst_var =
          std::max(worst_var, std::abs(amp.r_plus - ref.r_plus) / std::abs(ref.r_plus));
      worst_var = std::max(worst_var,
                           std::abs(amp.r_minus - ref.r_minus) / std::abs(ref.r_minus));
      worst_var =
          std::max(worst_var, std::abs(amp.t_plus - ref.t_plus) / std::abs(ref.t_plus));
      worst_var = std::max(worst_var,
                           std::abs(amp.t_minus - ref.t_minus) / std::abs(ref.t_minus));
    }
  }

  const bool pass = sup < 0.02 && worst_var <= 0.15;
  announce("C11 overlap-consistency", pass,
           "pipeline sup-distance " + fmt(sup) + " (tol 0.02), amplitude variation " +
               fmt(worst_var) + " (tol 0.15)");
  CHECK(sup < 0.02);
  CHECK(worst_var <= 0.15);
}
