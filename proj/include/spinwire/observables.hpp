#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spinwire/field.hpp"
#include "spinwire/spin_algebra.hpp"
#include "spinwire/wavepacket.hpp"

namespace spinwire {

/// Spin density matrix over a subset of the slots of a SpinSpace.
struct DensityMatrix {
  Matrix rho;
  std::vector<int> slots;  // kept slot ids, in SpinSpace order
  std::vector<int> dims;   // local dimensions of the kept slots

  int dim() const { return static_cast<int>(rho.rows()); }
};

/// Hermiticity / trace / positivity diagnostics used by the invariants.
struct DensityChecks {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
};

DensityChecks check_density(const DensityMatrix& rho);

/// f_e(x, tau): spatial probability density of the mobile particle.
double spatial_density(const SpinorField& field, double tau, double x);

/// p_e over [0, d] at time tau (trapezoid on the field mesh).
double region_probability(const SpinorField& field, double tau, double d);
double region_probability(const SpinorSlice& slice, double d);

/// Trace over position (mesh quadrature restricted to where the density is
/// non-negligible) and over every spin slot not in `keep`. Throws when the
/// position trace leaks more than 1e-3 (mesh window too small).
DensityMatrix reduced_spin_state(const SpinorSlice& slice, const SpinSpace& space,
                                 const std::vector<int>& keep);

/// E_N = log2 of the trace norm of the partial transpose over the slots
/// listed in part_a (positions within rho.slots). Rejects inputs that are
/// not positive semidefinite beyond tolerance.
double logarithmic_negativity(const DensityMatrix& rho, const std::vector<int>& part_a);

/// Static two-spin benchmark: E_N(tau) = log2(1 + |sin(J tau)|) for two
/// exchange-coupled static qubits prepared in |ud>.
double static_benchmark(double j_static, double tau);
/// The explicitly evolved two-qubit state behind the closed form.
Eigen::Vector4cd static_benchmark_state(double j_static, double tau);

/// Singlet/triplet overlap Sigma(tau) for a single Heisenberg scatterer in
/// the quasi-monochromatic limit, evaluated from free-packet closed forms
/// and the frozen amplitudes at k0. Companion value
/// E_N = log2(1 + |Im Sigma|).
Complex overlap_sigma(double j, const GaussianPacket& packet, double tau);
double sigma_entanglement(double j, const GaussianPacket& packet, double tau);

struct CurveMeta {
  std::string model;
  std::string couplings;
  double dk_over_k0 = 0.0;
  double k0d = 0.0;
  std::string spins;
};

struct EntanglementCurve {
  std::vector<double> times;
  std::vector<double> values;
  CurveMeta meta;
};

struct RiseTime {
  double steady = 0.0;
  double t10 = 0.0;
  double t90 = 0.0;
  double delta_tau = 0.0;
};

/// Steady value = mean over the final 10% of samples (saturation required:
/// they must vary by less than 1% relative). delta_tau is the 10% -> 90%
/// transit of the steady value, linearly interpolated.
RiseTime rise_time(const EntanglementCurve& curve);

EntanglementCurve rescale_to_steady(const EntanglementCurve& curve);

double sup_distance(const EntanglementCurve& a, const EntanglementCurve& b);
double min_consecutive_increment(const EntanglementCurve& curve);

/// Rows (tau, E_N, steady_flag); steady_flag marks the averaging window.
void write_curve_csv(std::ostream& out, const EntanglementCurve& curve);

}  // namespace spinwire
