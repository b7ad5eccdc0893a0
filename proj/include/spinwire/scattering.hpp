#pragma once

#include <iosfwd>
#include <vector>

#include "spinwire/spin_algebra.hpp"

namespace spinwire {

/// Stationary scattering amplitudes at a single (k, eta).
///
/// Matrices are indexed (row = outgoing channel nu, column = incoming
/// channel mu) in the SpinSpace basis. For eta = +1 the wavefunction of
/// incoming channel mu is
///   x < x_1:        delta_mu e^{ikx} + r(:,mu) e^{-ikx}
///   x_j < x < x_j+1: a_j(:,mu) e^{ikx} + b_j(:,mu) e^{-ikx}
///   x > x_N:        t(:,mu) e^{ikx}
/// and for eta = -1 the mirrored layout with e^{+-ikx} swapped (incidence
/// from the right, transmission into x < x_1). All plane-wave phases are
/// referenced to the absolute coordinate x.
struct ScatteringSolution {
  double k = 0.0;
  int eta = +1;
  std::vector<double> positions;
  Matrix r, t;
  std::vector<Matrix> interior_a, interior_b;  // one entry per gap
  double condition_estimate = 0.0;

  int dim() const { return static_cast<int>(r.rows()); }

  /// Piecewise evaluation of the stationary wavefunction for incoming
  /// channel mu: all outgoing components at position x.
  Vector wavefunction(int mu, double x) const;
  Complex wavefunction(int mu, double x, int nu) const;
};

/// Solve the boundary-condition linear system (continuity plus derivative
/// jump 2 m* K_j psi at every scatterer) for all incoming channels at one
/// wavevector and incidence direction. Throws on a singular boundary
/// system; near-singular systems are reported via condition_estimate.
ScatteringSolution solve_channels(const CouplingSpec& spec, const SpinSpace& space,
                                  double k, int eta);

/// Max over incoming channels of |sum_nu (|r|^2 + |t|^2) - 1|.
double unitarity_defect(const ScatteringSolution& sol);

/// Closed-form single-scatterer amplitudes in the singlet/triplet basis of
/// a Heisenberg contact coupling: effective scalar strengths
/// gamma_plus = J/4 (triplet) and gamma_minus = -3J/4 (singlet), with
///   r = -(1 + (v/gamma)^2)^{-1/2} e^{i arccot(gamma/v)},  t = 1 + r.
/// arccot here is the odd branch atan(1/u) (value pi/2 at u = 0); this is
/// the branch for which |r|^2 + |t|^2 = 1 holds for either sign of gamma.
struct ClosedFormAmplitudes {
  Complex r_plus, r_minus, t_plus, t_minus;
  double gamma_plus = 0.0, gamma_minus = 0.0;
};

ClosedFormAmplitudes closed_form_single_site(double j, double k);

/// Interference phase angles between the triplet and singlet reflection
/// (resp. transmission) amplitudes at wavevector k: the acute angle between
/// the two phasor directions, i.e. the phase difference reduced modulo pi
/// into [0, pi/2]. These are the angles whose sines control the growth of
/// the singlet-triplet overlap. Requires j > 0.
struct PhaseDifferences {
  double delta_r = 0.0, delta_t = 0.0;
};

PhaseDifferences phase_differences(double j, double k);

/// CSV rows (k, eta, mu, nu, Re r, Im r, Re t, Im t, Re A, Im A, Re B, Im B);
/// A/B columns are zero when there is no interior region.
void write_amplitudes_csv(std::ostream& out,
                          const std::vector<ScatteringSolution>& solutions);

}  // namespace spinwire
