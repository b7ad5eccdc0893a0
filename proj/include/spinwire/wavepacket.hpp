#pragma once

#include <optional>
#include <string>

#include "spinwire/scattering.hpp"
#include "spinwire/spin_algebra.hpp"

namespace spinwire {

/// Minimum-uncertainty Gaussian wavepacket centred at -x0 with carrier
/// wavevector k0 and width parameter beta:
///   phi(x) = (2 pi beta)^{-1/4} e^{i k0 (x + x0)} e^{-(x + x0)^2 / 4 beta}
/// Widths follow dx = 1/dk = sqrt(2 beta).
struct GaussianPacket {
  double x0 = 0.0;
  double k0 = 0.0;
  double beta = 0.0;

  static GaussianPacket from_ratios(double dk_over_k0, double x0_over_dx,
                                    double k0 = 1.0);

  double dx() const { return std::sqrt(2.0 * beta); }
  double dk() const { return 1.0 / std::sqrt(2.0 * beta); }
  double group_velocity() const { return k0; }  // v_k0 = k0 / m*, m* = 1

  Complex position_amplitude(double x) const;

  /// Fourier transform with convention phi~(k) = (2 pi)^{-1/2} int phi(x) e^{-ikx} dx:
  ///   phi~(k) = (2 beta / pi)^{1/4} e^{i k x0} e^{-beta (k - k0)^2}
  Complex momentum_amplitude(double k) const;

  /// Closed-form dispersive free evolution under eps_k = k^2 / 2m*.
  Complex free_propagate(double x, double tau) const;

  /// Standard deviation of the freely evolved probability density.
  double free_density_sigma(double tau) const;

  /// Probability that the freely evolved packet sits right of x (exact).
  double free_mass_right_of(double x, double tau) const;
};

/// Packet plus the initial product spin configuration (a basis state of the
/// uncoupled spin basis).
struct InitialState {
  GaussianPacket packet;
  int spin_channel = 0;

  /// The projection approximation assumes the packet starts clear of the
  /// scatterers; returns a warning when x0 < 3 dx.
  std::optional<std::string> separation_warning() const;
};

struct QuadratureSpec {
  int nodes = 257;
  double window_dks = 6.0;  // half-width of the k-window in units of dk
};

struct Quadrature {
  Eigen::VectorXd k;
  Eigen::VectorXd w;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w);

/// Gauss-Legendre rule on [k0 - W dk, k0 + W dk]; rejects windows that
/// reach k <= 0.
Quadrature build_quadrature(const GaussianPacket& packet, const QuadratureSpec& spec);

enum class ProjectionMode { quasi_monochromatic, exact };

/// Overlaps <Psi^mu_{k,eta} | Psi(0)> for a packet prepared in channel
/// mu_bar left of all scatterers. Quasi-monochromatic mode keeps only the
/// delta_{eta,+} delta_{mu,mu_bar} phi~(k) term; exact mode adds the
/// conjugated r/t terms multiplying phi~(-k).
struct ProjectionCoefficients {
  Vector plus;   // over incoming channels mu, eta = +1
  Vector minus;  // eta = -1
};

ProjectionCoefficients projection_coefficients(const InitialState& init,
                                               const ScatteringSolution& sol_plus,
                                               const ScatteringSolution* sol_minus,
                                               ProjectionMode mode);

}  // namespace spinwire
