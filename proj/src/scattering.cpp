#include "spinwire/scattering.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace spinwire {

namespace {

constexpr double kMass = 1.0;  // m*, fixed by the unit convention
constexpr Complex kI{0.0, 1.0};

// Index of the region containing x; region m spans (p_{m-1}, p_m).
int region_of(const std::vector<double>& positions, double x) {
  int m = 0;
  while (m < static_cast<int>(positions.size()) && x >= positions[m]) ++m;
  return m;
}

}  // namespace

Vector ScatteringSolution::wavefunction(int mu, double x) const {
  const int d = dim();
  const int n = static_cast<int>(positions.size());
  const int m = region_of(positions, x);
  const Complex ef = std::exp(kI * (eta * k * x));
  const Complex eb = std::conj(ef);

  Vector fwd = Vector::Zero(d), bwd = Vector::Zero(d);
  const int in_region = (eta > 0) ? 0 : n;
  const int out_region = (eta > 0) ? n : 0;
  if (m == in_region) {
    fwd = Vector::Zero(d);
    fwd(mu) = 1.0;
    bwd = r.col(mu);
  } else if (m == out_region) {
    fwd = t.col(mu);
  } else {
    fwd = interior_a[m - 1].col(mu);
    bwd = interior_b[m - 1].col(mu);
  }
  return fwd * ef + bwd * eb;
}

Complex ScatteringSolution::wavefunction(int mu, double x, int nu) const {
  return wavefunction(mu, x)(nu);
}

ScatteringSolution solve_channels(const CouplingSpec& spec, const SpinSpace& space,
                                  double k, int eta) {
  spec.validate();
  if (!(k > 0)) throw std::invalid_argument("wavevector must be positive");
  if (eta != 1 && eta != -1) throw std::invalid_argument("eta must be +1 or -1");
  if (space.scatterers() != spec.scatterer_count()) {
    throw std::invalid_argument("spin space does not match coupling spec");
  }

  const int d = space.dim();
  const int n = spec.scatterer_count();
  const int unknowns = 2 * d * n;

  // Unknown block layout: [r, A_1, B_1, ..., A_{n-1}, B_{n-1}, t], each of
  // width d. Region m has plane-wave pair (fwd e^{i eta k x}, bwd e^{-i eta k x});
  // block index of each coefficient, -1 for known data.
  std::vector<int> fwd_block(n + 1, -1), bwd_block(n + 1, -1);
  const int in_region = (eta > 0) ? 0 : n;
  const int out_region = (eta > 0) ? n : 0;
  bwd_block[in_region] = 0;            // r
  fwd_block[out_region] = 2 * n - 1;   // t
  for (int m = 1; m < n; ++m) {
    fwd_block[m] = 2 * m - 1;          // A_m
    bwd_block[m] = 2 * m;              // B_m
  }

  Matrix sys = Matrix::Zero(unknowns, unknowns);
  Matrix rhs = Matrix::Zero(unknowns, d);

  // The incoming delta term contributes known values; everything it touches
  // moves to the right-hand side with opposite sign.
  auto add_term = [&](int row0, int region, Complex fwd_c, Complex bwd_c) {
    // fwd coefficient
    if (fwd_block[region] >= 0) {
      const int c0 = fwd_block[region] * d;
      for (int nu = 0; nu < d; ++nu) sys(row0 + nu, c0 + nu) += fwd_c;
    } else if (region == in_region) {
      for (int mu = 0; mu < d; ++mu) rhs(row0 + mu, mu) -= fwd_c;
    }
    // bwd coefficient (known only in the outgoing region, where it is zero)
    if (bwd_block[region] >= 0) {
      const int c0 = bwd_block[region] * d;
      for (int nu = 0; nu < d; ++nu) sys(row0 + nu, c0 + nu) += bwd_c;
    }
  };
  auto add_coupled_term = [&](int row0, int region, Complex fwd_c, Complex bwd_c,
                              const Matrix& kmat) {
    if (fwd_block[region] >= 0) {
      const int c0 = fwd_block[region] * d;
      sys.block(row0, c0, d, d) += fwd_c * kmat;
    } else if (region == in_region) {
      rhs.block(row0, 0, d, d) -= fwd_c * kmat;
    }
    if (bwd_block[region] >= 0) {
      const int c0 = bwd_block[region] * d;
      sys.block(row0, c0, d, d) += bwd_c * kmat;
    }
  };

  for (int j = 0; j < n; ++j) {
    const double p = spec.positions[j];
    const Complex ef = std::exp(kI * (eta * k * p));
    const Complex eb = std::conj(ef);
    const Matrix kmat = coupling_matrix(spec, j, space);
    const int left = j, right = j + 1;
    const int row_cont = 2 * d * j;
    const int row_jump = row_cont + d;

    // psi_left(p) - psi_right(p) = 0
    add_term(row_cont, left, ef, eb);
    add_term(row_cont, right, -ef, -eb);

    // i eta k [psi_right' - psi_left'] - 2 m* K psi_right = 0 at p
    const Complex der = kI * (eta * k);
    add_term(row_jump, right, der * ef, -der * eb);
    add_term(row_jump, left, -der * ef, der * eb);
    add_coupled_term(row_jump, right, -2.0 * kMass * ef, -2.0 * kMass * eb, kmat);
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(sys);
  ScatteringSolution sol;
  const auto& qrr = qr.matrixR();
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < unknowns; ++i) {
    const double v = std::abs(qrr(i, i));
    rmax = std::max(rmax, v);
    rmin = std::min(rmin, v);
  }
  sol.condition_estimate = (rmin > 0) ? rmax / rmin : std::numeric_limits<double>::infinity();
  if (!qr.isInvertible() || !std::isfinite(sol.condition_estimate)) {
    throw std::runtime_error(
        "singular boundary-condition system (condition estimate " +
        std::to_string(sol.condition_estimate) + ") at k = " + std::to_string(k));
  }

  Matrix x = qr.solve(rhs);
  x += qr.solve(rhs - sys * x);  // one refinement step

  sol.k = k;
  sol.eta = eta;
  sol.positions = spec.positions;
  sol.r = x.block(0, 0, d, d);
  sol.t = x.block((2 * n - 1) * d, 0, d, d);
  for (int m = 1; m < n; ++m) {
    sol.interior_a.push_back(x.block((2 * m - 1) * d, 0, d, d));
    sol.interior_b.push_back(x.block(2 * m * d, 0, d, d));
  }
  return sol;
}

double unitarity_defect(const ScatteringSolution& sol) {
  double defect = 0.0;
  for (int mu = 0; mu < sol.dim(); ++mu) {
    const double flux = sol.r.col(mu).squaredNorm() + sol.t.col(mu).squaredNorm();
    defect = std::max(defect, std::abs(flux - 1.0));
  }
  return defect;
}

namespace {

// Odd-branch arccot: atan(1/u) for u != 0, pi/2 at u = 0. Negative
// arguments map to (-pi/2, 0); with the (0, pi) branch the closed form
// below would violate flux conservation for gamma < 0.
double acot(double u) {
  return (u == 0.0) ? 0.5 * std::numbers::pi : std::atan(1.0 / u);
}

Complex channel_reflection(double gamma, double v) {
  if (gamma == 0.0) return {0.0, 0.0};
  const double mod = 1.0 / std::sqrt(1.0 + (v / gamma) * (v / gamma));
  return -mod * std::exp(kI * acot(gamma / v));
}

}  // namespace

ClosedFormAmplitudes closed_form_single_site(double j, double k) {
  if (!(k > 0)) throw std::invalid_argument("wavevector must be positive");
  const double v = k / kMass;
  ClosedFormAmplitudes amp;
  amp.gamma_plus = 0.25 * j;
  amp.gamma_minus = -0.75 * j;
  amp.r_plus = channel_reflection(amp.gamma_plus, v);
  amp.r_minus = channel_reflection(amp.gamma_minus, v);
  amp.t_plus = 1.0 + amp.r_plus;
  amp.t_minus = 1.0 + amp.r_minus;
  return amp;
}

namespace {

double acute_phasor_angle(Complex a, Complex b) {
  double delta = std::arg(a) - std::arg(b);
  delta = std::remainder(delta, std::numbers::pi);  // [-pi/2, pi/2]
  return std::abs(delta);
}

}  // namespace

PhaseDifferences phase_differences(double j, double k) {
  if (!(j > 0)) throw std::invalid_argument("phase differences require j > 0");
  const auto amp = closed_form_single_site(j, k);
  PhaseDifferences d;
  d.delta_r = acute_phasor_angle(amp.r_plus, amp.r_minus);
  d.delta_t = acute_phasor_angle(amp.t_plus, amp.t_minus);
  return d;
}

void write_amplitudes_csv(std::ostream& out,
                          const std::vector<ScatteringSolution>& solutions) {
  out << "k,eta,mu,nu,re_r,im_r,re_t,im_t,re_a,im_a,re_b,im_b\n";
  char line[320];
  for (const auto& sol : solutions) {
    const bool has_interior = !sol.interior_a.empty();
    for (int mu = 0; mu < sol.dim(); ++mu) {
      for (int nu = 0; nu < sol.dim(); ++nu) {
        const Complex a = has_interior ? sol.interior_a[0](nu, mu) : Complex{};
        const Complex b = has_interior ? sol.interior_b[0](nu, mu) : Complex{};
        std::snprintf(line, sizeof(line),
                      "%.17g,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      sol.k, sol.eta, mu, nu, sol.r(nu, mu).real(), sol.r(nu, mu).imag(),
                      sol.t(nu, mu).real(), sol.t(nu, mu).imag(), a.real(), a.imag(),
                      b.real(), b.imag());
        out << line;
      }
    }
  }
}

}  // namespace spinwire
