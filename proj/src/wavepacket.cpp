#include "spinwire/wavepacket.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace spinwire {

namespace {
constexpr double kMass = 1.0;
constexpr Complex kI{0.0, 1.0};
}  // namespace

GaussianPacket GaussianPacket::from_ratios(double dk_over_k0, double x0_over_dx,
                                           double k0) {
  if (!(dk_over_k0 > 0) || !(k0 > 0) || !(x0_over_dx > 0)) {
    throw std::invalid_argument("packet ratios must be positive");
  }
  GaussianPacket p;
  p.k0 = k0;
  const double dk = dk_over_k0 * k0;
  p.beta = 1.0 / (2.0 * dk * dk);
  p.x0 = x0_over_dx * std::sqrt(2.0 * p.beta);
  return p;
}

Complex GaussianPacket::position_amplitude(double x) const {
  const double y = x + x0;
  const double norm = std::pow(2.0 * std::numbers::pi * beta, -0.25);
  return norm * std::exp(Complex(-y * y / (4.0 * beta), k0 * y));
}

Complex GaussianPacket::momentum_amplitude(double k) const {
  const double q = k - k0;
  const double norm = std::pow(2.0 * beta / std::numbers::pi, 0.25);
  return norm * std::exp(Complex(-beta * q * q, k * x0));
}

Complex GaussianPacket::free_propagate(double x, double tau) const {
  const Complex beta_t = beta + kI * (tau / (2.0 * kMass));
  const double v = group_velocity();
  const double eps0 = 0.5 * k0 * k0 / kMass;
  const double y = x + x0;
  const Complex norm =
      std::pow(2.0 * std::numbers::pi * beta, -0.25) * std::sqrt(beta / beta_t);
  const double yc = y - v * tau;
  return norm * std::exp(kI * (k0 * y - eps0 * tau) - yc * yc / (4.0 * beta_t));
}

double GaussianPacket::free_density_sigma(double tau) const {
  const double half_tau = tau / (2.0 * kMass);
  return std::sqrt(beta + half_tau * half_tau / beta);
}

double GaussianPacket::free_mass_right_of(double x, double tau) const {
  const double centre = -x0 + group_velocity() * tau;
  const double z = (x - centre) / (std::numbers::sqrt2 * free_density_sigma(tau));
  return 0.5 * std::erfc(z);
}

std::optional<std::string> InitialState::separation_warning() const {
  if (packet.x0 < 3.0 * packet.dx()) {
    return "initial separation x0 < 3 dx: projection approximation degraded";
  }
  return std::nullopt;
}

void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");

  static std::mutex cache_mutex;
  static std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
  {
    std::scoped_lock lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) {
      x = it->second.first;
      w = it->second.second;
      return;
    }
  }

  x.resize(n);
  w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x(i) = -z;
    x(n - 1 - i) = z;
    w(i) = 2.0 / ((1.0 - z * z) * pp * pp);
    w(n - 1 - i) = w(i);
  }

  std::scoped_lock lock(cache_mutex);
  cache.emplace(n, std::make_pair(x, w));
}

Quadrature build_quadrature(const GaussianPacket& packet, const QuadratureSpec& spec) {
  const double half = spec.window_dks * packet.dk();
  const double lo = packet.k0 - half, hi = packet.k0 + half;
  if (!(lo > 0)) {
    throw std::invalid_argument("quadrature window reaches k <= 0");
  }
  Eigen::VectorXd x, w;
  gauss_legendre(spec.nodes, x, w);
  Quadrature q;
  q.k = 0.5 * (hi - lo) * x.array() + 0.5 * (hi + lo);
  q.w = 0.5 * (hi - lo) * w.array();
  return q;
}

ProjectionCoefficients projection_coefficients(const InitialState& init,
                                               const ScatteringSolution& sol_plus,
                                               const ScatteringSolution* sol_minus,
                                               ProjectionMode mode) {
  const int d = sol_plus.dim();
  const int mu_bar = init.spin_channel;
  if (mu_bar < 0 || mu_bar >= d) throw std::out_of_range("spin channel out of range");

  ProjectionCoefficients c;
  c.plus = Vector::Zero(d);
  c.minus = Vector::Zero(d);
  c.plus(mu_bar) = init.packet.momentum_amplitude(sol_plus.k);
  if (mode == ProjectionMode::exact) {
    const Complex tail = init.packet.momentum_amplitude(-sol_plus.k);
    for (int mu = 0; mu < d; ++mu) {
      c.plus(mu) += std::conj(sol_plus.r(mu_bar, mu)) * tail;
    }
    if (sol_minus != nullptr) {
      for (int mu = 0; mu < d; ++mu) {
        c.minus(mu) += std::conj(sol_minus->t(mu_bar, mu)) * tail;
      }
    }
  }
  return c;
}

}  // namespace spinwire
