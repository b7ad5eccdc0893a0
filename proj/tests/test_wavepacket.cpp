#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "spinwire/wavepacket.hpp"

using namespace spinwire;
using Complex = std::complex<double>;

namespace {

// Brute-force Fourier transform oracle on a wide trapezoid grid.
Complex numeric_momentum_amplitude(const GaussianPacket& p, double k) {
  const double lo = -p.x0 - 10.0 * p.dx(), hi = -p.x0 + 10.0 * p.dx();
  const int n = 40001;
  const double h = (hi - lo) / (n - 1);
  Complex acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * p.position_amplitude(x) * std::exp(Complex(0, -k * x));
  }
  return acc * h / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

TEST_SUITE_BEGIN("wavepacket-dynamics");

TEST_CASE("packet ratios fix widths and the uncertainty product") {
  const auto p = GaussianPacket::from_ratios(1e-2, 5.0);
  CHECK(p.k0 == 1.0);
  CHECK(p.dk() == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(p.dx() == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(p.dx() * p.dk() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.x0 == doctest::Approx(500.0).epsilon(1e-12));
  CHECK_THROWS_AS(GaussianPacket::from_ratios(-1.0, 5.0), std::invalid_argument);
}

TEST_CASE("position amplitude peak and width") {
  const auto p = GaussianPacket::from_ratios(1e-2, 5.0);
  const double peak = std::abs(p.position_amplitude(-p.x0));
  CHECK(peak == doctest::Approx(std::pow(2.0 * std::numbers::pi * p.beta, -0.25))
                    .epsilon(1e-12));
  // density drops by e at one width from the centre
  const double ratio = std::norm(p.position_amplitude(-p.x0 + p.dx())) /
                       std::norm(p.position_amplitude(-p.x0));
  CHECK(ratio == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("position density integrates to one") {
  const auto p = GaussianPacket::from_ratios(1e-3, 5.0);
  const double lo = -p.x0 - 8.0 * p.dx(), hi = -p.x0 + 8.0 * p.dx();
  const int n = 20001;
  const double h = (hi - lo) / (n - 1);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    norm += w * std::norm(p.position_amplitude(lo + i * h));
  }
  norm *= h;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("momentum amplitude: peak, width, and negligible negative-k tail") {
  const auto p = GaussianPacket::from_ratios(1e-2, 5.0);
  CHECK(std::abs(p.momentum_amplitude(p.k0)) >
        std::abs(p.momentum_amplitude(p.k0 + 0.1 * p.dk())));
  const double ratio = std::norm(p.momentum_amplitude(p.k0 + p.dk())) /
                       std::norm(p.momentum_amplitude(p.k0));
  CHECK(ratio == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // phi~(-k0) underflows to zero for narrow packets
  CHECK(std::abs(p.momentum_amplitude(-p.k0)) == 0.0);

  const auto wide = GaussianPacket::from_ratios(0.25, 3.0);
  const double tail = std::abs(wide.momentum_amplitude(-wide.k0)) /
                      std::abs(wide.momentum_amplitude(wide.k0));
  CHECK(tail ==
        doctest::Approx(std::exp(-4.0 * wide.beta * wide.k0 * wide.k0)).epsilon(1e-6));
}

TEST_CASE("momentum amplitude matches a numerical fourier transform") {
  const auto p = GaussianPacket::from_ratios(0.05, 4.0);
  for (double k : {p.k0, p.k0 + p.dk(), p.k0 - 2.5 * p.dk()}) {
    const Complex numeric = numeric_momentum_amplitude(p, k);
    const Complex closed = p.momentum_amplitude(k);
    CHECK(std::abs(numeric - closed) < 1e-8);
  }
}

TEST_CASE("free propagation reduces to the packet at tau = 0") {
  const auto p = GaussianPacket::from_ratios(1e-2, 5.0);
  for (double x : {-p.x0, -p.x0 + 37.0, 0.0, 50.0}) {
    CHECK(std::abs(p.free_propagate(x, 0.0) - p.position_amplitude(x)) < 1e-15);
  }
}

TEST_CASE("free propagation moves at the group velocity and spreads") {
  const auto p = GaussianPacket::from_ratios(5e-2, 4.0);
  const double tau = 1.5 * p.x0 / p.group_velocity();
  const double centre = -p.x0 + p.group_velocity() * tau;

  const double lo = centre - 10.0 * p.dx(), hi = centre + 10.0 * p.dx();
  const int n = 20001;
  const double h = (hi - lo) / (n - 1);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * h;
    const double f = std::norm(p.free_propagate(x, tau));
    m0 += f;
    m1 += x * f;
    m2 += x * x * f;
  }
  m1 /= m0;
  m2 = m2 / m0 - m1 * m1;
  CHECK(m0 * h == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m1 == doctest::Approx(centre).epsilon(1e-9));
  const double sigma = p.free_density_sigma(tau);
  CHECK(std::sqrt(m2) == doctest::Approx(sigma).epsilon(1e-9));
  CHECK(sigma >= p.free_density_sigma(0.0));

  // erfc-based mass split agrees with the quadrature
  double right = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * h;
    if (x >= 0.0) right += std::norm(p.free_propagate(x, tau));
  }
  CHECK(right * h == doctest::Approx(p.free_mass_right_of(0.0, tau)).epsilon(1e-4));
}

TEST_CASE("separation warning below three widths") {
  InitialState ok{GaussianPacket::from_ratios(1e-2, 5.0), 0};
  CHECK(!ok.separation_warning().has_value());
  InitialState close{GaussianPacket::from_ratios(1e-2, 2.0), 0};
  CHECK(close.separation_warning().has_value());
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  Eigen::VectorXd x, w;
  gauss_legendre(12, x, w);
  CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
  for (int power : {2, 8, 16, 22}) {  // exact through order 2n - 1 = 23
    double acc = 0.0;
    for (int i = 0; i < 12; ++i) acc += w(i) * std::pow(x(i), power);
    CHECK(acc == doctest::Approx(2.0 / (power + 1)).epsilon(1e-13));
  }
  double odd = 0.0;
  for (int i = 0; i < 12; ++i) odd += w(i) * std::pow(x(i), 9);
  CHECK(std::abs(odd) < 1e-15);
}

TEST_CASE("packet quadrature window") {
  const auto p = GaussianPacket::from_ratios(1e-2, 5.0);
  const auto q = build_quadrature(p, QuadratureSpec{257, 6.0});
  CHECK(q.k.size() == 257);
  CHECK(q.k.minCoeff() > p.k0 - 6.0 * p.dk() - 1e-12);
  CHECK(q.k.maxCoeff() < p.k0 + 6.0 * p.dk() + 1e-12);
  // spectral mass inside the window accounts for everything
  double inside = 0.0;
  for (int i = 0; i < q.k.size(); ++i) {
    inside += q.w(i) * std::norm(p.momentum_amplitude(q.k(i)));
  }
  CHECK(std::abs(inside - 1.0) < 1e-6);

  const auto wide = GaussianPacket::from_ratios(0.2, 3.0);
  CHECK_THROWS_AS(build_quadrature(wide, QuadratureSpec{65, 6.0}),
                  std::invalid_argument);
}

TEST_CASE("projection coefficients in both modes") {
  const SpinSpace space({0.5});
  const auto spec = CouplingSpec::heisenberg({1.0}, {0.0});
  const InitialState init{GaussianPacket::from_ratios(1e-4, 5.0), 1};
  const double k = init.packet.k0 + 0.5 * init.packet.dk();
  const auto plus = solve_channels(spec, space, k, +1);
  const auto minus = solve_channels(spec, space, k, -1);

  const auto quasi =
      projection_coefficients(init, plus, &minus, ProjectionMode::quasi_monochromatic);
  for (int mu = 0; mu < 4; ++mu) {
    if (mu == 1) {
      CHECK(std::abs(quasi.plus(mu) - init.packet.momentum_amplitude(k)) == 0.0);
    } else {
      CHECK(std::abs(quasi.plus(mu)) == 0.0);
    }
    CHECK(std::abs(quasi.minus(mu)) == 0.0);
  }

  // for this packet the phi~(-k) terms underflow: exact == quasi
  const auto exact = projection_coefficients(init, plus, &minus, ProjectionMode::exact);
  CHECK((exact.plus - quasi.plus).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(exact.minus.cwiseAbs().maxCoeff() < 1e-10);

  // a wide packet picks up genuine corrections in exact mode
  const InitialState wide{GaussianPacket::from_ratios(0.3, 3.0), 1};
  const auto wplus = solve_channels(spec, space, wide.packet.k0, +1);
  const auto wminus = solve_channels(spec, space, wide.packet.k0, -1);
  const auto wexact =
      projection_coefficients(wide, wplus, &wminus, ProjectionMode::exact);
  CHECK(wexact.minus.cwiseAbs().maxCoeff() > 0.0);
}

TEST_SUITE_END();
