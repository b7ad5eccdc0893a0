#include <doctest.h>

#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "spinwire/scattering.hpp"

using namespace spinwire;
using Complex = std::complex<double>;

namespace {

// Columns |psi+>, |psi-> of the m_total = 0 block {ud, du}.
Eigen::Matrix2cd to_singlet_triplet(const Matrix& amp4) {
  Eigen::Matrix2cd block;
  block << amp4(1, 1), amp4(1, 2), amp4(2, 1), amp4(2, 2);
  Eigen::Matrix2cd basis;
  const double r = 1.0 / std::sqrt(2.0);
  basis << r, r, r, -r;
  return basis.adjoint() * block * basis;
}

}  // namespace

TEST_SUITE_BEGIN("stationary-scattering");

TEST_CASE("closed form at gamma/v = 1 matches the pinned values") {
  // J/v = 4 puts the triplet channel at gamma/v = 1
  const auto amp = closed_form_single_site(4.0, 1.0);
  CHECK(amp.gamma_plus == doctest::Approx(1.0));
  CHECK(amp.gamma_minus == doctest::Approx(-3.0));
  CHECK(amp.r_plus.real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(amp.r_plus.imag() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(amp.t_plus.real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(amp.t_plus.imag() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(amp.r_minus.real() == doctest::Approx(-0.9).epsilon(1e-12));
  CHECK(amp.r_minus.imag() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("closed form is unitary channel by channel for both gamma signs") {
  for (double jv : {0.05, 0.3, 1.0, 4.0, 12.0, 40.0}) {
    for (double k : {0.4, 1.0, 3.0}) {
      const auto amp = closed_form_single_site(jv, k);
      CHECK(std::abs(std::norm(amp.r_plus) + std::norm(amp.t_plus) - 1.0) < 1e-12);
      CHECK(std::abs(std::norm(amp.r_minus) + std::norm(amp.t_minus) - 1.0) < 1e-12);
      CHECK(std::abs(amp.t_plus - (1.0 + amp.r_plus)) == 0.0);
      CHECK(std::abs(amp.t_minus - (1.0 + amp.r_minus)) == 0.0);
    }
  }
}

TEST_CASE("closed form limits") {
  const auto free_amp = closed_form_single_site(0.0, 1.0);
  CHECK(std::abs(free_amp.r_plus) == 0.0);
  CHECK(free_amp.t_plus == Complex(1.0, 0.0));
  CHECK(free_amp.t_minus == Complex(1.0, 0.0));

  const auto wall = closed_form_single_site(1e8, 1.0);
  CHECK(std::abs(wall.r_plus) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(wall.t_plus) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::abs(wall.r_minus) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("closed form equals the direct boundary-condition amplitude") {
  // r = gamma / (i v - gamma) for a scalar delta of strength gamma
  for (double jv : {0.2, 1.0, 3.7, 15.0}) {
    for (double k : {0.5, 1.0, 2.5}) {
      const auto amp = closed_form_single_site(jv, k);
      for (auto [gamma, r] : {std::pair{amp.gamma_plus, amp.r_plus},
                              std::pair{amp.gamma_minus, amp.r_minus}}) {
        const Complex direct = gamma / (Complex(0, k) - gamma);
        CHECK(std::abs(r - direct) < 1e-12);
      }
    }
  }
}

TEST_CASE("zero coupling scatters nothing") {
  const SpinSpace space({0.5, 0.5});
  const auto spec = CouplingSpec::heisenberg({0.0, 0.0}, {0.0, 2.0});
  const auto sol = solve_channels(spec, space, 1.3, +1);
  CHECK(sol.r.cwiseAbs().maxCoeff() < 1e-14);
  CHECK((sol.t - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(unitarity_defect(sol) < 1e-12);
}

TEST_CASE("tiny coupling stays close to the free solution") {
  const SpinSpace space({0.5, 0.5});
  const auto spec = CouplingSpec::heisenberg({1e-6, 1e-6}, {0.0, 3.0});
  const auto sol = solve_channels(spec, space, 1.0, +1);
  CHECK(sol.r.cwiseAbs().maxCoeff() < 1e-5);
  CHECK((sol.t - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(unitarity_defect(sol) < 1e-12);
}

TEST_CASE("single heisenberg scatterer reproduces the closed form") {
  const SpinSpace space({0.5});
  for (double jv : {0.25, 1.0, 4.0, 9.0}) {
    for (double k : {0.5, 1.0, 2.0}) {
      const auto spec = CouplingSpec::heisenberg({jv * k}, {0.0});  // J/v_k = jv
      const auto sol = solve_channels(spec, space, k, +1);
      const auto amp = closed_form_single_site(jv * k, k);

      const Eigen::Matrix2cd rst = to_singlet_triplet(sol.r);
      const Eigen::Matrix2cd tst = to_singlet_triplet(sol.t);
      CHECK(std::abs(rst(0, 0) - amp.r_plus) < 1e-10);
      CHECK(std::abs(rst(1, 1) - amp.r_minus) < 1e-10);
      CHECK(std::abs(rst(0, 1)) < 1e-12);
      CHECK(std::abs(rst(1, 0)) < 1e-12);
      CHECK(std::abs(tst(0, 0) - amp.t_plus) < 1e-10);
      CHECK(std::abs(tst(1, 1) - amp.t_minus) < 1e-10);

      // fully polarized channels are unscattered by the triplet projection:
      // uu stays uu with amplitude r+ / t+
      CHECK(std::abs(sol.r(0, 0) - amp.r_plus) < 1e-10);
      CHECK(std::abs(sol.t(3, 3) - amp.t_plus) < 1e-10);
    }
  }
}

TEST_CASE("flux conservation over random draws of model, spin and geometry") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> jdist(0.1, 10.0);
  std::uniform_real_distribution<double> kddist(0.05, 2.0 * std::numbers::pi - 0.05);
  std::uniform_real_distribution<double> kdist(0.4, 2.5);
  std::uniform_int_distribution<int> idist(0, 3);
  std::uniform_int_distribution<int> sdist(0, 1);
  std::uniform_int_distribution<int> ndist(1, 2);

  for (int draw = 0; draw < 60; ++draw) {
    const int n = ndist(rng);
    const double s = sdist(rng) ? 1.0 : 0.5;
    const double k = kdist(rng);
    std::vector<double> pos{0.0};
    if (n == 2) pos.push_back(kddist(rng) / k);

    const int model = idist(rng);
    CouplingSpec spec;
    std::vector<std::array<double, 3>> triples;
    for (int j = 0; j < n; ++j) {
      const double jv = jdist(rng) * k;  // J/v in [0.1, 10]
      switch (model) {
        case 0: triples.push_back({jv, jv, jv}); break;
        case 1: triples.push_back({jv, jv, 2.0 * jv}); break;
        case 2: triples.push_back({jv, jv, 0.0}); break;
        default: triples.push_back({jv, 2.0 * jv, 0.0}); break;
      }
    }
    spec = CouplingSpec::xyz(triples, pos);
    const SpinSpace space(std::vector<double>(n, s));

    for (int eta : {+1, -1}) {
      const auto sol = solve_channels(spec, space, k, eta);
      CHECK(unitarity_defect(sol) < 1e-10);
    }
  }
}

TEST_CASE("s_z conserving models have block-diagonal amplitudes") {
  const SpinSpace space({0.5, 0.5});
  const auto spec = CouplingSpec::xyz({{1.0, 1.0, 2.0}, {1.0, 1.0, 2.0}},
                                      {0.0, std::numbers::pi});
  const auto sol = solve_channels(spec, space, 1.0, +1);
  for (int mu = 0; mu < space.dim(); ++mu) {
    for (int nu = 0; nu < space.dim(); ++nu) {
      if (std::abs(space.total_sz(mu) - space.total_sz(nu)) > 1e-9) {
        CHECK(std::abs(sol.r(nu, mu)) < 1e-12);
        CHECK(std::abs(sol.t(nu, mu)) < 1e-12);
      }
    }
  }
}

TEST_CASE("mirror symmetry relates the two incidence directions") {
  const double k = 1.1, d = 2.3;
  const SpinSpace space({0.5, 0.5});
  const auto spec = CouplingSpec::heisenberg({1.4, 1.4}, {0.0, d});
  const auto plus = solve_channels(spec, space, k, +1);
  const auto minus = solve_channels(spec, space, k, -1);

  // swap of the two scatterer slots
  auto swap_idx = [&](int idx) {
    auto lv = space.levels_of(idx);
    std::swap(lv[1], lv[2]);
    return space.index_of(lv);
  };
  const Complex phase = std::exp(Complex(0, -2.0 * k * d));
  for (int mu = 0; mu < space.dim(); ++mu) {
    for (int nu = 0; nu < space.dim(); ++nu) {
      CHECK(std::abs(minus.t(nu, swap_idx(mu)) - plus.t(swap_idx(nu), mu)) < 1e-10);
      CHECK(std::abs(minus.r(nu, swap_idx(mu)) - phase * plus.r(swap_idx(nu), mu)) <
            1e-10);
    }
  }
}

TEST_CASE("stationary wavefunction is continuous at the scatterers") {
  const SpinSpace space({0.5, 0.5});
  const auto spec = CouplingSpec::heisenberg({1.7, 0.6}, {0.0, 1.9});
  for (int eta : {+1, -1}) {
    const auto sol = solve_channels(spec, space, 0.9, eta);
    for (int mu = 0; mu < space.dim(); ++mu) {
      for (double p : {0.0, 1.9}) {
        const Vector left = sol.wavefunction(mu, p - 1e-9);
        const Vector right = sol.wavefunction(mu, p + 1e-9);
        CHECK((left - right).cwiseAbs().maxCoeff() < 1e-7);
      }
      // asymptotic forms
      const Vector in = sol.wavefunction(mu, eta > 0 ? -7.0 : 9.0);
      const double xin = eta > 0 ? -7.0 : 9.0;
      Vector expected = sol.r.col(mu) * std::exp(Complex(0, -eta * sol.k * xin));
      expected(mu) += std::exp(Complex(0, eta * sol.k * xin));
      CHECK((in - expected).cwiseAbs().maxCoeff() < 1e-10);

      const double xout = eta > 0 ? 9.0 : -7.0;
      const Vector out = sol.wavefunction(mu, xout);
      const Vector t_expected = sol.t.col(mu) * std::exp(Complex(0, eta * sol.k * xout));
      CHECK((out - t_expected).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("two-scatterer resonant geometry keeps a small unitarity defect") {
  const SpinSpace space({0.5, 0.5});
  const double k = 1.0, d = std::numbers::pi;
  const auto spec = CouplingSpec::heisenberg({1.0, 1.0}, {0.0, d});
  const auto sol = solve_channels(spec, space, k, +1);
  CHECK(unitarity_defect(sol) < 1e-10);
  CHECK(sol.condition_estimate < 1e8);
}

TEST_CASE("interference phase angles stay in the first quadrant") {
  double max_angle = 0.0;
  for (double jv = 0.1; jv <= 20.0; jv += 0.1) {
    const auto d = phase_differences(jv, 1.0);
    CHECK(d.delta_r >= 0.0);
    CHECK(d.delta_r <= 0.5 * std::numbers::pi + 1e-12);
    CHECK(d.delta_t >= 0.0);
    CHECK(d.delta_t <= 0.5 * std::numbers::pi + 1e-12);
    // r and t phasor angles coincide for the contact coupling
    CHECK(d.delta_r == doctest::Approx(d.delta_t).epsilon(1e-10));
    max_angle = std::max(max_angle, d.delta_r);
  }
  // the angle vanishes in the weak-coupling limit ...
  CHECK(phase_differences(1e-6, 1.0).delta_r < 1e-5);
  // ... and reaches pi/2 at J/v = 4/sqrt(3)
  CHECK(phase_differences(4.0 / std::sqrt(3.0), 1.0).delta_r ==
        doctest::Approx(0.5 * std::numbers::pi).epsilon(1e-10));
  CHECK(max_angle > 1.5);
  CHECK_THROWS_AS(phase_differences(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("amplitude csv export schema") {
  const SpinSpace space({0.5});
  const auto spec = CouplingSpec::heisenberg({1.0}, {0.0});
  const auto sol = solve_channels(spec, space, 1.0, +1);
  std::ostringstream out;
  write_amplitudes_csv(out, {sol});
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,eta,mu,nu,re_r,im_r,re_t,im_t,re_a,im_a,re_b,im_b");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 16);
}

TEST_CASE("invalid wavevectors are rejected") {
  const SpinSpace space({0.5});
  const auto spec = CouplingSpec::heisenberg({1.0}, {0.0});
  CHECK_THROWS_AS(solve_channels(spec, space, 0.0, +1), std::invalid_argument);
  CHECK_THROWS_AS(solve_channels(spec, space, -1.0, +1), std::invalid_argument);
  CHECK_THROWS_AS(closed_form_single_site(1.0, 0.0), std::invalid_argument);
}

TEST_SUITE_END();
