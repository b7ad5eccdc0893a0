#include "spinwire/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace spinwire {

namespace {
constexpr double kMass = 1.0;
constexpr Complex kI{0.0, 1.0};
}  // namespace

LatticeConfig default_lattice_config(const InitialState& init, const CouplingSpec& spec,
                                     double tau_max, int points_per_wavelength,
                                     double dt_factor, double margin_dx) {
  const auto& p = init.packet;
  const double v = p.group_velocity();
  const double dx_end = std::numbers::sqrt2 * p.free_density_sigma(tau_max);
  const double reach = std::max(p.x0, v * tau_max - p.x0);
  LatticeConfig cfg;
  cfg.h = (2.0 * std::numbers::pi / p.k0) / points_per_wavelength;
  cfg.x_min = -reach - margin_dx * dx_end;
  cfg.x_max = std::max(spec.positions.back(), v * tau_max - p.x0) + margin_dx * dx_end;
  cfg.dt = dt_factor * 2.0 * kMass * cfg.h * cfg.h;
  return cfg;
}

LatticeHamiltonian::LatticeHamiltonian(const CouplingSpec& spec, const SpinSpace& space,
                                       const LatticeConfig& cfg) {
  spec.validate();
  if (!(cfg.h > 0) || !(cfg.x_max > cfg.x_min)) {
    throw std::invalid_argument("invalid lattice domain");
  }
  grid_.h = cfg.h;
  grid_.x_min = cfg.x_min;
  grid_.n = static_cast<int>(std::ceil((cfg.x_max - cfg.x_min) / cfg.h)) + 1;
  dim_ = space.dim();
  hop_ = 1.0 / (2.0 * kMass * cfg.h * cfg.h);
  for (int j = 0; j < spec.scatterer_count(); ++j) {
    const double p = spec.positions[j];
    if (p < cfg.x_min || p > cfg.x_max) {
      throw std::invalid_argument("scatterer outside lattice domain");
    }
    couplings_.emplace_back(grid_.index_near(p),
                            coupling_matrix(spec, j, space) / cfg.h);
  }
}

void LatticeHamiltonian::apply(const Matrix& psi, Matrix& out) const {
  const int n = grid_.n;
  out.resizeLike(psi);
  for (int c = 0; c < psi.cols(); ++c) {
    out(0, c) = hop_ * (2.0 * psi(0, c) - psi(1, c));
    out(n - 1, c) = hop_ * (2.0 * psi(n - 1, c) - psi(n - 2, c));
  }
  out.middleRows(1, n - 2) =
      hop_ * (2.0 * psi.middleRows(1, n - 2) - psi.topRows(n - 2) - psi.bottomRows(n - 2));
  for (const auto& [site, kmat] : couplings_) {
    out.row(site) += psi.row(site) * kmat.transpose();
  }
}

Complex LatticeHamiltonian::expectation(const Matrix& psi) const {
  Matrix hpsi;
  apply(psi, hpsi);
  return grid_.h * (psi.conjugate().cwiseProduct(hpsi)).sum();
}

Matrix LatticeHamiltonian::to_dense() const {
  const long total = static_cast<long>(grid_.n) * dim_;
  if (total > 4000) throw std::runtime_error("lattice too large for dense form");
  Matrix h = Matrix::Zero(total, total);
  for (int i = 0; i < grid_.n; ++i) {
    for (int nu = 0; nu < dim_; ++nu) {
      const long row = static_cast<long>(i) * dim_ + nu;
      h(row, row) += 2.0 * hop_;
      if (i > 0) h(row, row - dim_) -= hop_;
      if (i + 1 < grid_.n) h(row, row + dim_) -= hop_;
    }
  }
  for (const auto& [site, kmat] : couplings_) {
    h.block(static_cast<long>(site) * dim_, static_cast<long>(site) * dim_, dim_, dim_) +=
        kmat;
  }
  return h;
}

double lattice_dispersion(double k, double h) {
  return (1.0 - std::cos(k * h)) / (kMass * h * h);
}

CayleyPropagator::CayleyPropagator(const LatticeHamiltonian& h, double dt)
    : h_(h), dt_(dt) {
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  const int n = h.grid().n;
  const double hop = 1.0 / (2.0 * kMass * h.spacing() * h.spacing());
  const Complex diag = 1.0 + kI * (dt * hop);        // 1 + i dt/2 * 2 hop
  off_ = -kI * (0.5 * dt * hop);

  // Thomas prefactorization for the constant tridiagonal (diag, off).
  upper_mod_.resize(n);
  diag_inv_.resize(n);
  Complex den = diag;
  diag_inv_(0) = 1.0 / den;
  upper_mod_(0) = off_ * diag_inv_(0);
  for (int i = 1; i < n; ++i) {
    den = diag - off_ * upper_mod_(i - 1);
    diag_inv_(i) = 1.0 / den;
    upper_mod_(i) = off_ * diag_inv_(i);
  }

  // Green's columns and capacitance block for the on-site couplings.
  const auto& sites = h.site_couplings();
  const int p = static_cast<int>(sites.size());
  const int d = h.spin_dim();
  greens_.resize(n, p);
  for (int j = 0; j < p; ++j) {
    Matrix e = Matrix::Zero(n, 1);
    e(sites[j].first, 0) = 1.0;
    solve_kinetic(e);
    greens_.col(j) = e.col(0);
  }
  Matrix w = Matrix::Zero(p * d, p * d);
  Matrix cap = Matrix::Identity(p * d, p * d);
  for (int j = 0; j < p; ++j) {
    const Matrix vj = kI * (0.5 * dt) * sites[j].second;
    w.block(j * d, j * d, d, d) = vj;
    for (int jp = 0; jp < p; ++jp) {
      cap.block(j * d, jp * d, d, d) += greens_(sites[j].first, jp) * vj;
    }
  }
  correction_ = cap.partialPivLu().solve(w);
}

void CayleyPropagator::solve_kinetic(Matrix& rhs) const {
  const int n = static_cast<int>(rhs.rows());
  for (int c = 0; c < rhs.cols(); ++c) {
    rhs(0, c) *= diag_inv_(0);
    for (int i = 1; i < n; ++i) {
      rhs(i, c) = (rhs(i, c) - off_ * rhs(i - 1, c)) * diag_inv_(i);
    }
    for (int i = n - 2; i >= 0; --i) {
      rhs(i, c) -= upper_mod_(i) * rhs(i + 1, c);
    }
  }
}

void CayleyPropagator::step(Matrix& psi) const {
  Matrix hpsi;
  h_.apply(psi, hpsi);
  psi -= kI * (0.5 * dt_) * hpsi;  // (1 - i H dt / 2) psi
  solve_kinetic(psi);

  const auto& sites = h_.site_couplings();
  const int p = static_cast<int>(sites.size());
  const int d = h_.spin_dim();
  Vector v(p * d);
  for (int j = 0; j < p; ++j) v.segment(j * d, d) = psi.row(sites[j].first).transpose();
  const Vector z = correction_ * v;
  for (int j = 0; j < p; ++j) {
    psi.noalias() -= greens_.col(j) * z.segment(j * d, d).transpose();
  }
}

Matrix lattice_initial_state(const InitialState& init, const LatticeHamiltonian& h,
                             int space_dim) {
  const auto& grid = h.grid();
  Matrix psi = Matrix::Zero(grid.n, space_dim);
  for (int i = 0; i < grid.n; ++i) {
    psi(i, init.spin_channel) = init.packet.position_amplitude(grid.x(i));
  }
  double norm = 0.0;
  for (int i = 0; i < grid.n; ++i) norm += grid.weight(i) * psi.row(i).squaredNorm();
  psi /= std::sqrt(norm);
  return psi;
}

LatticeRunResult lattice_entanglement_curve(const InitialState& init,
                                            const CouplingSpec& spec,
                                            const SpinSpace& space,
                                            const LatticeConfig& cfg,
                                            const std::vector<double>& times,
                                            const std::vector<int>& keep,
                                            const std::vector<int>& part_a) {
  if (times.empty()) throw std::invalid_argument("no sample times");
  const double k0h = init.packet.k0 * cfg.h;
  if (k0h > 2.0 * std::numbers::pi / 40.0 + 1e-12) {
    throw std::invalid_argument("lattice spacing too coarse: k0 h > 2 pi / 40");
  }
  if (cfg.dt > 0.05 * 2.0 * kMass * cfg.h * cfg.h + 1e-15) {
    throw std::invalid_argument("time step above accuracy budget 0.05 * 2 m* h^2");
  }

  LatticeHamiltonian h(spec, space, cfg);
  Matrix psi = lattice_initial_state(init, h, space.dim());

  LatticeRunResult result;
  result.curve.times = times;

  std::vector<int> channels(space.dim());
  for (int i = 0; i < space.dim(); ++i) channels[i] = i;

  std::unique_ptr<CayleyPropagator> prop;
  double prop_dt = -1.0;
  double t_now = times.front();
  if (std::abs(t_now) > 1e-12) throw std::invalid_argument("times must start at 0");

  for (size_t s = 0; s < times.size(); ++s) {
    if (s > 0) {
      const double span = times[s] - times[s - 1];
      if (!(span > 0)) throw std::invalid_argument("times must increase");
      const int nsub = std::max(1, static_cast<int>(std::ceil(span / cfg.dt - 1e-9)));
      const double dt = span / nsub;
      if (std::abs(dt - prop_dt) > 1e-14) {
        prop = std::make_unique<CayleyPropagator>(h, dt);
        prop_dt = dt;
      }
      for (int i = 0; i < nsub; ++i) prop->step(psi);
    }

    SpinorSlice slice;
    slice.tau = times[s];
    slice.grid = h.grid();
    slice.space_dim = space.dim();
    slice.channels = channels;
    slice.values = psi;
    result.norm_drift = std::max(result.norm_drift, std::abs(slice.norm() - 1.0));
    result.boundary_density =
        std::max({result.boundary_density, psi.row(0).squaredNorm(),
                  psi.row(h.grid().n - 1).squaredNorm()});

    const DensityMatrix rho = reduced_spin_state(slice, space, keep);
    result.curve.values.push_back(logarithmic_negativity(rho, part_a));
  }
  return result;
}

}  // namespace spinwire
