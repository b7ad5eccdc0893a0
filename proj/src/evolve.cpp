#include "spinwire/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spinwire {

namespace {

constexpr double kMass = 1.0;
constexpr Complex kI{0.0, 1.0};
constexpr double kCoeffTol = 1e-300;  // drop underflowed term groups
constexpr int kPhaseResync = 1 << 16;

}  // namespace

SpectralEvolver::SpectralEvolver(const InitialState& init, const CouplingSpec& spec,
                                 const SpinSpace& space, const QuadratureSpec& quad,
                                 ProjectionMode mode, double support_margin_dx)
    : packet_(init.packet),
      quad_(build_quadrature(init.packet, quad)),
      space_dim_(space.dim()),
      positions_(spec.positions),
      support_margin_(support_margin_dx) {
  if (!(support_margin_ >= 6.0)) {
    throw std::invalid_argument("support margin below 6 dx risks clipping the packet");
  }
  const int nq = static_cast<int>(quad_.k.size());
  std::vector<ScatteringSolution> sols_plus(nq), sols_minus;
  for (int j = 0; j < nq; ++j) {
    sols_plus[j] = solve_channels(spec, space, quad_.k(j), +1);
    max_defect_ = std::max(max_defect_, unitarity_defect(sols_plus[j]));
    max_condition_ = std::max(max_condition_, sols_plus[j].condition_estimate);
  }
  if (mode == ProjectionMode::exact) {
    sols_minus.resize(nq);
    for (int j = 0; j < nq; ++j) {
      sols_minus[j] = solve_channels(spec, space, quad_.k(j), -1);
      max_defect_ = std::max(max_defect_, unitarity_defect(sols_minus[j]));
      max_condition_ = std::max(max_condition_, sols_minus[j].condition_estimate);
    }
  }

  // Direct projection term delta_{eta,+} delta_{mu,mu_bar} phi~(k).
  const int mu_bar = init.spin_channel;
  Vector direct(nq);
  for (int j = 0; j < nq; ++j) direct(j) = packet_.momentum_amplitude(quad_.k(j));
  add_groups(sols_plus, direct, +1, /*mirror=*/false, mu_bar);

  if (mode == ProjectionMode::exact) {
    // phi~(-k) corrections: conjugated reflection (transmission) amplitudes
    // feed the eta = +1 (eta = -1) eigenstates. Their k-weights sit at the
    // window edge, so they carry mirrored envelope tracks.
    Vector tail(nq);
    for (int j = 0; j < nq; ++j) tail(j) = packet_.momentum_amplitude(-quad_.k(j));
    for (int mu = 0; mu < space_dim_; ++mu) {
      Vector c_plus(nq), c_minus(nq);
      for (int j = 0; j < nq; ++j) {
        c_plus(j) = std::conj(sols_plus[j].r(mu_bar, mu)) * tail(j);
        c_minus(j) = std::conj(sols_minus[j].t(mu_bar, mu)) * tail(j);
      }
      if (c_plus.cwiseAbs().maxCoeff() > kCoeffTol) {
        add_groups(sols_plus, c_plus, +1, /*mirror=*/true, mu);
      }
      if (c_minus.cwiseAbs().maxCoeff() > kCoeffTol) {
        add_groups(sols_minus, c_minus, -1, /*mirror=*/true, mu);
      }
    }
  }
}

void SpectralEvolver::add_groups(const std::vector<ScatteringSolution>& sols,
                                 const Vector& c_in, int eta, bool mirror, int mu) {
  const int nq = static_cast<int>(quad_.k.size());
  const int n_scat = static_cast<int>(positions_.size());
  const double inf = std::numeric_limits<double>::infinity();
  const double v = packet_.group_velocity();
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  // Mirror-weighted terms flip the spatial reference of the envelope and can
  // draw on the full k-window, so their support widens at the window speed.
  const double centre_sign = mirror ? 1.0 : -1.0;
  const double vspread =
      mirror ? 0.5 * (quad_.k.maxCoeff() - quad_.k.minCoeff()) : 0.0;

  auto col_of = [this](int nu) {
    for (size_t c = 0; c < channels_.size(); ++c) {
      if (channels_[c] == nu) return static_cast<int>(c);
    }
    channels_.push_back(nu);
    return static_cast<int>(channels_.size()) - 1;
  };

  // Weighted projection coefficient common to every term of this (eta, mu).
  Vector base(nq);
  for (int j = 0; j < nq; ++j) base(j) = norm * quad_.w(j) * c_in(j);

  // amplitude(j) is a nodes x dim matrix of outgoing amplitudes; build one
  // group with only the channels that are actually populated.
  auto make_group = [&](int direction, double lo, double hi, double centre0,
                        double vel, bool do_clip, double half_vspread,
                        const std::function<Complex(int, int)>& amp) {
    // Keep only channels carrying real amplitude; entries at the linear-solve
    // noise floor (forbidden symmetry sectors) are dropped.
    std::vector<double> mx(space_dim_, 0.0);
    double gmax = 0.0;
    for (int nu = 0; nu < space_dim_; ++nu) {
      for (int j = 0; j < nq; ++j) mx[nu] = std::max(mx[nu], std::abs(amp(j, nu)));
      gmax = std::max(gmax, mx[nu]);
    }
    std::vector<int> used;
    for (int nu = 0; nu < space_dim_; ++nu) {
      if (mx[nu] > kCoeffTol && mx[nu] > 1e-13 * gmax) used.push_back(nu);
    }
    if (used.empty()) return;
    TermGroup g;
    g.direction = direction;
    g.x_lo = lo;
    g.x_hi = hi;
    g.clip = do_clip;
    g.centre0 = centre0;
    g.vel = vel;
    g.half_vspread = half_vspread;
    g.coeff.resize(nq, static_cast<int>(used.size()));
    for (size_t c = 0; c < used.size(); ++c) {
      g.cols.push_back(col_of(used[c]));
      for (int j = 0; j < nq; ++j) g.coeff(j, static_cast<int>(c)) = base(j) * amp(j, used[c]);
    }
    groups_.push_back(std::move(g));
  };

  const double in_lo = (eta > 0) ? -inf : positions_.back();
  const double in_hi = (eta > 0) ? positions_.front() : inf;
  const double out_lo = (eta > 0) ? positions_.back() : -inf;
  const double out_hi = (eta > 0) ? inf : positions_.front();

  // Incoming plane wave, delta_{nu,mu}.
  make_group(eta, in_lo, in_hi, centre_sign * eta * packet_.x0, eta * v, true, vspread,
             [&](int, int nu) { return (nu == mu) ? Complex(1.0, 0.0) : Complex(); });
  // Reflected waves.
  make_group(-eta, in_lo, in_hi, -centre_sign * eta * packet_.x0, -eta * v, true,
             vspread, [&](int j, int nu) { return sols[j].r(nu, mu); });
  // Interior standing terms between consecutive scatterers.
  for (int m = 0; m + 1 < n_scat; ++m) {
    make_group(eta, positions_[m], positions_[m + 1], 0.0, 0.0, false, 0.0,
               [&](int j, int nu) { return sols[j].interior_a[m](nu, mu); });
    make_group(-eta, positions_[m], positions_[m + 1], 0.0, 0.0, false, 0.0,
               [&](int j, int nu) { return sols[j].interior_b[m](nu, mu); });
  }
  // Transmitted waves.
  make_group(eta, out_lo, out_hi, centre_sign * eta * packet_.x0, eta * v, true,
             vspread, [&](int j, int nu) { return sols[j].t(nu, mu); });
}

double SpectralEvolver::support_halfwidth(double tau) const {
  // dx(tau) = sqrt(2) sigma(tau); margin in units of the dispersed width.
  return support_margin_ * std::numbers::sqrt2 * packet_.free_density_sigma(tau);
}

Vector SpectralEvolver::time_phases(double tau) const {
  const int nq = static_cast<int>(quad_.k.size());
  Vector ph(nq);
  for (int j = 0; j < nq; ++j) {
    const double eps = 0.5 * quad_.k(j) * quad_.k(j) / kMass;
    ph(j) = std::exp(-kI * (eps * tau));
  }
  return ph;
}

SpinorSlice SpectralEvolver::slice(double tau, const UniformGrid& grid) const {
  SpinorSlice out;
  out.tau = tau;
  out.grid = grid;
  out.space_dim = space_dim_;
  out.channels = channels_;
  out.values = Matrix::Zero(grid.n, static_cast<int>(channels_.size()));

  const Vector ph = time_phases(tau);
  const int nq = static_cast<int>(quad_.k.size());

  Vector alpha(nq), p(nq);
  for (int j = 0; j < nq; ++j) alpha(j) = std::exp(kI * (quad_.k(j) * grid.h));

  for (const auto& g : groups_) {
    double lo = std::max(g.x_lo, grid.x_min);
    double hi = std::min(g.x_hi, grid.x_max());
    if (g.clip) {
      const double c = g.centre0 + g.vel * tau;
      const double half = support_halfwidth(tau) + g.half_vspread * tau;
      lo = std::max(lo, c - half);
      hi = std::min(hi, c + half);
    }
    if (!(hi >= lo)) continue;
    int i0 = static_cast<int>(std::ceil((lo - grid.x_min) / grid.h - 1e-9));
    int i1 = static_cast<int>(std::floor((hi - grid.x_min) / grid.h + 1e-9)) + 1;
    i0 = std::clamp(i0, 0, grid.n);
    i1 = std::clamp(i1, i0, grid.n);
    if (i0 >= i1) continue;

    const int nc = static_cast<int>(g.cols.size());
    Matrix wt(nq, nc);
    for (int c = 0; c < nc; ++c) {
      wt.col(c) = g.coeff.col(c).cwiseProduct(ph);
    }
    if (g.direction < 0) wt = wt.conjugate();

    // Recursive plane-wave phases along the mesh; e^{-ikx} terms are the
    // conjugated accumulation of the same recursion.
    const double x0g = grid.x(i0);
    for (int j = 0; j < nq; ++j) p(j) = std::exp(kI * (quad_.k(j) * x0g));

    Eigen::RowVectorXcd acc(nc);
    for (int i = i0; i < i1; ++i) {
      acc.noalias() = p.transpose() * wt;
      if (g.direction < 0) acc = acc.conjugate();
      for (int c = 0; c < nc; ++c) out.values(i, g.cols[c]) += acc(c);
      if (((i - i0 + 1) & (kPhaseResync - 1)) == 0) {
        const double x = grid.x(i + 1);
        for (int j = 0; j < nq; ++j) p(j) = std::exp(kI * (quad_.k(j) * x));
      } else {
        p.array() *= alpha.array();
      }
    }
  }
  return out;
}

UniformGrid default_mesh(const InitialState& init, const CouplingSpec& spec,
                         double tau_max, int points_per_wavelength,
                         double margin_dx) {
  const auto& p = init.packet;
  const double v = p.group_velocity();
  const double dx_end = std::numbers::sqrt2 * p.free_density_sigma(tau_max);
  const double reach = std::max(p.x0, v * tau_max - p.x0);
  const double left = -reach - margin_dx * dx_end;
  const double right =
      std::max(spec.positions.back(), v * tau_max - p.x0) + margin_dx * dx_end;
  UniformGrid g;
  g.h = (2.0 * std::numbers::pi / p.k0) / points_per_wavelength;
  g.x_min = left;
  g.n = static_cast<int>(std::ceil((right - left) / g.h)) + 1;
  return g;
}

std::vector<double> default_times(const InitialState& init, const CouplingSpec& spec,
                                  int samples) {
  if (samples < 2) throw std::invalid_argument("need at least two time samples");
  const auto& p = init.packet;
  const double v = p.group_velocity();
  const double d = spec.positions.back();
  const double tau_max = 3.0 * (p.x0 + d) / v + 3.0 / (v * p.dk());
  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i) times[i] = tau_max * i / (samples - 1);
  return times;
}

SpinorField evolve(const InitialState& init, const CouplingSpec& spec,
                   const SpinSpace& space, const std::vector<double>& times,
                   const UniformGrid& grid, const QuadratureSpec& quad,
                   ProjectionMode mode) {
  SpectralEvolver evolver(init, spec, space, quad, mode);
  SpinorField field;
  field.grid = grid;
  field.slices.reserve(times.size());
  for (double tau : times) {
    field.slices.push_back(evolver.slice(tau, grid));
    field.max_norm_drift =
        std::max(field.max_norm_drift, std::abs(field.slices.back().norm() - 1.0));
  }
  field.norm_flagged = field.max_norm_drift > 1e-3;
  return field;
}

}  // namespace spinwire
