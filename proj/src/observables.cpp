#include "spinwire/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "spinwire/scattering.hpp"

namespace spinwire {

namespace {
constexpr Complex kI{0.0, 1.0};
}

DensityChecks check_density(const DensityMatrix& rho) {
  DensityChecks c;
  c.hermiticity_defect = (rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff();
  c.trace_defect = std::abs(rho.rho.trace() - Complex(1.0, 0.0));
  const Matrix herm = 0.5 * (rho.rho + rho.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

double spatial_density(const SpinorField& field, double tau, double x) {
  return field.density_at(tau, x);
}

double region_probability(const SpinorSlice& slice, double d) {
  if (!(d > 0)) throw std::invalid_argument("region length must be positive");
  return slice.probability_in(0.0, d);
}

double region_probability(const SpinorField& field, double tau, double d) {
  if (field.slices.empty()) throw std::runtime_error("empty field");
  // Linear interpolation between bracketing slices.
  const auto& slices = field.slices;
  if (tau <= slices.front().tau) return region_probability(slices.front(), d);
  if (tau >= slices.back().tau) return region_probability(slices.back(), d);
  for (size_t i = 0; i + 1 < slices.size(); ++i) {
    if (tau >= slices[i].tau && tau <= slices[i + 1].tau) {
      const double span = slices[i + 1].tau - slices[i].tau;
      const double frac = (span > 0) ? (tau - slices[i].tau) / span : 0.0;
      return (1.0 - frac) * region_probability(slices[i], d) +
             frac * region_probability(slices[i + 1], d);
    }
  }
  throw std::logic_error("time lookup failed");
}

DensityMatrix reduced_spin_state(const SpinorSlice& slice, const SpinSpace& space,
                                 const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("keep set must be nonempty");
  for (int s : keep) {
    if (s < 0 || s >= space.slots()) throw std::out_of_range("keep slot out of range");
  }
  if (slice.space_dim != space.dim()) {
    throw std::invalid_argument("slice does not match spin space");
  }

  // Position trace restricted to the window where the density is above
  // 1e-10 of its maximum.
  const Eigen::VectorXd f = slice.density();
  const double fmax = f.maxCoeff();
  int lo = 0, hi = slice.grid.n - 1;
  const double cut = 1e-10 * fmax;
  while (lo < hi && f(lo) < cut) ++lo;
  while (hi > lo && f(hi) < cut) --hi;

  const int nc = static_cast<int>(slice.channels.size());
  Matrix gram = Matrix::Zero(nc, nc);
  {
    const int rows = hi - lo + 1;
    const auto block = slice.values.middleRows(lo, rows);
    gram.noalias() = block.adjoint() * block;
    gram *= slice.grid.h;
    // trapezoid end corrections
    gram -= 0.5 * slice.grid.h *
            (slice.values.row(lo).adjoint() * slice.values.row(lo) +
             slice.values.row(hi).adjoint() * slice.values.row(hi));
  }

  const double deficit = std::abs(gram.trace().real() - 1.0);
  if (deficit > 1e-3) {
    throw std::runtime_error("reduced-state trace deficit " + std::to_string(deficit) +
                             ": mesh window too small");
  }

  // Scatter active channels into the full spin basis, then trace out the
  // discarded slots.
  std::vector<bool> kept(space.slots(), false);
  for (int s : keep) kept[s] = true;

  std::vector<int> kd, kslot, dslot;
  for (int s = 0; s < space.slots(); ++s) {
    if (kept[s]) {
      kd.push_back(space.local_dim(s));
      kslot.push_back(s);
    } else {
      dslot.push_back(s);
    }
  }
  int kdim = 1;
  for (int v : kd) kdim *= v;

  auto kept_index = [&](const std::vector<int>& levels) {
    int idx = 0;
    for (size_t i = 0; i < kslot.size(); ++i) idx = idx * kd[i] + levels[kslot[i]];
    return idx;
  };

  DensityMatrix out;
  out.rho = Matrix::Zero(kdim, kdim);
  out.slots = kslot;
  out.dims = kd;

  // rho_kept(a, b) = sum over discarded-diagonal of psi psi^dagger.
  for (int ci = 0; ci < nc; ++ci) {
    const auto li = space.levels_of(slice.channels[ci]);
    for (int cj = 0; cj < nc; ++cj) {
      const auto lj = space.levels_of(slice.channels[cj]);
      bool diag = true;
      for (int s : dslot) {
        if (li[s] != lj[s]) {
          diag = false;
          break;
        }
      }
      if (!diag) continue;
      out.rho(kept_index(li), kept_index(lj)) += gram(ci, cj);
    }
  }
  return out;
}

double logarithmic_negativity(const DensityMatrix& rho, const std::vector<int>& part_a) {
  if (part_a.empty() || part_a.size() >= rho.slots.size()) {
    throw std::invalid_argument("bipartition must split the kept slots");
  }
  std::vector<bool> in_a(rho.slots.size(), false);
  for (int s : part_a) {
    if (s < 0 || s >= static_cast<int>(rho.slots.size())) {
      throw std::out_of_range("bipartition slot out of range");
    }
    in_a[s] = true;
  }

  const Matrix herm = 0.5 * (rho.rho + rho.rho.adjoint());
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-6) {
      throw std::invalid_argument("density matrix is not positive semidefinite");
    }
  }

  const int dim = rho.dim();
  const int nslots = static_cast<int>(rho.dims.size());
  auto decompose = [&](int idx, std::vector<int>& levels) {
    for (int s = nslots - 1; s >= 0; --s) {
      levels[s] = idx % rho.dims[s];
      idx /= rho.dims[s];
    }
  };
  auto compose = [&](const std::vector<int>& levels) {
    int idx = 0;
    for (int s = 0; s < nslots; ++s) idx = idx * rho.dims[s] + levels[s];
    return idx;
  };

  Matrix pt(dim, dim);
  std::vector<int> li(nslots), lj(nslots);
  for (int i = 0; i < dim; ++i) {
    decompose(i, li);
    for (int j = 0; j < dim; ++j) {
      decompose(j, lj);
      auto ri = li, rj = lj;
      for (int s = 0; s < nslots; ++s) {
        if (in_a[s]) std::swap(ri[s], rj[s]);
      }
      pt(compose(ri), compose(rj)) = herm(i, j);
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pt + pt.adjoint()),
                                           Eigen::EigenvaluesOnly);
  const double trace_norm = es.eigenvalues().cwiseAbs().sum();
  return std::max(0.0, std::log2(trace_norm));
}

double static_benchmark(double j_static, double tau) {
  return std::log2(1.0 + std::abs(std::sin(j_static * tau)));
}

Eigen::Vector4cd static_benchmark_state(double j_static, double tau) {
  // (e^{-i J tau / 4} |psi+> + e^{+3 i J tau / 4} |psi->) / sqrt(2)
  const Complex a = std::exp(-kI * (0.25 * j_static * tau));
  const Complex b = std::exp(kI * (0.75 * j_static * tau));
  Eigen::Vector4cd chi;
  chi << 0.0, 0.5 * (a + b), 0.5 * (a - b), 0.0;
  return chi;
}

Complex overlap_sigma(double j, const GaussianPacket& packet, double tau) {
  const auto amp = closed_form_single_site(j, packet.k0);
  // Transit factor common to the reflected and transmitted contributions:
  // both the left-moving mirror packet mass left of 0 and the right-moving
  // packet mass right of 0 equal S(tau).
  const double s = packet.free_mass_right_of(0.0, tau);
  const Complex coef = std::conj(amp.r_minus) * amp.r_plus +
                       std::conj(amp.t_minus) * amp.t_plus;
  return (1.0 - s) + coef * s;
}

double sigma_entanglement(double j, const GaussianPacket& packet, double tau) {
  return std::log2(1.0 + std::abs(overlap_sigma(j, packet, tau).imag()));
}

namespace {

int steady_window_start(const EntanglementCurve& curve) {
  const int n = static_cast<int>(curve.values.size());
  return n - std::max(2, n / 10);
}

}  // namespace

RiseTime rise_time(const EntanglementCurve& curve) {
  const int n = static_cast<int>(curve.values.size());
  if (n < 20) throw std::invalid_argument("curve too short for rise-time extraction");
  const int w0 = steady_window_start(curve);

  double mean = 0.0, lo = curve.values[w0], hi = curve.values[w0];
  for (int i = w0; i < n; ++i) {
    mean += curve.values[i];
    lo = std::min(lo, curve.values[i]);
    hi = std::max(hi, curve.values[i]);
  }
  mean /= (n - w0);
  if (!(mean > 0.0) || (hi - lo) > 0.01 * std::abs(mean)) {
    throw std::runtime_error("no steady state in window");
  }

  RiseTime r;
  r.steady = mean;
  auto crossing = [&](double level) {
    for (int i = 1; i < n; ++i) {
      if (curve.values[i - 1] < level && curve.values[i] >= level) {
        const double frac =
            (level - curve.values[i - 1]) / (curve.values[i] - curve.values[i - 1]);
        return curve.times[i - 1] + frac * (curve.times[i] - curve.times[i - 1]);
      }
    }
    throw std::runtime_error("level crossing not found");
  };
  r.t10 = crossing(0.1 * mean);
  r.t90 = crossing(0.9 * mean);
  r.delta_tau = r.t90 - r.t10;
  return r;
}

EntanglementCurve rescale_to_steady(const EntanglementCurve& curve) {
  const RiseTime r = rise_time(curve);
  if (!(r.steady > 0)) throw std::runtime_error("zero steady value");
  EntanglementCurve out = curve;
  for (double& v : out.values) v /= r.steady;
  return out;
}

double sup_distance(const EntanglementCurve& a, const EntanglementCurve& b) {
  if (a.times.size() != b.times.size()) {
    throw std::invalid_argument("curves must share a time grid");
  }
  double d = 0.0;
  for (size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-9 * (1.0 + std::abs(a.times[i]))) {
      throw std::invalid_argument("curves must share a time grid");
    }
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  }
  return d;
}

double min_consecutive_increment(const EntanglementCurve& curve) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < curve.values.size(); ++i) {
    m = std::min(m, curve.values[i] - curve.values[i - 1]);
  }
  return m;
}

void write_curve_csv(std::ostream& out, const EntanglementCurve& curve) {
  out << "tau,e_n,steady_flag\n";
  const int w0 = static_cast<int>(curve.values.size()) >= 20
                     ? steady_window_start(curve)
                     : static_cast<int>(curve.values.size());
  char line[96];
  for (size_t i = 0; i < curve.times.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%d\n", curve.times[i],
                  curve.values[i], static_cast<int>(i) >= w0 ? 1 : 0);
    out << line;
  }
}

}  // namespace spinwire
