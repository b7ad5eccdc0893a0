#include "spinwire/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace spinwire {

int UniformGrid::index_near(double xq) const {
  const int i = static_cast<int>(std::lround((xq - x_min) / h));
  return std::clamp(i, 0, n - 1);
}

Eigen::VectorXd SpinorSlice::density() const {
  return values.rowwise().squaredNorm();
}

double SpinorSlice::density_at(double x) const {
  if (grid.n < 2) throw std::runtime_error("slice grid too small");
  const double s = (x - grid.x_min) / grid.h;
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, grid.n - 2);
  const double frac = std::clamp(s - i, 0.0, 1.0);
  const double fa = values.row(i).squaredNorm();
  const double fb = values.row(i + 1).squaredNorm();
  return (1.0 - frac) * fa + frac * fb;
}

double SpinorSlice::norm() const {
  const Eigen::VectorXd f = density();
  double total = 0.0;
  for (int i = 0; i < grid.n; ++i) total += grid.weight(i) * f(i);
  return total;
}

double SpinorSlice::probability_in(double a, double b) const {
  if (!(b > a)) throw std::invalid_argument("empty integration region");
  // Trapezoid over grid nodes inside [a, b], with linearly interpolated
  // endpoint contributions.
  double total = 0.0;
  const int ia = std::max(0, static_cast<int>(std::ceil((a - grid.x_min) / grid.h)));
  const int ib = std::min(grid.n - 1, static_cast<int>(std::floor((b - grid.x_min) / grid.h)));
  if (ia > ib) {
    const double mid = density_at(0.5 * (a + b));
    return mid * (b - a);
  }
  for (int i = ia; i < ib; ++i) {
    total += 0.5 * grid.h *
             (values.row(i).squaredNorm() + values.row(i + 1).squaredNorm());
  }
  const double xa = grid.x(ia), xb = grid.x(ib);
  if (xa > a) total += 0.5 * (xa - a) * (density_at(a) + density_at(xa));
  if (b > xb) total += 0.5 * (b - xb) * (density_at(xb) + density_at(b));
  return total;
}

const SpinorSlice& SpinorField::slice_at(double tau, double tol) const {
  for (const auto& s : slices) {
    if (std::abs(s.tau - tau) <= tol) return s;
  }
  throw std::out_of_range("no slice at requested time");
}

double SpinorField::density_at(double tau, double x) const {
  if (slices.empty()) throw std::runtime_error("empty field");
  if (tau <= slices.front().tau) return slices.front().density_at(x);
  if (tau >= slices.back().tau) return slices.back().density_at(x);
  for (size_t i = 0; i + 1 < slices.size(); ++i) {
    const double ta = slices[i].tau, tb = slices[i + 1].tau;
    if (tau >= ta && tau <= tb) {
      const double frac = (tb > ta) ? (tau - ta) / (tb - ta) : 0.0;
      return (1.0 - frac) * slices[i].density_at(x) + frac * slices[i + 1].density_at(x);
    }
  }
  throw std::logic_error("time lookup failed");
}

void write_field_csv(std::ostream& out, const SpinorField& field, int stride) {
  out << "tau,x,spin_index,re_psi,im_psi\n";
  char line[160];
  for (const auto& s : field.slices) {
    for (int i = 0; i < s.grid.n; i += stride) {
      for (size_t c = 0; c < s.channels.size(); ++c) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%d,%.17g,%.17g\n", s.tau,
                      s.grid.x(i), s.channels[c], s.values(i, c).real(),
                      s.values(i, c).imag());
        out << line;
      }
    }
  }
}

void write_density_csv(std::ostream& out, const SpinorField& field, int stride) {
  out << "tau,x,f_e\n";
  char line[96];
  for (const auto& s : field.slices) {
    for (int i = 0; i < s.grid.n; i += stride) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", s.tau, s.grid.x(i),
                    s.values.row(i).squaredNorm());
      out << line;
    }
  }
}

}  // namespace spinwire
