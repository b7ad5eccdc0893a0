#pragma once

#include <iosfwd>
#include <vector>

#include "spinwire/spin_algebra.hpp"

namespace spinwire {

struct UniformGrid {
  double x_min = 0.0;
  double h = 1.0;
  int n = 0;

  double x(int i) const { return x_min + h * i; }
  double x_max() const { return x(n - 1); }
  /// Nearest grid index, clamped to the grid.
  int index_near(double x) const;
  /// Trapezoid weight of node i.
  double weight(int i) const { return (i == 0 || i == n - 1) ? 0.5 * h : h; }
};

/// Spinor wavefunction sampled at one instant. Only channels that can be
/// populated are stored; `channels` maps value columns to full-space basis
/// indices of the governing SpinSpace (dimension space_dim).
struct SpinorSlice {
  double tau = 0.0;
  UniformGrid grid;
  int space_dim = 0;
  std::vector<int> channels;
  Matrix values;  // grid.n rows, channels.size() columns

  Eigen::VectorXd density() const;           // f_e per mesh node
  double density_at(double x) const;         // linear interpolation
  double norm() const;                       // trapezoid of the density
  double probability_in(double a, double b) const;
};

struct SpinorField {
  UniformGrid grid;
  std::vector<SpinorSlice> slices;
  double max_norm_drift = 0.0;
  bool norm_flagged = false;  // drift above 1e-3

  const SpinorSlice& slice_at(double tau, double tol = 1e-9) const;
  double density_at(double tau, double x) const;  // bilinear in (tau, x)
};

/// Rows (tau, x, spin_index, re_psi, im_psi); spin_index in the full basis.
void write_field_csv(std::ostream& out, const SpinorField& field, int stride = 1);
/// Rows (tau, x, f_e).
void write_density_csv(std::ostream& out, const SpinorField& field, int stride = 1);

}  // namespace spinwire
