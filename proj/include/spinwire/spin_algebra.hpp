#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace spinwire {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tensor-product spin space for one mobile spin-1/2 ("electron" slot 0)
/// and N static scatterer spins in position order (slots 1..N).
///
/// Within each slot, levels are ordered by decreasing magnetic quantum
/// number: level 0 <-> m = +s, level 2s <-> m = -s. The electron slot is
/// the slowest index of the flattened basis.
class SpinSpace {
public:
  explicit SpinSpace(const std::vector<double>& scatterer_spins);

  int dim() const { return dim_; }
  int slots() const { return static_cast<int>(twos_.size()); }
  int scatterers() const { return slots() - 1; }
  int local_dim(int slot) const;
  double spin(int slot) const;

  /// Flattened basis index of a level tuple (one level per slot).
  int index_of(const std::vector<int>& levels) const;
  /// Level tuple of a flattened basis index (inverse of index_of).
  std::vector<int> levels_of(int index) const;

  double m_value(int slot, int level) const;
  /// Total S_z quantum number of a basis state.
  double total_sz(int index) const;

private:
  std::vector<int> twos_;     // 2s per slot; slot 0 is the electron (2s = 1)
  std::vector<int> dims_;     // 2s + 1
  std::vector<int> strides_;
  int dim_ = 0;
};

struct SpinOperators {
  Matrix sx, sy, sz;
};

/// Spin matrices for spin number s (2s must be a nonnegative integer),
/// built from ladder-operator matrix elements. S_z is diagonal with
/// entries s, s-1, ..., -s in the level ordering of SpinSpace.
SpinOperators spin_operators(double s);

/// Embed a single-slot operator into the full tensor-product space,
/// acting as the identity on every other slot.
Matrix embed(const Matrix& op, int slot, const SpinSpace& space);

enum class CouplingModel { heisenberg, xyz };

/// Contact-coupling description: one delta-function spin-spin coupling per
/// scatterer, at positions x_1 = 0 < x_2 < ... Strengths are in units with
/// hbar = m* = 1 (a frequency times a length).
struct CouplingSpec {
  CouplingModel model = CouplingModel::heisenberg;
  std::vector<std::array<double, 3>> strengths;  // (J_x, J_y, J_z) per scatterer
  std::vector<double> positions;

  static CouplingSpec heisenberg(const std::vector<double>& j,
                                 const std::vector<double>& pos);
  static CouplingSpec xyz(const std::vector<std::array<double, 3>>& jxyz,
                          const std::vector<double>& pos);

  int scatterer_count() const { return static_cast<int>(positions.size()); }
  void validate() const;
};

/// Full-space coupling matrix sum_l J_l sigma_l (x) S_{j,l} for one
/// scatterer. Hermitian; real symmetric for all supported models.
Matrix coupling_matrix(const CouplingSpec& spec, int scatterer,
                       const SpinSpace& space);

/// Rank-1 projectors onto the maximally entangled m_total = 0 pair states
/// of the (electron, scatterer-1) two-qubit space:
/// psi_plus  = (|ud> + |du>)/sqrt(2)   (triplet, m = 0)
/// psi_minus = (|ud> - |du>)/sqrt(2)   (singlet)
struct PairProjectors {
  Eigen::Matrix4cd psi_plus, psi_minus;
};

PairProjectors singlet_triplet_projectors();

}  // namespace spinwire
