#include "spinwire/spin_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace spinwire {

namespace {

int twice_spin(double s) {
  const double twos = 2.0 * s;
  const double rounded = std::round(twos);
  if (std::abs(twos - rounded) > 1e-9 || rounded < 0) {
    throw std::invalid_argument("spin number must be a nonnegative half-integer");
  }
  return static_cast<int>(rounded);
}

}  // namespace

SpinSpace::SpinSpace(const std::vector<double>& scatterer_spins) {
  twos_.push_back(1);  // electron
  for (double s : scatterer_spins) {
    const int t = twice_spin(s);
    if (t < 1) throw std::invalid_argument("scatterer spin must be >= 1/2");
    twos_.push_back(t);
  }
  dim_ = 1;
  for (int t : twos_) {
    dims_.push_back(t + 1);
    dim_ *= t + 1;
  }
  strides_.assign(twos_.size(), 1);
  for (int i = slots() - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * dims_[i + 1];
  }
}

int SpinSpace::local_dim(int slot) const {
  if (slot < 0 || slot >= slots()) throw std::out_of_range("slot out of range");
  return dims_[slot];
}

double SpinSpace::spin(int slot) const {
  if (slot < 0 || slot >= slots()) throw std::out_of_range("slot out of range");
  return 0.5 * twos_[slot];
}

int SpinSpace::index_of(const std::vector<int>& levels) const {
  if (static_cast<int>(levels.size()) != slots()) {
    throw std::invalid_argument("level tuple has wrong number of slots");
  }
  int idx = 0;
  for (int i = 0; i < slots(); ++i) {
    if (levels[i] < 0 || levels[i] >= dims_[i]) {
      throw std::out_of_range("level out of range");
    }
    idx += levels[i] * strides_[i];
  }
  return idx;
}

std::vector<int> SpinSpace::levels_of(int index) const {
  if (index < 0 || index >= dim_) throw std::out_of_range("basis index out of range");
  std::vector<int> levels(slots());
  for (int i = 0; i < slots(); ++i) {
    levels[i] = index / strides_[i];
    index -= levels[i] * strides_[i];
  }
  return levels;
}

double SpinSpace::m_value(int slot, int level) const {
  if (level < 0 || level >= local_dim(slot)) throw std::out_of_range("level out of range");
  return spin(slot) - level;
}

double SpinSpace::total_sz(int index) const {
  const auto levels = levels_of(index);
  double m = 0;
  for (int i = 0; i < slots(); ++i) m += m_value(i, levels[i]);
  return m;
}

SpinOperators spin_operators(double s) {
  const int twos = twice_spin(s);
  const int n = twos + 1;
  Matrix sp = Matrix::Zero(n, n);
  Matrix sz = Matrix::Zero(n, n);
  for (int level = 0; level < n; ++level) {
    const double m = s - level;
    sz(level, level) = m;
    if (level > 0) {
      // <m+1| S+ |m>, acting on level -> level-1 in descending-m ordering
      sp(level - 1, level) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
  }
  const Matrix sm = sp.adjoint();
  SpinOperators ops;
  ops.sx = 0.5 * (sp + sm);
  ops.sy = Complex(0, -0.5) * (sp - sm);
  ops.sz = sz;
  return ops;
}

Matrix embed(const Matrix& op, int slot, const SpinSpace& space) {
  if (slot < 0 || slot >= space.slots()) throw std::out_of_range("slot out of range");
  const int d = space.local_dim(slot);
  if (op.rows() != d || op.cols() != d) {
    throw std::invalid_argument("operator dimension does not match slot");
  }
  const int dim = space.dim();
  Matrix out = Matrix::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    auto levels = space.levels_of(col);
    const int lc = levels[slot];
    for (int lr = 0; lr < d; ++lr) {
      const Complex v = op(lr, lc);
      if (v == Complex(0, 0)) continue;
      levels[slot] = lr;
      out(space.index_of(levels), col) = v;
    }
  }
  return out;
}

CouplingSpec CouplingSpec::heisenberg(const std::vector<double>& j,
                                      const std::vector<double>& pos) {
  CouplingSpec spec;
  spec.model = CouplingModel::heisenberg;
  for (double v : j) spec.strengths.push_back({v, v, v});
  spec.positions = pos;
  spec.validate();
  return spec;
}

CouplingSpec CouplingSpec::xyz(const std::vector<std::array<double, 3>>& jxyz,
                               const std::vector<double>& pos) {
  CouplingSpec spec;
  spec.model = CouplingModel::xyz;
  spec.strengths = jxyz;
  spec.positions = pos;
  spec.validate();
  return spec;
}

void CouplingSpec::validate() const {
  if (positions.empty()) throw std::invalid_argument("at least one scatterer required");
  if (strengths.size() != positions.size()) {
    throw std::invalid_argument("one strength entry required per scatterer");
  }
  if (positions.front() != 0.0) {
    throw std::invalid_argument("first scatterer must sit at x = 0");
  }
  for (size_t i = 1; i < positions.size(); ++i) {
    if (!(positions[i] > positions[i - 1])) {
      throw std::invalid_argument("scatterer positions must be strictly increasing");
    }
  }
  if (model == CouplingModel::heisenberg) {
    for (const auto& s : strengths) {
      if (s[0] != s[1] || s[1] != s[2]) {
        throw std::invalid_argument("heisenberg strengths must be isotropic");
      }
    }
  }
}

Matrix coupling_matrix(const CouplingSpec& spec, int scatterer,
                       const SpinSpace& space) {
  spec.validate();
  if (scatterer < 0 || scatterer >= spec.scatterer_count()) {
    throw std::out_of_range("scatterer index out of range");
  }
  if (space.scatterers() != spec.scatterer_count()) {
    throw std::invalid_argument("spin space does not match coupling spec");
  }
  const SpinOperators se = spin_operators(space.spin(0));
  const SpinOperators ss = spin_operators(space.spin(scatterer + 1));
  const std::array<const Matrix*, 3> e_ops{&se.sx, &se.sy, &se.sz};
  const std::array<const Matrix*, 3> s_ops{&ss.sx, &ss.sy, &ss.sz};

  Matrix out = Matrix::Zero(space.dim(), space.dim());
  for (int l = 0; l < 3; ++l) {
    const double j = spec.strengths[scatterer][l];
    if (j == 0.0) continue;
    out += j * (embed(*e_ops[l], 0, space) * embed(*s_ops[l], scatterer + 1, space));
  }
  return out;
}

PairProjectors singlet_triplet_projectors() {
  // Two-qubit basis order: uu, ud, du, dd (m descending in each slot).
  Eigen::Vector4cd plus, minus;
  const double r = 1.0 / std::sqrt(2.0);
  plus << 0, r, r, 0;
  minus << 0, r, -r, 0;
  PairProjectors p;
  p.psi_plus = plus * plus.adjoint();
  p.psi_minus = minus * minus.adjoint();
  return p;
}

}  // namespace spinwire
