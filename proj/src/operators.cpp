#include "qst/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qst/errors.hpp"

namespace qst {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix shift(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m((j + 1) % d, j) = 1.0;
  return m;
}

Matrix clock(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  return m;
}

Matrix fourier(int d) {
  Matrix m(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      m(j, k) = std::polar(norm, -2.0 * std::numbers::pi * ((j * k) % d) / d);
    }
  }
  return m;
}

Matrix matrix_power(const Matrix& m, int n) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int k = 0; k < n; ++k) out = out * m;
  return out;
}

// Block-diagonal embedding: `block` on the leading levels, identity on the rest.
Matrix pad_identity(const Matrix& block, int d) {
  Matrix m = Matrix::Identity(d, d);
  m.topLeftCorner(block.rows(), block.cols()) = block;
  return m;
}

}  // namespace

Matrix pauli_x() { return shift(2); }

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

Matrix pauli_z() { return clock(2).real().cast<Complex>(); }

QuditPauliSet make_pauli_set(int local_dim) {
  if (local_dim < 2) throw ValidationError("make_pauli_set: D must be >= 2");
  QuditPauliSet set;
  set.local_dim = local_dim;
  set.omega = std::polar(1.0, 2.0 * std::numbers::pi / local_dim);
  set.x = shift(local_dim);
  set.z = local_dim == 2 ? pauli_z() : clock(local_dim);
  if (local_dim % 2 == 0) {
    set.x_tilde = matrix_power(set.x, local_dim / 2);
    set.z_partner = set.z;
    set.basis_change = local_dim == 2 ? hadamard(2).matrix() : fourier(local_dim);
  } else {
    const int active = local_dim - 1;
    const Matrix active_x = matrix_power(shift(active), active / 2);
    const Matrix active_z = active == 2 ? pauli_z() : clock(active);
    set.x_tilde = pad_identity(active_x, local_dim);
    set.z_partner = pad_identity(active_z, local_dim);
    set.basis_change =
        pad_identity(active == 2 ? hadamard(2).matrix() : fourier(active), local_dim);
  }
  set.y_tilde = 0.5 * (set.x_tilde * set.z_partner - set.z_partner * set.x_tilde);
  return set;
}

DenseOperator hadamard(int local_dim) {
  if (local_dim < 2) throw ValidationError("hadamard: D must be >= 2");
  if (local_dim == 2) {
    Matrix h(2, 2);
    const double s = 1.0 / std::numbers::sqrt2;
    h << s, s, s, -s;
    return DenseOperator::unitary(std::move(h), "H");
  }
  return DenseOperator::unitary(fourier(local_dim), "F" + std::to_string(local_dim));
}

Matrix swap_gate(int local_dim) {
  const int d2 = local_dim * local_dim;
  Matrix m = Matrix::Zero(d2, d2);
  for (int a = 0; a < local_dim; ++a) {
    for (int b = 0; b < local_dim; ++b) m(b * local_dim + a, a * local_dim + b) = 1.0;
  }
  return m;
}

Matrix cnot_gate() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(3, 2) = 1.0;
  m(2, 3) = 1.0;
  return m;
}

Matrix controlled_phase_gate(double angle) {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = std::polar(1.0, angle);
  return m;
}

// ---- SubspaceBasis ----------------------------------------------------------

SubspaceBasis::SubspaceBasis(Index ambient_dim, Matrix vectors)
    : ambient_dim_(ambient_dim), vectors_(std::move(vectors)) {
  if (ambient_dim_ < 1) throw ValidationError("SubspaceBasis: ambient dimension must be >= 1");
  if (vectors_.cols() == 0) vectors_.resize(ambient_dim_, 0);
  if (vectors_.rows() != ambient_dim_) {
    throw ValidationError("SubspaceBasis: vector length does not match ambient dimension");
  }
  if (vectors_.cols() > ambient_dim_) throw ValidationError("SubspaceBasis: too many vectors");
  if (!(gram_defect() <= 1e-10)) throw ValidationError("SubspaceBasis: vectors are not orthonormal");
}

SubspaceBasis SubspaceBasis::trivial() { return SubspaceBasis(1, Matrix::Identity(1, 1)); }

SubspaceBasis SubspaceBasis::empty(Index ambient_dim) {
  return SubspaceBasis(ambient_dim, Matrix(ambient_dim, 0));
}

Matrix SubspaceBasis::projector() const { return vectors_ * vectors_.adjoint(); }

double SubspaceBasis::gram_defect() const {
  if (vectors_.cols() == 0) return 0.0;
  const Matrix gram = vectors_.adjoint() * vectors_;
  return max_abs_diff(gram, Matrix::Identity(gram.rows(), gram.cols()));
}

double SubspaceBasis::residual(const Vector& v) const {
  if (v.size() != ambient_dim_) throw ValidationError("residual: dimension mismatch");
  if (vectors_.cols() == 0) return v.norm();
  return (v - vectors_ * (vectors_.adjoint() * v)).norm();
}

SubspaceBasis projector_all_zero(int n_sites, int local_dim) {
  if (n_sites < 1) throw ValidationError("projector_all_zero: need at least one site");
  const Index dim = register_dim(n_sites, local_dim);
  return SubspaceBasis(dim, basis_vector(dim, 0));
}

SubspaceBasis projector_full(int n_sites, int local_dim) {
  if (n_sites < 0) throw ValidationError("projector_full: negative site count");
  const Index dim = register_dim(n_sites, local_dim);
  return SubspaceBasis(dim, Matrix::Identity(dim, dim));
}

std::vector<Vector> dicke_states3() {
  const double s3 = 1.0 / std::sqrt(3.0);
  std::vector<Vector> out(4, Vector::Zero(8));
  out[0](0b000) = 1.0;
  out[1](0b001) = s3;
  out[1](0b010) = s3;
  out[1](0b100) = s3;
  out[2](0b011) = s3;
  out[2](0b101) = s3;
  out[2](0b110) = s3;
  out[3](0b111) = 1.0;
  return out;
}

SubspaceBasis projector_symmetric_groups(int n_sites) {
  if (n_sites < 3 || n_sites % 3 != 0) {
    throw ValidationError("projector_symmetric_groups: site count must be a positive multiple of 3");
  }
  const Index ambient = register_dim(n_sites, 2);
  const auto dicke = dicke_states3();
  const int groups = n_sites / 3;

  // Products of per-group Dicke states, first group most significant.
  Matrix basis = Matrix::Ones(1, 1);
  for (int g = 0; g < groups; ++g) {
    Matrix next(basis.rows() * 8, basis.cols() * 4);
    for (Index c = 0; c < basis.cols(); ++c) {
      for (int k = 0; k < 4; ++k) {
        Vector col(basis.rows() * 8);
        for (Index r = 0; r < basis.rows(); ++r) col.segment(r * 8, 8) = basis(r, c) * dicke[k];
        next.col(c * 4 + k) = col;
      }
    }
    basis = std::move(next);
  }
  return SubspaceBasis(ambient, std::move(basis));
}

SubspaceBasis projector_span(const std::vector<Vector>& vectors) {
  if (vectors.empty()) throw ValidationError("projector_span: empty input");
  const Index ambient = vectors.front().size();
  std::vector<Vector> kept;
  for (const auto& v : vectors) {
    if (v.size() != ambient) throw ValidationError("projector_span: mixed vector lengths");
    const double norm = v.norm();
    if (norm == 0.0) continue;
    Vector r = v / norm;
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) r -= q.dot(r) * q;
    }
    const double res = r.norm();
    if (res < 1e-8) continue;
    kept.push_back(r / res);
  }
  if (kept.empty()) throw ValidationError("projector_span: all input vectors are zero");
  Matrix basis(ambient, static_cast<Index>(kept.size()));
  for (size_t k = 0; k < kept.size(); ++k) basis.col(static_cast<Index>(k)) = kept[k];
  return SubspaceBasis(ambient, std::move(basis));
}

DenseOperator ghz_encoder(int n_sites) {
  if (n_sites < 1) throw ValidationError("ghz_encoder: need at least one site");
  const Index dim = register_dim(n_sites, 2);
  const Index top = dim / 2;
  Matrix m = Matrix::Zero(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    // Control is the most significant bit; when set, flip every other bit.
    const Index r = (c & top) ? (c ^ (top - 1)) : c;
    m(r, c) = 1.0;
  }
  return DenseOperator::unitary(std::move(m), "GHZ" + std::to_string(n_sites));
}

}  // namespace qst
