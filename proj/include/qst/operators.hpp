#pragma once

// Standard single- and few-site operators, ancilla subspaces, and GHZ encoders.

#include <vector>

#include "qst/tensor.hpp"

namespace qst {

// Clock/shift operators for one D-level site, plus the anticommuting pair used for
// commutator bounds.
//
// Even D:  x_tilde = X^(D/2), z_partner = Z.
// Odd D:   x_tilde and z_partner are the (D-1)-level pair (X^((D-1)/2), Z) acting on
//          levels 0..D-2, extended by identity on level D-1. Their commutator vanishes on
//          level D-1, so y_tilde has exactly one zero eigenvalue.
struct QuditPauliSet {
  int local_dim = 2;
  Complex omega;        // exp(2 pi i / D)
  Matrix x;             // X|j> = |j+1 mod D>
  Matrix z;             // Z|j> = omega^j |j>
  Matrix x_tilde;
  Matrix z_partner;
  Matrix y_tilde;       // [x_tilde, z_partner] / 2
  Matrix basis_change;  // Fourier on the active block, so basis_change^dag x_tilde basis_change is diagonal
};

QuditPauliSet make_pauli_set(int local_dim);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// D = 2: the qubit Hadamard. D > 2: the Fourier matrix F[j,k] = omega^(-jk)/sqrt(D),
// so that H Z H^dag = X.
DenseOperator hadamard(int local_dim);

Matrix swap_gate(int local_dim);
Matrix cnot_gate();
// diag(1, 1, 1, exp(i angle)) on two qubits.
Matrix controlled_phase_gate(double angle);

// Orthonormal basis of an ancilla subspace, stored as columns.
class SubspaceBasis {
 public:
  // Throws ValidationError unless the columns are orthonormal within 1e-10.
  SubspaceBasis(Index ambient_dim, Matrix vectors);

  // The one-dimensional space of an empty register.
  static SubspaceBasis trivial();
  static SubspaceBasis empty(Index ambient_dim);

  Index ambient_dim() const { return ambient_dim_; }
  Index dim() const { return vectors_.cols(); }
  const Matrix& vectors() const { return vectors_; }
  Vector vector(Index k) const { return vectors_.col(k); }

  Matrix projector() const;
  // Largest entry of |G - I| for the Gram matrix G.
  double gram_defect() const;
  // Norm of the component of `v` orthogonal to the subspace.
  double residual(const Vector& v) const;

 private:
  Index ambient_dim_ = 1;
  Matrix vectors_;
};

SubspaceBasis projector_all_zero(int n_sites, int local_dim);
SubspaceBasis projector_full(int n_sites, int local_dim);
// Span of products of per-group symmetric states over consecutive 3-qubit groups.
SubspaceBasis projector_symmetric_groups(int n_sites);
// Orthonormalized span; vectors with relative residual below 1e-8 are dropped.
SubspaceBasis projector_span(const std::vector<Vector>& vectors);

// The four 3-qubit Dicke states |D_0> .. |D_3>.
std::vector<Vector> dicke_states3();

// CNOT cascade from site 0 onto sites 1..n-1 of an n-qubit register.
DenseOperator ghz_encoder(int n_sites);

}  // namespace qst
