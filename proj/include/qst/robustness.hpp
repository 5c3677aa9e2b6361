#pragma once

// Stabilizer extraction, transfer verification, robustness subspaces, commutator norms and
// their lower bounds.

#include <cstdint>
#include <vector>

#include "qst/operators.hpp"
#include "qst/protocols.hpp"
#include "qst/tensor.hpp"

namespace qst {

// S_x = X_i^dag (U^dag X_f U), S_z = Z_i^dag (U^dag Z_f U) with the full clock/shift operators.
struct StabilizerPair {
  DenseOperator s_x;
  DenseOperator s_z;
  LatticeConfig cfg;
};

// No check that U transfers anything; S_x, S_z are always unitary.
StabilizerPair extract_stabilizers(const DenseOperator& u, const LatticeConfig& cfg);

// max |X_i S_x - S_x^dag X_i| (qubits only).
double stabilizer_relation_defect(const StabilizerPair& pair);

// Mixed or pure ancilla state, held as an ensemble of normalized vectors.
class AncillaState {
 public:
  struct Component {
    double weight;
    Vector state;
  };

  static AncillaState pure(const Vector& state);
  // Weights must be nonnegative and sum to 1; vectors must be normalized.
  static AncillaState mixture(const std::vector<double>& weights, const std::vector<Vector>& states);
  // Hermitian, PSD and unit trace within 1e-10.
  static AncillaState density(const Matrix& rho);
  static AncillaState uniform_mixture(const std::vector<Vector>& states);
  static AncillaState uniform_mixture(const SubspaceBasis& basis);

  Index dim() const { return dim_; }
  const std::vector<Component>& components() const { return components_; }
  Matrix density_matrix() const;

 private:
  Index dim_ = 0;
  std::vector<Component> components_;
};

// Single-site probe states: basis states plus (|a>+|b>)/sqrt2 and (|a>+i|b>)/sqrt2 for a < b.
std::vector<Vector> transfer_test_states(int local_dim);

struct TransferResult {
  bool pass = false;
  double worst_fidelity = 0.0;
};

TransferResult verify_transfer(const DenseOperator& u, const AncillaState& ancilla,
                               const LatticeConfig& cfg, double tol);

// Ancilla vectors stabilized by both S_x and S_z (the robust subspace), or by S_x alone.
// Singular values below tol * sqrt(ancilla dim) count as zero. Every returned vector is
// re-verified by transfer fidelity at 1e-8; a mismatch raises NumericalError.
SubspaceBasis robustness_subspace(const DenseOperator& u, const LatticeConfig& cfg,
                                  double tol = 1e-8);
SubspaceBasis stabilized_subspace_x(const DenseOperator& u, const LatticeConfig& cfg,
                                    double tol = 1e-8);

// || [U^dag Xtilde_f U, Ztilde_i] ||_p.
double commutator_norm(const DenseOperator& u, const LatticeConfig& cfg, SchattenP p);
// Same, sharing one singular value decomposition over all p.
std::vector<double> commutator_norms(const DenseOperator& u, const LatticeConfig& cfg,
                                     const std::vector<SchattenP>& ps);

enum class BoundVariant { qubit, qudit_even, qudit_odd, channel, measurement };

const char* to_string(BoundVariant v);
BoundVariant parse_bound_variant(std::string_view text);
// qubit for D = 2, otherwise the parity-matched qudit form.
BoundVariant default_variant(int local_dim);

struct BoundQuery {
  int sites = 2;
  // |S|; a double so that 2^k stays exact for large registers.
  double dim_s = 1.0;
  SchattenP p = SchattenP::infinity();
  int local_dim = 2;
  BoundVariant variant = BoundVariant::qubit;
  double reg_dim = 1.0;
  std::vector<std::int64_t> m_list;

  void validate() const;
};

struct BoundFactors {
  double base = 0.0;               // qubit or qudit value
  double reg_factor = 1.0;         // reg_dim^(-1/p)
  double measurement_factor = 1.0; // prod m_i^(1/p)
  double value = 0.0;
};

BoundFactors theorem1_bound_factors(const BoundQuery& q);
double theorem1_bound(const BoundQuery& q);

struct SaturationRow {
  SchattenP p;
  double actual = 0.0;
  double bound = 0.0;
  double gap = 0.0;  // actual - bound
  bool pass = false; // |gap| <= tol
};

struct SaturationReport {
  Index computed_dim = 0;
  std::vector<SaturationRow> rows;  // ascending p
  bool all_pass() const;
};

SaturationReport saturation_check(const ProtocolInstance& protocol, std::vector<SchattenP> ps,
                                  double tol = 1e-9);

// max |[X_i S_x, Z_i] + 2i He(Y_i S_x)| (qubits only).
double lemma_s1_check(const DenseOperator& u, const LatticeConfig& cfg);

struct ConvexityResult {
  std::vector<double> component_fidelities;
  double mixture_fidelity = 0.0;
  bool components_pass = false;
  bool mixture_pass = false;
  bool consistent() const { return components_pass == mixture_pass; }
};

ConvexityResult convexity_check(const DenseOperator& u, const LatticeConfig& cfg,
                                const std::vector<Vector>& ancillas, double tol = 1e-9);

// V = Y_i S_x (qubits only).
DenseOperator v_operator(const StabilizerPair& pair);
// Phases of V's eigenvalues.
std::vector<double> v_phases(const StabilizerPair& pair);
// 2 (sum_k |cos theta_k|^p / dim)^(1/p); max |cos| at p = infinity.
double commutator_norm_from_phases(const std::vector<double>& phases, SchattenP p);
// Number of phases within tol of 0 and of pi.
struct PhaseCounts {
  Index plus_one = 0;
  Index minus_one = 0;
};
PhaseCounts count_real_phases(const std::vector<double>& phases, double tol = 1e-8);

// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
DenseOperator random_unitary(Index dim, std::uint64_t seed);

}  // namespace qst
