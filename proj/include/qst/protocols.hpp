#pragma once

// Explicit state-transfer unitaries with their declared robustness subspaces, and the
// formula-level cost models for the GHZ-based protocols.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qst/operators.hpp"
#include "qst/tensor.hpp"

namespace qst {

struct CostRecord {
  double alpha = 0.0;
  // Named step durations; total is their sum.
  std::vector<std::pair<std::string, double>> terms;
  double total = 0.0;
  // False when alpha lies outside the range the scaling argument covers.
  bool in_regime = true;

  double term(std::string_view name) const;
};

struct ProtocolInstance {
  std::string name;
  DenseOperator unitary;
  LatticeConfig cfg;
  // Lives on cfg.ancilla_sites() (every site except the initial one, ascending).
  SubspaceBasis declared_subspace = SubspaceBasis::trivial();
  std::optional<CostRecord> cost;
};

// U = SWAP_{i,f} (Pi + H_i Pibar), with Pi the projector of `s_prime` on the middle sites
// (all sites except i and f, ascending). Declared subspace is s_prime (x) C^D on f.
ProtocolInstance build_saturating(const LatticeConfig& cfg, const SubspaceBasis& s_prime);

// Qudit form of the above. H is the Fourier transform for even D; for odd D it is the
// (D-1)-level Fourier on levels 0..D-2 so that H^dag Xtilde H stays diagonal.
ProtocolInstance build_qudit_saturating(const LatticeConfig& cfg, const SubspaceBasis& s_prime);

// Plain SWAP_{i,f}: state independent.
ProtocolInstance build_swap(const LatticeConfig& cfg);

// GHZ-bridge circuit on a chain with even L, transferring from site 0 to site L-1 when every
// ancilla starts in |0>.
ProtocolInstance build_fast_ghz(const LatticeConfig& cfg);

// Resets the rightmost qubit of each ancilla 3-group, then runs the GHZ bridge on the reset
// sublattice {0, 3, 6, ...}. Requires (L-1) divisible by 3.
ProtocolInstance build_symmetrized(const LatticeConfig& cfg);

// 3-qubit reset: symmetric states map to |0> (x) (2-qubit state).
DenseOperator build_u_reset();

// Appends the GHZ-bridge gate sequence on `sublattice` (ascending, first = source,
// last = target) to `u`, i.e. u <- circuit * u.
void append_ghz_bridge(const std::vector<int>& sublattice, int n_sites, Matrix& u);

// Bridging protocol cost: 2 (t_GHZ + t'_GHZ + t_direct) with t_GHZ = t'_GHZ = (beta ln L)^kappa
// and t_direct = L^(alpha - 2 beta).
CostRecord bridging_cost(double sites, double alpha, double beta, double kappa);

// Sublattice protocol cost M^alpha (ln L)^kappa.
CostRecord sublattice_cost(double sites, double spacing, double alpha, double kappa);
// Matching lower-bound scaling sqrt(M) L^(alpha - 2).
double sublattice_lower_bound(double sites, double spacing, double alpha);

}  // namespace qst
