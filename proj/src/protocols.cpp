#include "qst/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qst/errors.hpp"

namespace qst {

double CostRecord::term(std::string_view name) const {
  for (const auto& [key, value] : terms) {
    if (key == name) return value;
  }
  throw ValidationError("cost record has no term '" + std::string(name) + "'");
}

namespace {

void require_qubit_chain(const LatticeConfig& cfg, const char* what) {
  cfg.validate();
  if (cfg.local_dim != 2) throw ValidationError(std::string(what) + ": qubits only (D = 2)");
  if (cfg.initial != 0 || cfg.final != cfg.sites - 1) {
    throw ValidationError(std::string(what) + ": expects transfer from site 0 to site L-1");
  }
}

// Position of each site of `sites` inside the ancilla register (ancilla_sites order).
std::vector<int> ancilla_positions(const LatticeConfig& cfg, const std::vector<int>& sites) {
  const auto anc = cfg.ancilla_sites();
  std::vector<int> out;
  out.reserve(sites.size());
  for (int s : sites) {
    const auto it = std::find(anc.begin(), anc.end(), s);
    if (it == anc.end()) throw ValidationError("site is not an ancilla site");
    out.push_back(static_cast<int>(it - anc.begin()));
  }
  return out;
}

ProtocolInstance saturating_impl(const LatticeConfig& cfg, const SubspaceBasis& s_prime,
                                 const Matrix& basis_change, std::string name) {
  cfg.validate();
  const int n = cfg.sites;
  const int d = cfg.local_dim;
  const auto middle = cfg.middle_sites();
  if (s_prime.ambient_dim() != register_dim(n - 2, d)) {
    throw ValidationError("S_prime must live on the " + std::to_string(n - 2) +
                          " sites other than the initial and final ones");
  }
  const Index dim = cfg.total_dim();

  const Matrix pi = embed_at_sites(s_prime.projector(), middle, n, d);
  Matrix u = Matrix::Identity(dim, dim) - pi;
  apply_at_sites(basis_change, {cfg.initial}, n, d, u);
  u += pi;
  apply_at_sites(swap_gate(d), {cfg.initial, cfg.final}, n, d, u);

  // Declared subspace: S' on the middle sites times anything on f.
  const auto mid_pos = ancilla_positions(cfg, middle);
  const auto f_pos = ancilla_positions(cfg, {cfg.final});
  const Index anc_dim = register_dim(n - 1, d);
  Matrix declared(anc_dim, s_prime.dim() * d);
  for (Index k = 0; k < s_prime.dim(); ++k) {
    for (int b = 0; b < d; ++b) {
      declared.col(k * d + b) =
          place_product(s_prime.vector(k), mid_pos, basis_vector(d, b), f_pos, n - 1, d);
    }
  }

  ProtocolInstance out;
  out.name = std::move(name);
  out.unitary = DenseOperator::unitary(std::move(u), out.name);
  out.cfg = cfg;
  out.declared_subspace = SubspaceBasis(anc_dim, std::move(declared));
  return out;
}

void apply_gate(const Matrix& gate, const std::vector<int>& sites, int n, Matrix& u) {
  apply_at_sites(gate, sites, n, 2, u);
}

// CNOTs from `control` onto each of `targets`; self-inverse up to ordering.
void encode(int control, const std::vector<int>& targets, int n, Matrix& u) {
  for (int t : targets) apply_gate(cnot_gate(), {control, t}, n, u);
}

void decode(int control, const std::vector<int>& targets, int n, Matrix& u) {
  for (auto it = targets.rbegin(); it != targets.rend(); ++it) {
    apply_gate(cnot_gate(), {control, *it}, n, u);
  }
}

}  // namespace

ProtocolInstance build_saturating(const LatticeConfig& cfg, const SubspaceBasis& s_prime) {
  cfg.validate();
  if (cfg.local_dim != 2) throw ValidationError("build_saturating: qubits only, use the qudit form");
  return saturating_impl(cfg, s_prime, hadamard(2).matrix(), "saturating");
}

ProtocolInstance build_qudit_saturating(const LatticeConfig& cfg, const SubspaceBasis& s_prime) {
  cfg.validate();
  const auto paulis = make_pauli_set(cfg.local_dim);
  return saturating_impl(cfg, s_prime, paulis.basis_change, "qudit-saturating");
}

ProtocolInstance build_swap(const LatticeConfig& cfg) {
  cfg.validate();
  const Index dim = cfg.total_dim();
  Matrix u = Matrix::Identity(dim, dim);
  apply_at_sites(swap_gate(cfg.local_dim), {cfg.initial, cfg.final}, cfg.sites, cfg.local_dim, u);
  ProtocolInstance out;
  out.name = "swap";
  out.unitary = DenseOperator::unitary(std::move(u), out.name);
  out.cfg = cfg;
  out.declared_subspace = projector_full(cfg.sites - 1, cfg.local_dim);
  return out;
}

void append_ghz_bridge(const std::vector<int>& sublattice, int n_sites, Matrix& u) {
  if (sublattice.size() < 2) throw ValidationError("GHZ bridge needs at least two sites");
  if (!std::is_sorted(sublattice.begin(), sublattice.end())) {
    throw ValidationError("GHZ bridge sublattice must be ascending");
  }
  const auto half = static_cast<std::ptrdiff_t>(sublattice.size() / 2);
  const std::vector<int> left(sublattice.begin(), sublattice.begin() + half);
  const std::vector<int> right(sublattice.begin() + half, sublattice.end());
  const int src = left.front();
  const int dst = right.back();
  const std::vector<int> left_rest(left.begin() + 1, left.end());
  const std::vector<int> right_rest(right.begin(), right.end() - 1);

  const Matrix h = hadamard(2).matrix();
  const Matrix cp = controlled_phase_gate(std::numbers::pi /
                                          static_cast<double>(left.size() * right.size()));
  auto phases = [&] {
    for (int a : left) {
      for (int b : right) apply_gate(cp, {a, b}, n_sites, u);
    }
  };

  encode(src, left_rest, n_sites, u);
  apply_gate(h, {dst}, n_sites, u);
  encode(dst, right_rest, n_sites, u);
  phases();
  // Logical Hadamard on the right block.
  decode(dst, right_rest, n_sites, u);
  apply_gate(h, {dst}, n_sites, u);
  encode(dst, right_rest, n_sites, u);

  // Mirror the construction to leave the state on dst alone.
  decode(src, left_rest, n_sites, u);
  apply_gate(h, {src}, n_sites, u);
  encode(src, left_rest, n_sites, u);
  phases();
  decode(src, left_rest, n_sites, u);
  apply_gate(h, {src}, n_sites, u);
  decode(dst, right_rest, n_sites, u);
}

ProtocolInstance build_fast_ghz(const LatticeConfig& cfg) {
  require_qubit_chain(cfg, "build_fast_ghz");
  if (cfg.sites % 2 != 0) throw ValidationError("build_fast_ghz: L must be even");
  std::vector<int> sub(static_cast<size_t>(cfg.sites));
  for (int s = 0; s < cfg.sites; ++s) sub[static_cast<size_t>(s)] = s;
  const Index dim = cfg.total_dim();
  Matrix u = Matrix::Identity(dim, dim);
  append_ghz_bridge(sub, cfg.sites, u);

  ProtocolInstance out;
  out.name = "fast-ghz";
  out.unitary = DenseOperator::unitary(std::move(u), out.name);
  out.cfg = cfg;
  out.declared_subspace = projector_all_zero(cfg.sites - 1, 2);
  return out;
}

DenseOperator build_u_reset() {
  const double s2 = std::sqrt(2.0);
  const double s3 = std::sqrt(3.0);
  const double s6 = std::sqrt(6.0);
  struct Row {
    double amp[8];
    int out;
  };
  // Input amplitudes over |000>..|111>, then the output basis index.
  const Row rows[8] = {
      {{1, 0, 0, 0, 0, 0, 0, 0}, 0b000},
      {{0, 0, 0, 0, 0, 0, 0, 1}, 0b011},
      {{0, 1 / s3, 1 / s3, 0, 1 / s3, 0, 0, 0}, 0b001},
      {{0, 0, 0, 1 / s3, 0, 1 / s3, 1 / s3, 0}, 0b010},
      {{0, 1 / s6, -2 / s6, 0, 1 / s6, 0, 0, 0}, 0b100},
      {{0, 0, 0, 1 / s6, 0, -2 / s6, 1 / s6, 0}, 0b101},
      {{0, 1 / s2, 0, 0, -1 / s2, 0, 0, 0}, 0b110},
      {{0, 0, 0, 1 / s2, 0, 0, -1 / s2, 0}, 0b111},
  };
  Matrix u = Matrix::Zero(8, 8);
  for (const auto& row : rows) {
    for (int c = 0; c < 8; ++c) u(row.out, c) += row.amp[c];
  }
  return DenseOperator::unitary(std::move(u), "U_reset");
}

ProtocolInstance build_symmetrized(const LatticeConfig& cfg) {
  require_qubit_chain(cfg, "build_symmetrized");
  if ((cfg.sites - 1) % 3 != 0) {
    throw ValidationError("build_symmetrized: L-1 must be divisible by 3");
  }
  const int n = cfg.sites;
  const Index dim = cfg.total_dim();
  const Matrix reset = build_u_reset().matrix();
  Matrix u = Matrix::Identity(dim, dim);
  std::vector<int> sub{cfg.initial};
  for (int g = 1; g + 2 < n; g += 3) {
    // Listing the group right to left makes the reset act on its rightmost qubit.
    apply_gate(reset, {g + 2, g + 1, g}, n, u);
    sub.push_back(g + 2);
  }
  append_ghz_bridge(sub, n, u);

  ProtocolInstance out;
  out.name = "symmetrized";
  out.unitary = DenseOperator::unitary(std::move(u), out.name);
  out.cfg = cfg;
  out.declared_subspace = projector_symmetric_groups(n - 1);
  return out;
}

CostRecord bridging_cost(double sites, double alpha, double beta, double kappa) {
  if (!(sites >= 1.0)) throw ValidationError("bridging_cost: L must be >= 1");
  if (!(beta > 0.0)) throw ValidationError("bridging_cost: beta must be positive");
  if (!(alpha > 0.0) || !(kappa >= 0.0)) {
    throw ValidationError("bridging_cost: alpha must be positive and kappa nonnegative");
  }
  const double t_ghz = std::pow(beta * std::log(sites), kappa);
  const double t_direct = std::pow(sites, alpha - 2.0 * beta);
  CostRecord rec;
  rec.alpha = alpha;
  rec.terms = {{"t_GHZ", t_ghz},          {"t_GHZ_prime", t_ghz},
               {"t_direct", t_direct},    {"undo_t_GHZ", t_ghz},
               {"undo_t_GHZ_prime", t_ghz}, {"undo_t_direct", t_direct}};
  for (const auto& [name, value] : rec.terms) rec.total += value;
  rec.in_regime = alpha > 1.5 && alpha < 2.0;
  return rec;
}

CostRecord sublattice_cost(double sites, double spacing, double alpha, double kappa) {
  if (!(spacing >= 1.0) || !(sites > spacing)) {
    throw ValidationError("sublattice_cost: need M >= 1 and L > M");
  }
  if (!(alpha > 0.0) || !(kappa >= 0.0)) {
    throw ValidationError("sublattice_cost: alpha must be positive and kappa nonnegative");
  }
  CostRecord rec;
  rec.alpha = alpha;
  const double t = std::pow(spacing, alpha) * std::pow(std::log(sites), kappa);
  rec.terms = {{"t_sublattice", t}};
  rec.total = t;
  rec.in_regime = alpha > 1.5 && alpha < 2.0;
  return rec;
}

double sublattice_lower_bound(double sites, double spacing, double alpha) {
  if (!(spacing >= 1.0) || !(sites > spacing)) {
    throw ValidationError("sublattice_lower_bound: need M >= 1 and L > M");
  }
  return std::sqrt(spacing) * std::pow(sites, alpha - 2.0);
}

}  // namespace qst
