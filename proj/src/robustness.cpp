#include "qst/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qst/errors.hpp"

namespace qst {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_unitary_on(const DenseOperator& u, const LatticeConfig& cfg, const char* what) {
  cfg.validate();
  if (u.dim() != cfg.total_dim()) {
    throw ValidationError(std::string(what) + ": operator dimension " + std::to_string(u.dim()) +
                          " does not match D^L = " + std::to_string(cfg.total_dim()));
  }
  if (!u.is_unitary() && unitarity_defect(u.matrix()) > 1e-10) {
    throw ValidationError(std::string(what) + ": operator is not unitary");
  }
}

// U^dag (op on f) U.
Matrix pull_back(const DenseOperator& u, const Matrix& op, const LatticeConfig& cfg) {
  Matrix t = u.matrix();
  apply_at_sites(op, {cfg.final}, cfg.sites, cfg.local_dim, t);
  return u.matrix().adjoint() * t;
}

Index site_stride(const LatticeConfig& cfg, int site) {
  return register_dim(cfg.sites - 1 - site, cfg.local_dim);
}

// Full-register index of |0>_i (x) |a>_anc for every ancilla basis index a.
std::vector<Index> ancilla_offsets(const LatticeConfig& cfg) {
  const Index anc_dim = register_dim(cfg.sites - 1, cfg.local_dim);
  const Index stride_i = site_stride(cfg, cfg.initial);
  std::vector<Index> out(static_cast<size_t>(anc_dim));
  for (Index a = 0; a < anc_dim; ++a) {
    // Ancilla digits are the full digits with site i removed: split a at site i's position.
    const Index high = a / stride_i;
    const Index low = a % stride_i;
    out[static_cast<size_t>(a)] = high * stride_i * cfg.local_dim + low;
  }
  return out;
}

Vector joint_state(const Vector& psi, const Vector& phi, const LatticeConfig& cfg) {
  return place_product(psi, {cfg.initial}, phi, cfg.ancilla_sites(), cfg.sites, cfg.local_dim);
}

// Null space of the stacked maps Phi -> (S - I)(|j> (x) Phi) over every S in `stabs`.
SubspaceBasis stabilized_subspace(const std::vector<const Matrix*>& stabs,
                                  const LatticeConfig& cfg, double tol) {
  const int d = cfg.local_dim;
  const Index dim = cfg.total_dim();
  const Index anc_dim = register_dim(cfg.sites - 1, d);
  const auto offsets = ancilla_offsets(cfg);
  const Index stride_i = site_stride(cfg, cfg.initial);

  const Index blocks = static_cast<Index>(stabs.size()) * d;
  Matrix stacked(blocks * dim, anc_dim);
  Index block = 0;
  for (const Matrix* s : stabs) {
    for (int j = 0; j < d; ++j, ++block) {
      for (Index a = 0; a < anc_dim; ++a) {
        const Index col = offsets[static_cast<size_t>(a)] + j * stride_i;
        auto dst = stacked.block(block * dim, a, dim, 1);
        dst = s->col(col);
        dst(col, 0) -= 1.0;
      }
    }
  }

  Eigen::HouseholderQR<Matrix> qr(stacked);
  const Matrix r = qr.matrixQR().topRows(anc_dim).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<Matrix> bdc(r, Eigen::ComputeFullV);
  Eigen::VectorXd sv = bdc.singularValues();
  Matrix v = bdc.matrixV();
  if (!sv.allFinite() || !v.allFinite()) {
    // Eigen 3.4.0 BDCSVD occasionally emits NaN; Jacobi is slow but sound.
    Eigen::JacobiSVD<Matrix> jac(r, Eigen::ComputeFullV);
    sv = jac.singularValues();
    v = jac.matrixV();
  }
  if (!sv.allFinite() || !v.allFinite()) throw NumericalError("singular value decomposition returned non-finite values");
  const double cut = tol * std::sqrt(static_cast<double>(anc_dim));
  std::vector<Index> null_cols;
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) < cut) null_cols.push_back(k);
  }
  Matrix basis(anc_dim, static_cast<Index>(null_cols.size()));
  for (size_t k = 0; k < null_cols.size(); ++k) {
    basis.col(static_cast<Index>(k)) = v.col(null_cols[k]);
  }
  return SubspaceBasis(anc_dim, std::move(basis));
}

// [A, diag(z)] entrywise: C(r, c) = A(r, c) (z_c - z_r).
Matrix commutator_with_diagonal(const Matrix& a, const Vector& z) {
  Matrix c(a.rows(), a.cols());
  for (Index col = 0; col < a.cols(); ++col) {
    for (Index row = 0; row < a.rows(); ++row) c(row, col) = a(row, col) * (z(col) - z(row));
  }
  return c;
}

// Diagonal of a diagonal single-site operator embedded at `site`.
Vector embedded_diagonal(const Matrix& local, int site, const LatticeConfig& cfg) {
  const Index dim = cfg.total_dim();
  const Index stride = site_stride(cfg, site);
  Vector z(dim);
  for (Index r = 0; r < dim; ++r) z(r) = local((r / stride) % cfg.local_dim, (r / stride) % cfg.local_dim);
  return z;
}

}  // namespace

StabilizerPair extract_stabilizers(const DenseOperator& u, const LatticeConfig& cfg) {
  check_unitary_on(u, cfg, "extract_stabilizers");
  const auto paulis = make_pauli_set(cfg.local_dim);
  Matrix sx = pull_back(u, paulis.x, cfg);
  apply_at_sites(paulis.x.adjoint(), {cfg.initial}, cfg.sites, cfg.local_dim, sx);
  Matrix sz = pull_back(u, paulis.z, cfg);
  apply_at_sites(paulis.z.adjoint(), {cfg.initial}, cfg.sites, cfg.local_dim, sz);
  return {DenseOperator::unitary_product(std::move(sx), "S_x"),
          DenseOperator::unitary_product(std::move(sz), "S_z"), cfg};
}

double stabilizer_relation_defect(const StabilizerPair& pair) {
  if (pair.cfg.local_dim != 2) throw ValidationError("stabilizer relation: qubits only");
  Matrix lhs = pair.s_x.matrix();
  apply_at_sites(pauli_x(), {pair.cfg.initial}, pair.cfg.sites, 2, lhs);
  // S_x^dag X_i = (X_i S_x)^dag.
  return max_abs_diff(lhs, lhs.adjoint());
}

// ---- ancilla states and transfer --------------------------------------------

AncillaState AncillaState::pure(const Vector& state) {
  if (state.size() == 0) throw ValidationError("ancilla state is empty");
  if (!(std::abs(state.norm() - 1.0) <= 1e-10)) throw ValidationError("ancilla state is not normalized");
  AncillaState out;
  out.dim_ = state.size();
  out.components_.push_back({1.0, state});
  return out;
}

AncillaState AncillaState::mixture(const std::vector<double>& weights,
                                   const std::vector<Vector>& states) {
  if (weights.size() != states.size() || states.empty()) {
    throw ValidationError("mixture: need matching, nonempty weights and states");
  }
  AncillaState out;
  out.dim_ = states.front().size();
  double total = 0.0;
  for (size_t k = 0; k < states.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw ValidationError("mixture: negative weight");
    if (states[k].size() != out.dim_) throw ValidationError("mixture: mixed dimensions");
    if (!(std::abs(states[k].norm() - 1.0) <= 1e-10)) {
      throw ValidationError("mixture: component is not normalized");
    }
    total += weights[k];
    if (weights[k] > 0.0) out.components_.push_back({weights[k], states[k]});
  }
  if (std::abs(total - 1.0) > 1e-10) throw ValidationError("mixture: weights do not sum to 1");
  return out;
}

AncillaState AncillaState::density(const Matrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw ValidationError("invalid density operator: not square");
  }
  if (!(hermiticity_defect(rho) <= 1e-10)) throw ValidationError("invalid density operator: not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-10) {
    throw ValidationError("invalid density operator: trace is not 1");
  }
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  if (es.info() != Eigen::Success) throw NumericalError("density eigendecomposition failed");
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("invalid density operator: not positive semidefinite");
  }
  AncillaState out;
  out.dim_ = rho.rows();
  for (Index k = 0; k < rho.rows(); ++k) {
    const double w = es.eigenvalues()(k);
    if (w > 1e-14) out.components_.push_back({w, es.eigenvectors().col(k)});
  }
  return out;
}

AncillaState AncillaState::uniform_mixture(const std::vector<Vector>& states) {
  const std::vector<double> weights(states.size(), states.empty() ? 0.0 : 1.0 / static_cast<double>(states.size()));
  return mixture(weights, states);
}

AncillaState AncillaState::uniform_mixture(const SubspaceBasis& basis) {
  std::vector<Vector> states;
  for (Index k = 0; k < basis.dim(); ++k) states.push_back(basis.vector(k));
  return uniform_mixture(states);
}

Matrix AncillaState::density_matrix() const {
  Matrix rho = Matrix::Zero(dim_, dim_);
  for (const auto& c : components_) rho += c.weight * c.state * c.state.adjoint();
  return rho;
}

std::vector<Vector> transfer_test_states(int local_dim) {
  if (local_dim < 2) throw ValidationError("transfer_test_states: D must be >= 2");
  std::vector<Vector> out;
  for (int a = 0; a < local_dim; ++a) out.push_back(basis_vector(local_dim, a));
  const double s = 1.0 / std::numbers::sqrt2;
  for (int a = 0; a < local_dim; ++a) {
    for (int b = a + 1; b < local_dim; ++b) {
      Vector plus = Vector::Zero(local_dim);
      plus(a) = s;
      plus(b) = s;
      out.push_back(plus);
      Vector plus_i = plus;
      plus_i(b) = s * kI;
      out.push_back(plus_i);
    }
  }
  return out;
}

TransferResult verify_transfer(const DenseOperator& u, const AncillaState& ancilla,
                               const LatticeConfig& cfg, double tol) {
  check_unitary_on(u, cfg, "verify_transfer");
  if (ancilla.dim() != register_dim(cfg.sites - 1, cfg.local_dim)) {
    throw ValidationError("verify_transfer: ancilla state dimension mismatch");
  }
  const auto& comps = ancilla.components();
  const Index dim = cfg.total_dim();
  TransferResult res;
  res.worst_fidelity = std::numeric_limits<double>::infinity();
  for (const auto& psi : transfer_test_states(cfg.local_dim)) {
    Matrix inputs(dim, static_cast<Index>(comps.size()));
    for (size_t c = 0; c < comps.size(); ++c) {
      inputs.col(static_cast<Index>(c)) = joint_state(psi, comps[c].state, cfg);
    }
    const Matrix outputs = u.matrix() * inputs;
    Matrix rho = Matrix::Zero(cfg.local_dim, cfg.local_dim);
    for (size_t c = 0; c < comps.size(); ++c) {
      rho += comps[c].weight *
             reduced_density(outputs.col(static_cast<Index>(c)), {cfg.final}, cfg.sites, cfg.local_dim);
    }
    const double fid = std::real(psi.dot(rho * psi));
    res.worst_fidelity = std::isnan(fid) ? fid : std::min(res.worst_fidelity, fid);
    if (std::isnan(fid)) break;
  }
  res.pass = res.worst_fidelity >= 1.0 - tol;
  return res;
}

SubspaceBasis robustness_subspace(const DenseOperator& u, const LatticeConfig& cfg, double tol) {
  const auto pair = extract_stabilizers(u, cfg);
  auto basis = stabilized_subspace({&pair.s_x.matrix(), &pair.s_z.matrix()}, cfg, tol);
  for (Index k = 0; k < basis.dim(); ++k) {
    const auto check = verify_transfer(u, AncillaState::pure(basis.vector(k)), cfg, 1e-8);
    if (!check.pass) {
      throw NumericalError("robust subspace vector " + std::to_string(k) +
                           " fails transfer (fidelity " + std::to_string(check.worst_fidelity) + ")");
    }
  }
  return basis;
}

SubspaceBasis stabilized_subspace_x(const DenseOperator& u, const LatticeConfig& cfg, double tol) {
  const auto pair = extract_stabilizers(u, cfg);
  return stabilized_subspace({&pair.s_x.matrix()}, cfg, tol);
}

// ---- commutator norms -------------------------------------------------------

std::vector<double> commutator_norms(const DenseOperator& u, const LatticeConfig& cfg,
                                     const std::vector<SchattenP>& ps) {
  check_unitary_on(u, cfg, "commutator_norm");
  const auto paulis = make_pauli_set(cfg.local_dim);
  const Matrix a = pull_back(u, paulis.x_tilde, cfg);
  const Vector z = embedded_diagonal(paulis.z_partner, cfg.initial, cfg);
  const auto sv = singular_values(commutator_with_diagonal(a, z));
  std::vector<double> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(schatten_norm_from_singular_values(sv, u.dim(), p));
  return out;
}

double commutator_norm(const DenseOperator& u, const LatticeConfig& cfg, SchattenP p) {
  return commutator_norms(u, cfg, {p}).front();
}

// ---- bounds -----------------------------------------------------------------

const char* to_string(BoundVariant v) {
  switch (v) {
    case BoundVariant::qubit: return "qubit";
    case BoundVariant::qudit_even: return "qudit-even";
    case BoundVariant::qudit_odd: return "qudit-odd";
    case BoundVariant::channel: return "channel";
    case BoundVariant::measurement: return "measurement";
  }
  return "?";
}

BoundVariant parse_bound_variant(std::string_view text) {
  for (auto v : {BoundVariant::qubit, BoundVariant::qudit_even, BoundVariant::qudit_odd,
                 BoundVariant::channel, BoundVariant::measurement}) {
    if (text == to_string(v)) return v;
  }
  throw ValidationError("unknown bound variant '" + std::string(text) + "'");
}

BoundVariant default_variant(int local_dim) {
  if (local_dim == 2) return BoundVariant::qubit;
  return local_dim % 2 == 0 ? BoundVariant::qudit_even : BoundVariant::qudit_odd;
}

void BoundQuery::validate() const {
  if (sites < 2) throw ValidationError("bound: L must be >= 2");
  if (local_dim < 2) throw ValidationError("bound: D must be >= 2");
  if (!(dim_s >= 1.0)) throw ValidationError("bound: |S| must be >= 1");
  const double max_log = (sites - 1) * std::log(static_cast<double>(local_dim));
  if (std::log(dim_s) > max_log + 1e-12) throw ValidationError("bound: |S| exceeds D^(L-1)");
  if (!(reg_dim >= 1.0)) throw ValidationError("bound: register dimension must be >= 1");
  double m_prod = 1.0;
  for (auto m : m_list) {
    if (m < 2) throw ValidationError("bound: measurement outcome counts must be >= 2");
    m_prod *= static_cast<double>(m);
  }
  switch (variant) {
    case BoundVariant::qubit:
      if (local_dim != 2) throw ValidationError("bound: qubit variant needs D = 2");
      break;
    case BoundVariant::qudit_even:
      if (local_dim % 2 != 0) throw ValidationError("bound: qudit-even variant needs even D");
      break;
    case BoundVariant::qudit_odd:
      if (local_dim % 2 == 0) throw ValidationError("bound: qudit-odd variant needs odd D");
      break;
    case BoundVariant::channel:
    case BoundVariant::measurement:
      if (local_dim != 2) throw ValidationError("bound: channel variants are stated for qubits");
      break;
  }
  if (variant == BoundVariant::measurement) {
    if (m_list.empty()) throw ValidationError("bound: measurement variant needs outcome counts");
    // The measurement registers are part of the workspace.
    if (m_prod > reg_dim * (1.0 + 1e-12)) {
      throw ValidationError("bound: product of outcome counts exceeds register dimension");
    }
  }
}

BoundFactors theorem1_bound_factors(const BoundQuery& q) {
  q.validate();
  BoundFactors f;
  if (q.p.is_infinite()) {
    f.base = 2.0;
    f.value = 2.0;
    return f;
  }
  const double inv_p = q.p.inverse();
  const double log_d = std::log(static_cast<double>(q.local_dim));
  const double log_s = std::log(q.dim_s);
  double log_base = 0.0;
  switch (q.variant) {
    case BoundVariant::qubit:
    case BoundVariant::channel:
    case BoundVariant::measurement:
    case BoundVariant::qudit_even:
      log_base = (1 - q.sites) * log_d + log_s;
      break;
    case BoundVariant::qudit_odd:
      log_base = std::log(static_cast<double>(q.local_dim - 1)) - q.sites * log_d + log_s;
      break;
  }
  f.base = 2.0 * std::exp(inv_p * log_base);
  if (q.variant == BoundVariant::channel || q.variant == BoundVariant::measurement) {
    f.reg_factor = std::exp(-inv_p * std::log(q.reg_dim));
  }
  if (q.variant == BoundVariant::measurement) {
    double log_m = 0.0;
    for (auto m : q.m_list) log_m += std::log(static_cast<double>(m));
    f.measurement_factor = std::exp(inv_p * log_m);
  }
  f.value = f.base * f.reg_factor * f.measurement_factor;
  return f;
}

double theorem1_bound(const BoundQuery& q) { return theorem1_bound_factors(q).value; }

bool SaturationReport::all_pass() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

SaturationReport saturation_check(const ProtocolInstance& protocol, std::vector<SchattenP> ps,
                                  double tol) {
  std::sort(ps.begin(), ps.end());
  const auto& cfg = protocol.cfg;
  SaturationReport rep;
  rep.computed_dim = robustness_subspace(protocol.unitary, cfg).dim();
  const auto actual = commutator_norms(protocol.unitary, cfg, ps);
  for (size_t k = 0; k < ps.size(); ++k) {
    SaturationRow row{ps[k]};
    row.actual = actual[k];
    if (rep.computed_dim >= 1) {
      BoundQuery q;
      q.sites = cfg.sites;
      q.local_dim = cfg.local_dim;
      q.dim_s = static_cast<double>(rep.computed_dim);
      q.p = ps[k];
      q.variant = default_variant(cfg.local_dim);
      row.bound = theorem1_bound(q);
      row.gap = row.actual - row.bound;
      row.pass = std::abs(row.gap) <= tol;
    } else {
      row.bound = std::numeric_limits<double>::quiet_NaN();
      row.gap = std::numeric_limits<double>::quiet_NaN();
    }
    rep.rows.push_back(row);
  }
  return rep;
}

double lemma_s1_check(const DenseOperator& u, const LatticeConfig& cfg) {
  if (cfg.local_dim != 2) throw ValidationError("lemma_s1_check: qubits only");
  const auto pair = extract_stabilizers(u, cfg);
  Matrix xs = pair.s_x.matrix();
  apply_at_sites(pauli_x(), {cfg.initial}, cfg.sites, 2, xs);
  const Vector z = embedded_diagonal(pauli_z(), cfg.initial, cfg);
  const Matrix lhs = commutator_with_diagonal(xs, z);
  const Matrix v = v_operator(pair).matrix();
  const Matrix rhs = -kI * (v + v.adjoint());
  return max_abs_diff(lhs, rhs);
}

ConvexityResult convexity_check(const DenseOperator& u, const LatticeConfig& cfg,
                                const std::vector<Vector>& ancillas, double tol) {
  if (ancillas.empty()) throw ValidationError("convexity_check: no ancilla states");
  ConvexityResult res;
  res.components_pass = true;
  for (const auto& phi : ancillas) {
    const auto r = verify_transfer(u, AncillaState::pure(phi), cfg, tol);
    res.component_fidelities.push_back(r.worst_fidelity);
    res.components_pass = res.components_pass && r.pass;
  }
  const auto mix = verify_transfer(u, AncillaState::uniform_mixture(ancillas), cfg, tol);
  res.mixture_fidelity = mix.worst_fidelity;
  res.mixture_pass = mix.pass;
  return res;
}

// ---- spectral helpers -------------------------------------------------------

DenseOperator v_operator(const StabilizerPair& pair) {
  if (pair.cfg.local_dim != 2) throw ValidationError("v_operator: qubits only");
  Matrix v = pair.s_x.matrix();
  apply_at_sites(pauli_y(), {pair.cfg.initial}, pair.cfg.sites, 2, v);
  return DenseOperator::unitary_product(std::move(v), "V");
}

std::vector<double> v_phases(const StabilizerPair& pair) {
  std::vector<double> out;
  for (const auto& e : eigendecompose_unitary(v_operator(pair))) out.push_back(e.phase);
  std::sort(out.begin(), out.end());
  return out;
}

double commutator_norm_from_phases(const std::vector<double>& phases, SchattenP p) {
  if (phases.empty()) throw ValidationError("commutator_norm_from_phases: empty spectrum");
  std::vector<double> sv;
  sv.reserve(phases.size());
  for (double t : phases) sv.push_back(2.0 * std::abs(std::cos(t)));
  return schatten_norm_from_singular_values(sv, static_cast<Index>(phases.size()), p);
}

PhaseCounts count_real_phases(const std::vector<double>& phases, double tol) {
  PhaseCounts c;
  for (double t : phases) {
    if (std::abs(t) <= tol) ++c.plus_one;
    if (std::numbers::pi - std::abs(t) <= tol) ++c.minus_one;
  }
  return c;
}

DenseOperator random_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("random_unitary: dimension must be positive");
  check_capacity(dim, "random_unitary");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) g(r, c) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the column phases so the distribution is Haar.
  const Matrix& r = qr.matrixQR();
  for (Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return DenseOperator::unitary(std::move(q), "haar");
}

}  // namespace qst
