#include "qst/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qst/errors.hpp"

namespace qst {

namespace {

std::atomic<std::int64_t> g_max_dense_dim{4096};

std::vector<Index> site_strides(int n_sites, int local_dim) {
  std::vector<Index> strides(static_cast<size_t>(n_sites));
  Index s = 1;
  for (int k = n_sites - 1; k >= 0; --k) {
    strides[static_cast<size_t>(k)] = s;
    s *= local_dim;
  }
  return strides;
}

void check_sites(const std::vector<int>& sites, int n_sites, const char* what) {
  std::vector<bool> seen(static_cast<size_t>(std::max(n_sites, 0)), false);
  for (int s : sites) {
    if (s < 0 || s >= n_sites) {
      throw ValidationError(std::string(what) + ": site " + std::to_string(s) + " out of range");
    }
    if (seen[static_cast<size_t>(s)]) {
      throw ValidationError(std::string(what) + ": repeated site " + std::to_string(s));
    }
    seen[static_cast<size_t>(s)] = true;
  }
}

// Offsets of each local basis index (big-endian over `sites`) within the full register.
std::vector<Index> local_offsets(const std::vector<int>& sites, const std::vector<Index>& strides,
                                 int local_dim) {
  const auto k = sites.size();
  Index local_dim_total = 1;
  for (size_t j = 0; j < k; ++j) local_dim_total *= local_dim;
  std::vector<Index> offsets(static_cast<size_t>(local_dim_total), 0);
  for (Index l = 0; l < local_dim_total; ++l) {
    Index rem = l;
    Index off = 0;
    for (size_t j = k; j-- > 0;) {
      off += (rem % local_dim) * strides[static_cast<size_t>(sites[j])];
      rem /= local_dim;
    }
    offsets[static_cast<size_t>(l)] = off;
  }
  return offsets;
}

// Full-register indices whose digits on `sites` are all zero.
std::vector<Index> base_indices(const std::vector<int>& sites, int n_sites, int local_dim) {
  std::vector<bool> on_site(static_cast<size_t>(n_sites), false);
  for (int s : sites) on_site[static_cast<size_t>(s)] = true;
  std::vector<int> rest;
  for (int s = 0; s < n_sites; ++s) {
    if (!on_site[static_cast<size_t>(s)]) rest.push_back(s);
  }
  const auto strides = site_strides(n_sites, local_dim);
  return local_offsets(rest, strides, local_dim);
}

}  // namespace

std::int64_t max_dense_dim() { return g_max_dense_dim.load(); }

void set_max_dense_dim(std::int64_t dim) {
  if (dim < 1) throw ValidationError("memory cap must be positive");
  g_max_dense_dim.store(dim);
}

void check_capacity(std::int64_t dim, std::string_view what) {
  if (dim > max_dense_dim()) {
    throw CapacityError(std::string(what) + ": dimension " + std::to_string(dim) +
                        " exceeds dense cap " + std::to_string(max_dense_dim()));
  }
}

Index register_dim(int n_sites, int local_dim) {
  if (n_sites < 0 || local_dim < 1) throw ValidationError("register_dim: bad register shape");
  std::int64_t d = 1;
  for (int k = 0; k < n_sites; ++k) {
    if (d > std::numeric_limits<std::int64_t>::max() / local_dim) {
      throw CapacityError("register dimension overflows");
    }
    d *= local_dim;
  }
  check_capacity(d, "register");
  return static_cast<Index>(d);
}

// ---- SchattenP --------------------------------------------------------------

SchattenP::SchattenP(double value) {
  if (std::isnan(value) || value < 1.0) {
    throw DomainError("Schatten p must be >= 1, got " + std::to_string(value));
  }
  if (std::isinf(value)) {
    infinite_ = true;
  } else {
    value_ = value;
  }
}

SchattenP SchattenP::infinity() {
  SchattenP p;
  p.infinite_ = true;
  return p;
}

SchattenP SchattenP::parse(std::string_view text) {
  std::string s(text);
  if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return infinity();
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse p value '" + s + "'");
  }
  if (used != s.size()) throw ValidationError("cannot parse p value '" + s + "'");
  return SchattenP(v);
}

double SchattenP::value() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

std::string SchattenP::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value_);
  return buf;
}

// ---- LatticeConfig ----------------------------------------------------------

LatticeConfig LatticeConfig::chain(int sites, int local_dim) {
  LatticeConfig cfg;
  cfg.sites = sites;
  cfg.local_dim = local_dim;
  cfg.initial = 0;
  cfg.final = sites - 1;
  return cfg;
}

void LatticeConfig::validate() const {
  if (sites < 2) throw ValidationError("lattice needs at least 2 sites");
  if (local_dim < 2) throw ValidationError("local dimension must be >= 2");
  if (initial < 0 || initial >= sites || final < 0 || final >= sites) {
    throw ValidationError("initial/final site out of range");
  }
  if (initial == final) throw ValidationError("initial and final sites must differ");
  register_dim(sites, local_dim);
}

Index LatticeConfig::total_dim() const { return register_dim(sites, local_dim); }

int LatticeConfig::distance(int a, int b) const { return std::abs(a - b); }

std::vector<int> LatticeConfig::ancilla_sites() const {
  std::vector<int> out;
  for (int s = 0; s < sites; ++s) {
    if (s != initial) out.push_back(s);
  }
  return out;
}

std::vector<int> LatticeConfig::middle_sites() const {
  std::vector<int> out;
  for (int s = 0; s < sites; ++s) {
    if (s != initial && s != final) out.push_back(s);
  }
  return out;
}

// ---- DenseOperator ----------------------------------------------------------

DenseOperator::DenseOperator(Matrix entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label)) {
  if (entries_.rows() != entries_.cols()) {
    throw ValidationError("DenseOperator must be square");
  }
  check_capacity(entries_.rows(), "DenseOperator");
}

DenseOperator DenseOperator::unitary(Matrix entries, std::string label) {
  DenseOperator op(std::move(entries), std::move(label));
  const double defect = unitarity_defect(op.entries_);
  if (defect > 1e-10) {
    throw ValidationError("operator '" + op.label_ + "' is not unitary (defect " +
                          std::to_string(defect) + ")");
  }
  op.unitary_ = true;
  return op;
}

DenseOperator DenseOperator::unitary_product(Matrix entries, std::string label) {
  DenseOperator op(std::move(entries), std::move(label));
  op.unitary_ = true;
  return op;
}

DenseOperator DenseOperator::hermitian(Matrix entries, std::string label) {
  DenseOperator op(std::move(entries), std::move(label));
  if (hermiticity_defect(op.entries_) > 1e-12) {
    throw ValidationError("operator '" + op.label_ + "' is not Hermitian");
  }
  op.hermitian_ = true;
  return op;
}

DenseOperator DenseOperator::identity(Index dim, std::string label) {
  DenseOperator op(Matrix::Identity(dim, dim), std::move(label));
  op.unitary_ = true;
  op.hermitian_ = true;
  return op;
}

DenseOperator DenseOperator::adjoint() const {
  DenseOperator out(entries_.adjoint(), label_.empty() ? "" : label_ + "^dag");
  out.unitary_ = unitary_;
  out.hermitian_ = hermitian_;
  return out;
}

DenseOperator DenseOperator::with_label(std::string label) const {
  DenseOperator out = *this;
  out.label_ = std::move(label);
  return out;
}

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("operator product: dimension mismatch");
  DenseOperator out(a.entries_ * b.entries_);
  out.unitary_ = a.unitary_ && b.unitary_;
  return out;
}

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("operator sum: dimension mismatch");
  return DenseOperator(a.entries_ + b.entries_);
}

DenseOperator operator-(const DenseOperator& a, const DenseOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("operator difference: dimension mismatch");
  return DenseOperator(a.entries_ - b.entries_);
}

DenseOperator operator*(Complex s, const DenseOperator& a) { return DenseOperator(s * a.entries_); }

// ---- checks -----------------------------------------------------------------

double unitarity_defect(const Matrix& op) {
  const Index n = op.rows();
  Matrix g = op.adjoint() * op;
  g -= Matrix::Identity(n, n);
  // Frobenius bounds the operator norm from above; only refine when it is not conclusive.
  const double frob = g.norm();
  if (frob <= 1e-12) return frob;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& op) {
  if (op.size() == 0) return 0.0;
  return (op - op.adjoint()).cwiseAbs().maxCoeff();
}

double anti_hermiticity_defect(const Matrix& op) {
  if (op.size() == 0) return 0.0;
  return (op + op.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

// ---- construction -----------------------------------------------------------

DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
  const std::int64_t na = a.dim();
  const std::int64_t nb = b.dim();
  if (nb != 0 && na > max_dense_dim() / nb) {
    throw CapacityError("kron: dimension " + std::to_string(na) + "x" + std::to_string(nb) +
                        " exceeds dense cap");
  }
  check_capacity(na * nb, "kron");
  Matrix out(na * nb, na * nb);
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  for (Index c = 0; c < na; ++c) {
    for (Index r = 0; r < na; ++r) {
      out.block(r * nb, c * nb, nb, nb) = am(r, c) * bm;
    }
  }
  std::string label;
  if (!a.label().empty() && !b.label().empty()) label = a.label() + "(x)" + b.label();
  if (a.is_unitary() && b.is_unitary()) return DenseOperator::unitary(std::move(out), label);
  return DenseOperator(std::move(out), std::move(label));
}

Matrix embed_at_sites(const Matrix& op, const std::vector<int>& sites, int n_sites,
                      int local_dim) {
  check_sites(sites, n_sites, "embed_at_sites");
  const Index local_total = register_dim(static_cast<int>(sites.size()), local_dim);
  if (op.rows() != local_total || op.cols() != local_total) {
    throw ValidationError("embed_at_sites: operator dimension " + std::to_string(op.rows()) +
                          " does not match D^" + std::to_string(sites.size()));
  }
  const Index dim = register_dim(n_sites, local_dim);
  const auto strides = site_strides(n_sites, local_dim);
  const auto offsets = local_offsets(sites, strides, local_dim);
  const auto bases = base_indices(sites, n_sites, local_dim);

  Matrix out = Matrix::Zero(dim, dim);
  for (Index b : bases) {
    for (Index lc = 0; lc < local_total; ++lc) {
      const Index col = b + offsets[static_cast<size_t>(lc)];
      for (Index lr = 0; lr < local_total; ++lr) {
        out(b + offsets[static_cast<size_t>(lr)], col) = op(lr, lc);
      }
    }
  }
  return out;
}

DenseOperator embed_at_sites(const DenseOperator& op, const std::vector<int>& sites,
                             const LatticeConfig& cfg) {
  cfg.validate();
  Matrix m = embed_at_sites(op.matrix(), sites, cfg.sites, cfg.local_dim);
  if (op.is_unitary()) return DenseOperator::unitary(std::move(m), op.label());
  return DenseOperator(std::move(m), op.label());
}

void apply_at_sites(const Matrix& gate, const std::vector<int>& sites, int n_sites, int local_dim,
                    Matrix& target) {
  check_sites(sites, n_sites, "apply_at_sites");
  const Index local_total = register_dim(static_cast<int>(sites.size()), local_dim);
  if (gate.rows() != local_total || gate.cols() != local_total) {
    throw ValidationError("apply_at_sites: gate dimension mismatch");
  }
  const Index dim = register_dim(n_sites, local_dim);
  if (target.rows() != dim) throw ValidationError("apply_at_sites: target row count mismatch");

  const auto strides = site_strides(n_sites, local_dim);
  const auto offsets = local_offsets(sites, strides, local_dim);
  const auto bases = base_indices(sites, n_sites, local_dim);

  struct Entry {
    Index row;
    Index col;
    Complex value;
  };
  std::vector<Entry> entries;
  for (Index lc = 0; lc < local_total; ++lc) {
    for (Index lr = 0; lr < local_total; ++lr) {
      if (gate(lr, lc) != Complex(0.0)) entries.push_back({lr, lc, gate(lr, lc)});
    }
  }

  std::vector<Complex> in(static_cast<size_t>(local_total));
  std::vector<Complex> out(static_cast<size_t>(local_total));
  for (Index c = 0; c < target.cols(); ++c) {
    Complex* col = target.col(c).data();
    for (Index b : bases) {
      for (Index l = 0; l < local_total; ++l) in[static_cast<size_t>(l)] = col[b + offsets[static_cast<size_t>(l)]];
      std::fill(out.begin(), out.end(), Complex(0.0));
      for (const auto& e : entries) out[static_cast<size_t>(e.row)] += e.value * in[static_cast<size_t>(e.col)];
      for (Index l = 0; l < local_total; ++l) col[b + offsets[static_cast<size_t>(l)]] = out[static_cast<size_t>(l)];
    }
  }
}

DenseOperator hermitian_part(const DenseOperator& a) {
  Matrix h = 0.5 * (a.matrix() + a.matrix().adjoint());
  return DenseOperator::hermitian(std::move(h), a.label().empty() ? "" : "He(" + a.label() + ")");
}

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("commutator: dimension mismatch");
  Matrix c = a.matrix() * b.matrix();
  c.noalias() -= b.matrix() * a.matrix();
  return DenseOperator(std::move(c));
}

// ---- spectra and norms ------------------------------------------------------

std::vector<double> singular_values(const Matrix& a) {
  std::vector<double> out;
  if (a.size() == 0) return out;
  if (a.rows() == a.cols() && anti_hermiticity_defect(a) <= 1e-10) {
    Matrix h = Complex(0.0, 1.0) * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
    out.reserve(static_cast<size_t>(h.rows()));
    for (Index k = 0; k < h.rows(); ++k) out.push_back(std::abs(es.eigenvalues()(k)));
  } else {
    Eigen::BDCSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    out.assign(s.data(), s.data() + s.size());
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double schatten_norm_from_singular_values(const std::vector<double>& singular, Index dim,
                                          SchattenP p) {
  if (dim < 1) throw ValidationError("schatten norm: dimension must be positive");
  double largest = 0.0;
  for (double s : singular) largest = std::max(largest, std::abs(s));
  if (p.is_infinite() || largest == 0.0) return largest;
  const double pv = p.value();
  double acc = 0.0;
  for (double s : singular) acc += std::pow(std::abs(s) / largest, pv);
  return largest * std::pow(acc / static_cast<double>(dim), 1.0 / pv);
}

double schatten_p_norm(const DenseOperator& a, SchattenP p) {
  return schatten_norm_from_singular_values(singular_values(a.matrix()), a.dim(), p);
}

std::vector<UnitaryEigenpair> eigendecompose_unitary(const DenseOperator& u) {
  if (!u.is_unitary() && unitarity_defect(u.matrix()) > 1e-10) {
    throw ValidationError("eigendecompose_unitary: non-unitary input");
  }
  const Index n = u.dim();
  // A normal matrix has diagonal Schur form; Q is then an orthonormal eigenbasis.
  Eigen::ComplexSchur<Matrix> schur(u.matrix(), true);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();

  std::vector<UnitaryEigenpair> out;
  out.reserve(static_cast<size_t>(n));
  Vector phases(n);
  for (Index k = 0; k < n; ++k) {
    const double theta = std::arg(t(k, k));
    phases(k) = std::polar(1.0, theta);
    out.push_back({theta, q.col(k)});
  }
  const Matrix rebuilt = q * phases.asDiagonal() * q.adjoint();
  const Matrix residual = rebuilt - u.matrix();
  double err = residual.norm();
  if (err > 1e-8) {
    Eigen::BDCSVD<Matrix> svd(residual);
    err = svd.singularValues()(0);
  }
  if (err > 1e-8) {
    throw NumericalError("unitary eigendecomposition reconstruction error " + std::to_string(err));
  }
  return out;
}

// ---- register helpers -------------------------------------------------------

Vector place_product(const Vector& a, const std::vector<int>& sites_a, const Vector& b,
                     const std::vector<int>& sites_b, int n_sites, int local_dim) {
  std::vector<int> all = sites_a;
  all.insert(all.end(), sites_b.begin(), sites_b.end());
  check_sites(all, n_sites, "place_product");
  if (static_cast<int>(all.size()) != n_sites) {
    throw ValidationError("place_product: site lists must cover the register");
  }
  if (a.size() != register_dim(static_cast<int>(sites_a.size()), local_dim) ||
      b.size() != register_dim(static_cast<int>(sites_b.size()), local_dim)) {
    throw ValidationError("place_product: factor dimension mismatch");
  }
  const Index dim = register_dim(n_sites, local_dim);
  const auto strides = site_strides(n_sites, local_dim);
  const auto off_a = local_offsets(sites_a, strides, local_dim);
  const auto off_b = local_offsets(sites_b, strides, local_dim);
  Vector out = Vector::Zero(dim);
  for (Index ia = 0; ia < a.size(); ++ia) {
    if (a(ia) == Complex(0.0)) continue;
    for (Index ib = 0; ib < b.size(); ++ib) {
      out(off_a[static_cast<size_t>(ia)] + off_b[static_cast<size_t>(ib)]) = a(ia) * b(ib);
    }
  }
  return out;
}

Matrix reduced_density(const Vector& state, const std::vector<int>& keep, int n_sites,
                       int local_dim) {
  check_sites(keep, n_sites, "reduced_density");
  const Index dim = register_dim(n_sites, local_dim);
  if (state.size() != dim) throw ValidationError("reduced_density: state dimension mismatch");
  const auto strides = site_strides(n_sites, local_dim);
  const auto keep_off = local_offsets(keep, strides, local_dim);
  const auto rest_off = base_indices(keep, n_sites, local_dim);
  const auto nk = static_cast<Index>(keep_off.size());
  const auto nr = static_cast<Index>(rest_off.size());
  Matrix m(nk, nr);
  for (Index r = 0; r < nr; ++r) {
    for (Index k = 0; k < nk; ++k) {
      m(k, r) = state(keep_off[static_cast<size_t>(k)] + rest_off[static_cast<size_t>(r)]);
    }
  }
  return m * m.adjoint();
}

Vector basis_vector(Index dim, Index index) {
  if (index < 0 || index >= dim) throw ValidationError("basis_vector: index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

}  // namespace qst
