#pragma once

// Dense complex linear algebra on multi-site registers.
//
// Site ordering is big-endian throughout: site 0 is the most significant digit of a
// basis index, so |d_0 d_1 ... d_{L-1}> has index sum_s d_s * D^(L-1-s).

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qst {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Singular values at or below this are exact zeros for rank decisions.
inline constexpr double kZeroSingularValue = 1e-10;

// Dense storage cap on the total Hilbert-space dimension (default 4096 = 2^12).
std::int64_t max_dense_dim();
void set_max_dense_dim(std::int64_t dim);
void check_capacity(std::int64_t dim, std::string_view what);

// D^n with overflow and capacity checking.
Index register_dim(int n_sites, int local_dim);

class SchattenP {
 public:
  // Finite p >= 1; +infinity maps to the operator norm.
  explicit SchattenP(double value);
  static SchattenP infinity();
  // Accepts a decimal number or "inf".
  static SchattenP parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  double value() const;
  // 1/p, exactly 0 at infinity.
  double inverse() const { return infinite_ ? 0.0 : 1.0 / value_; }
  std::string to_string() const;

  friend bool operator==(const SchattenP& a, const SchattenP& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend bool operator<(const SchattenP& a, const SchattenP& b) {
    if (a.infinite_ || b.infinite_) return !a.infinite_ && b.infinite_;
    return a.value_ < b.value_;
  }

 private:
  SchattenP() = default;
  double value_ = 1.0;
  bool infinite_ = false;
};

struct LatticeConfig {
  int sites = 2;
  int local_dim = 2;
  int initial = 0;
  int final = 1;

  // 1-D chain transferring from site 0 to site L-1.
  static LatticeConfig chain(int sites, int local_dim = 2);

  // Throws ValidationError or CapacityError.
  void validate() const;
  Index total_dim() const;
  int distance(int a, int b) const;
  int transfer_distance() const { return distance(initial, final); }

  // All sites except the initial one, ascending. The ancilla register.
  std::vector<int> ancilla_sites() const;
  // All sites except initial and final, ascending.
  std::vector<int> middle_sites() const;
};

class DenseOperator {
 public:
  DenseOperator() = default;
  explicit DenseOperator(Matrix entries, std::string label = {});

  // Validated constructors; they throw ValidationError when the property fails.
  static DenseOperator unitary(Matrix entries, std::string label = {});
  static DenseOperator hermitian(Matrix entries, std::string label = {});
  static DenseOperator identity(Index dim, std::string label = "I");
  // For products of operators already known to be unitary; skips the O(n^3) check.
  static DenseOperator unitary_product(Matrix entries, std::string label = {});

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  const std::string& label() const { return label_; }
  bool is_unitary() const { return unitary_; }
  bool is_hermitian() const { return hermitian_; }

  DenseOperator adjoint() const;
  DenseOperator with_label(std::string label) const;

  friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);
  friend DenseOperator operator+(const DenseOperator& a, const DenseOperator& b);
  friend DenseOperator operator-(const DenseOperator& a, const DenseOperator& b);
  friend DenseOperator operator*(Complex s, const DenseOperator& a);

 private:
  Matrix entries_;
  std::string label_;
  bool unitary_ = false;
  bool hermitian_ = false;
};

// Largest singular value of (O^dagger O - I).
double unitarity_defect(const Matrix& op);
// Largest entry magnitude of (O - O^dagger).
double hermiticity_defect(const Matrix& op);
// Largest entry magnitude of (O + O^dagger).
double anti_hermiticity_defect(const Matrix& op);
// Largest entry magnitude of (A - B).
double max_abs_diff(const Matrix& a, const Matrix& b);

DenseOperator kron(const DenseOperator& a, const DenseOperator& b);

// The operator acting as `op` on `sites` (in listed order) and as identity elsewhere.
DenseOperator embed_at_sites(const DenseOperator& op, const std::vector<int>& sites,
                             const LatticeConfig& cfg);
Matrix embed_at_sites(const Matrix& op, const std::vector<int>& sites, int n_sites, int local_dim);

// target <- embed(gate, sites) * target, in O(rows * cols * gate_dim) without forming the embedding.
void apply_at_sites(const Matrix& gate, const std::vector<int>& sites, int n_sites, int local_dim,
                    Matrix& target);

DenseOperator hermitian_part(const DenseOperator& a);
DenseOperator commutator(const DenseOperator& a, const DenseOperator& b);

// Descending singular values. Anti-Hermitian input goes through the Hermitian eigensolver on iA.
std::vector<double> singular_values(const Matrix& a);

// Renormalized Schatten norm |H|^(-1/p) (sum s^p)^(1/p) from a precomputed spectrum.
double schatten_norm_from_singular_values(const std::vector<double>& singular, Index dim,
                                          SchattenP p);
double schatten_p_norm(const DenseOperator& a, SchattenP p);

struct UnitaryEigenpair {
  double phase;  // theta in (-pi, pi]
  Vector vector;
};

// U = sum_k exp(i theta_k) |chi_k><chi_k| with orthonormal chi_k.
std::vector<UnitaryEigenpair> eigendecompose_unitary(const DenseOperator& u);

// ---- register helpers -------------------------------------------------------

// Product vector on an n-site register with `a` occupying sites_a and `b` occupying sites_b.
// The two site lists must partition the register.
Vector place_product(const Vector& a, const std::vector<int>& sites_a, const Vector& b,
                     const std::vector<int>& sites_b, int n_sites, int local_dim);

// Reduced density matrix of a pure state on the kept sites (in listed order).
Matrix reduced_density(const Vector& state, const std::vector<int>& keep, int n_sites,
                       int local_dim);

// Computational basis vector |index> of the given dimension.
Vector basis_vector(Index dim, Index index);

}  // namespace qst
