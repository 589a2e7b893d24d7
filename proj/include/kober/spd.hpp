#pragma once

// Small dense and symmetric matrices (p <= 4), Loewner-order predicates,
// symmetric square roots and the closed-form Jacobians of the standard
// matrix transformations, together with a finite-difference determinant
// oracle operating on packed symmetric coordinates.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace kober {

inline constexpr int kMaxDim = 4;

/// Dense p x p matrix, row-major, stack allocated.
class Mat {
 public:
  explicit Mat(int p = 1);

  static Mat identity(int p);

  int dim() const noexcept { return p_; }
  double& operator()(int i, int j) noexcept { return a_[i * kMaxDim + j]; }
  double operator()(int i, int j) const noexcept { return a_[i * kMaxDim + j]; }

  Mat transpose() const;

  friend Mat operator*(const Mat& x, const Mat& y);
  friend Mat operator+(const Mat& x, const Mat& y);
  friend Mat operator-(const Mat& x, const Mat& y);
  friend Mat operator*(double c, const Mat& x);

 private:
  int p_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Real symmetric p x p matrix. Only the upper triangle is stored, packed
/// row-major: (x11, x12, ..., x1p, x22, ..., xpp).
class SymMat {
 public:
  explicit SymMat(int p = 1);

  static SymMat identity(int p);
  static SymMat scalar(int p, double c);
  static SymMat diag(std::span<const double> d);
  /// Symmetrizes by averaging the two triangles.
  static SymMat from_dense(const Mat& m);
  static SymMat from_packed(int p, std::span<const double> packed);

  int dim() const noexcept { return p_; }
  static constexpr int packed_size(int p) noexcept { return p * (p + 1) / 2; }
  int packed_size() const noexcept { return packed_size(p_); }

  double operator()(int i, int j) const noexcept;
  void set(int i, int j, double v) noexcept;

  std::span<const double> packed() const noexcept { return {v_.data(), std::size_t(packed_size())}; }
  std::vector<double> packed_vector() const;

  Mat dense() const;
  double trace() const noexcept;
  double frobenius_norm() const noexcept;

  SymMat& operator+=(const SymMat& o);
  SymMat& operator-=(const SymMat& o);
  friend SymMat operator+(SymMat x, const SymMat& y) { return x += y; }
  friend SymMat operator-(SymMat x, const SymMat& y) { return x -= y; }
  friend SymMat operator*(double c, SymMat x);

 private:
  static constexpr int index(int p, int i, int j) noexcept {
    // i <= j
    return i * p - i * (i - 1) / 2 + (j - i);
  }
  int p_;
  std::array<double, kMaxDim*(kMaxDim + 1) / 2> v_{};
};

struct SpdCheck {
  bool is_pd = false;
  double min_eigenvalue = 0.0;
};

struct SymEigen {
  std::array<double, kMaxDim> values{};  // ascending
  Mat vectors;                           // columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition.
SymEigen sym_eigen(const SymMat& a);

SpdCheck spd_check(const SymMat& a);
double min_eigenvalue(const SymMat& a);
double max_eigenvalue(const SymMat& a);

double determinant(const Mat& a);
double determinant(const SymMat& a);
Mat inverse(const Mat& a);
SymMat inverse(const SymMat& a);

/// Positive definite square root. Throws NotPositiveDefinite when the
/// smallest eigenvalue is not strictly positive.
SymMat sym_sqrt(const SymMat& a);
SymMat sym_inv_sqrt(const SymMat& a);
/// Symmetric power a^t through the spectral decomposition (a must be PD).
SymMat sym_pow(const SymMat& a, double t);

/// Lower-triangular L with L L' = a. Throws NotPositiveDefinite on a
/// non-positive pivot.
Mat cholesky(const SymMat& a);
/// ln |a| from the Cholesky factor; -infinity when a is not numerically PD.
double log_det_spd(const SymMat& a);

/// A X A'.
SymMat congruence(const Mat& a, const SymMat& x);
SymMat congruence(const SymMat& a, const SymMat& x);

/// True iff B - A is positive definite.
bool loewner_lt(const SymMat& a, const SymMat& b);

/// Strict O < X < I, with both X and I - X having min eigenvalue > margin.
bool in_unit_interval(const SymMat& x, double margin = 1e-10);

/// |A|^(p+1): Jacobian of X -> A X A' on symmetric X.
double jac_congruence(const Mat& a);
/// |Y|^-(p+1): Jacobian of X = Y^-1 on symmetric Y.
double jac_inverse(const SymMat& y);
/// prod_j |I - Y_j|^((k-j)(p+1)/2): Jacobian of the Dirichlet chain map.
double jac_dirichlet_chain(std::span<const SymMat> y);

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

struct FdJacobian {
  double abs_det = 0.0;
  bool singular_warning = false;  // set when |det| < 1e-14
};

/// |det J| of a map R^n -> R^n at a point via central differences. The
/// default step is 1e-5 * (1 + ||point||_inf).
FdJacobian fd_jacobian_det(const VectorMap& map, std::span<const double> point,
                           std::optional<double> step = std::nullopt);

}  // namespace kober
