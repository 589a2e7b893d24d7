#include "kober/spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "kober/error.hpp"

namespace kober {

namespace {

void check_dim(int p) {
  if (p < 1 || p > kMaxDim) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimension must be in [1, 4], got " + std::to_string(p));
  }
}

void check_same(int p, int q) {
  if (p != q) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(p) + " vs " + std::to_string(q));
  }
}

// Solves the n x n system in place with partial pivoting; returns the
// determinant of the original matrix.
double lu_det(std::vector<double>& a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      det = -det;
    }
    const double d = a[c * n + c];
    det *= d;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / d;
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

SymMat spectral_map(const SymMat& a, double (*fn)(double, double), double arg) {
  const SymEigen e = sym_eigen(a);
  const int p = a.dim();
  if (!(e.values[0] > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "min eigenvalue " + std::to_string(e.values[0]) + " is not strictly positive");
  }
  SymMat out(p);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      double s = 0.0;
      for (int m = 0; m < p; ++m) s += e.vectors(i, m) * fn(e.values[m], arg) * e.vectors(j, m);
      out.set(i, j, s);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Mat

Mat::Mat(int p) : p_(p) { check_dim(p); }

Mat Mat::identity(int p) {
  Mat m(p);
  for (int i = 0; i < p; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transpose() const {
  Mat t(p_);
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) t(i, j) = (*this)(j, i);
  return t;
}

Mat operator*(const Mat& x, const Mat& y) {
  check_same(x.p_, y.p_);
  Mat r(x.p_);
  for (int i = 0; i < x.p_; ++i)
    for (int j = 0; j < x.p_; ++j) {
      double s = 0.0;
      for (int m = 0; m < x.p_; ++m) s += x(i, m) * y(m, j);
      r(i, j) = s;
    }
  return r;
}

Mat operator+(const Mat& x, const Mat& y) {
  check_same(x.p_, y.p_);
  Mat r(x.p_);
  for (int i = 0; i < x.p_; ++i)
    for (int j = 0; j < x.p_; ++j) r(i, j) = x(i, j) + y(i, j);
  return r;
}

Mat operator-(const Mat& x, const Mat& y) {
  check_same(x.p_, y.p_);
  Mat r(x.p_);
  for (int i = 0; i < x.p_; ++i)
    for (int j = 0; j < x.p_; ++j) r(i, j) = x(i, j) - y(i, j);
  return r;
}

Mat operator*(double c, const Mat& x) {
  Mat r(x.p_);
  for (int i = 0; i < x.p_; ++i)
    for (int j = 0; j < x.p_; ++j) r(i, j) = c * x(i, j);
  return r;
}

// ---------------------------------------------------------------- SymMat

SymMat::SymMat(int p) : p_(p) { check_dim(p); }

SymMat SymMat::identity(int p) { return scalar(p, 1.0); }

SymMat SymMat::scalar(int p, double c) {
  SymMat m(p);
  for (int i = 0; i < p; ++i) m.set(i, i, c);
  return m;
}

SymMat SymMat::diag(std::span<const double> d) {
  SymMat m(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m.set(int(i), int(i), d[i]);
  return m;
}

SymMat SymMat::from_dense(const Mat& m) {
  SymMat s(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i; j < m.dim(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymMat SymMat::from_packed(int p, std::span<const double> packed) {
  SymMat s(p);
  if (int(packed.size()) != packed_size(p)) {
    throw Error(ErrorCode::DimensionMismatch,
                "packed length " + std::to_string(packed.size()) + " for p=" + std::to_string(p));
  }
  std::copy(packed.begin(), packed.end(), s.v_.begin());
  return s;
}

double SymMat::operator()(int i, int j) const noexcept {
  if (i > j) std::swap(i, j);
  return v_[index(p_, i, j)];
}

void SymMat::set(int i, int j, double v) noexcept {
  if (i > j) std::swap(i, j);
  v_[index(p_, i, j)] = v;
}

std::vector<double> SymMat::packed_vector() const {
  auto s = packed();
  return {s.begin(), s.end()};
}

Mat SymMat::dense() const {
  Mat m(p_);
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double SymMat::trace() const noexcept {
  double t = 0.0;
  for (int i = 0; i < p_; ++i) t += (*this)(i, i);
  return t;
}

double SymMat::frobenius_norm() const noexcept {
  double s = 0.0;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

SymMat& SymMat::operator+=(const SymMat& o) {
  check_same(p_, o.p_);
  for (int i = 0; i < packed_size(); ++i) v_[i] += o.v_[i];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
  check_same(p_, o.p_);
  for (int i = 0; i < packed_size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

SymMat operator*(double c, SymMat x) {
  for (int i = 0; i < x.packed_size(); ++i) x.v_[i] *= c;
  return x;
}

// ---------------------------------------------------------------- spectra

SymEigen sym_eigen(const SymMat& a) {
  const int p = a.dim();
  Mat m = a.dense();
  SymEigen out;
  out.vectors = Mat::identity(p);
  Mat& v = out.vectors;

  double scale = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) scale = std::max(scale, std::abs(m(i, j)));

  for (int sweep = 0; sweep < 64 && p > 1; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) off = std::max(off, std::abs(m(i, j)));
    if (off <= 1e-300 || off <= 1e-17 * scale) break;

    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const double aij = m(i, j);
        if (aij == 0.0) continue;
        const double theta = (m(j, j) - m(i, i)) / (2.0 * aij);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < p; ++r) {
          const double mri = m(r, i), mrj = m(r, j);
          m(r, i) = c * mri - s * mrj;
          m(r, j) = s * mri + c * mrj;
        }
        for (int r = 0; r < p; ++r) {
          const double mir = m(i, r), mjr = m(j, r);
          m(i, r) = c * mir - s * mjr;
          m(j, r) = s * mir + c * mjr;
        }
        for (int r = 0; r < p; ++r) {
          const double vri = v(r, i), vrj = v(r, j);
          v(r, i) = c * vri - s * vrj;
          v(r, j) = s * vri + c * vrj;
        }
      }
    }
  }

  std::array<int, kMaxDim> order{};
  for (int i = 0; i < p; ++i) order[i] = i;
  std::sort(order.begin(), order.begin() + p, [&](int x, int y) { return m(x, x) < m(y, y); });
  Mat sorted(p);
  for (int c = 0; c < p; ++c) {
    out.values[c] = m(order[c], order[c]);
    for (int r = 0; r < p; ++r) sorted(r, c) = v(r, order[c]);
  }
  out.vectors = sorted;
  return out;
}

double min_eigenvalue(const SymMat& a) {
  if (a.dim() == 1) return a(0, 0);
  return sym_eigen(a).values[0];
}

double max_eigenvalue(const SymMat& a) {
  if (a.dim() == 1) return a(0, 0);
  return sym_eigen(a).values[a.dim() - 1];
}

SpdCheck spd_check(const SymMat& a) {
  const double lo = min_eigenvalue(a);
  return {lo > 0.0, lo};
}

double determinant(const Mat& a) {
  const int n = a.dim();
  switch (n) {
    case 1: return a(0, 0);
    case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    default: break;
  }
  std::vector<double> w(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w[i * n + j] = a(i, j);
  return lu_det(w, n);
}

double determinant(const SymMat& a) {
  switch (a.dim()) {
    case 1: return a(0, 0);
    case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
    default: return determinant(a.dense());
  }
}

Mat inverse(const Mat& a) {
  const int n = a.dim();
  std::vector<double> w(n * 2 * n, 0.0);
  const int cols = 2 * n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w[i * cols + j] = a(i, j);
    w[i * cols + n + i] = 1.0;
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(w[r * cols + c]) > std::abs(w[piv * cols + c])) piv = r;
    if (w[piv * cols + c] == 0.0) throw Error(ErrorCode::SingularMatrix, "matrix is not invertible");
    if (piv != c)
      for (int j = 0; j < cols; ++j) std::swap(w[c * cols + j], w[piv * cols + j]);
    const double d = w[c * cols + c];
    for (int j = 0; j < cols; ++j) w[c * cols + j] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = w[r * cols + c];
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) w[r * cols + j] -= f * w[c * cols + j];
    }
  }
  Mat inv(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = w[i * cols + n + j];
  return inv;
}

SymMat inverse(const SymMat& a) {
  if (a.dim() == 1) {
    if (a(0, 0) == 0.0) throw Error(ErrorCode::SingularMatrix, "matrix is not invertible");
    return SymMat::scalar(1, 1.0 / a(0, 0));
  }
  if (a.dim() == 2) {
    const double d = determinant(a);
    if (d == 0.0) throw Error(ErrorCode::SingularMatrix, "matrix is not invertible");
    SymMat r(2);
    r.set(0, 0, a(1, 1) / d);
    r.set(1, 1, a(0, 0) / d);
    r.set(0, 1, -a(0, 1) / d);
    return r;
  }
  return SymMat::from_dense(inverse(a.dense()));
}

SymMat sym_sqrt(const SymMat& a) {
  if (a.dim() == 1) {
    if (!(a(0, 0) > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "scalar is not positive");
    return SymMat::scalar(1, std::sqrt(a(0, 0)));
  }
  return spectral_map(a, [](double l, double) { return std::sqrt(l); }, 0.0);
}

SymMat sym_inv_sqrt(const SymMat& a) {
  if (a.dim() == 1) {
    if (!(a(0, 0) > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "scalar is not positive");
    return SymMat::scalar(1, 1.0 / std::sqrt(a(0, 0)));
  }
  return spectral_map(a, [](double l, double) { return 1.0 / std::sqrt(l); }, 0.0);
}

SymMat sym_pow(const SymMat& a, double t) {
  return spectral_map(a, [](double l, double e) { return std::pow(l, e); }, t);
}

SymMat congruence(const Mat& a, const SymMat& x) {
  check_same(a.dim(), x.dim());
  const int p = x.dim();
  SymMat r(p);
  const Mat xd = x.dense();
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      double s = 0.0;
      for (int m = 0; m < p; ++m) {
        double t = 0.0;
        for (int n = 0; n < p; ++n) t += xd(m, n) * a(j, n);
        s += a(i, m) * t;
      }
      r.set(i, j, s);
    }
  }
  return r;
}

SymMat congruence(const SymMat& a, const SymMat& x) { return congruence(a.dense(), x); }

bool loewner_lt(const SymMat& a, const SymMat& b) {
  check_same(a.dim(), b.dim());
  return min_eigenvalue(b - a) > 0.0;
}

bool in_unit_interval(const SymMat& x, double margin) {
  if (x.dim() == 1) return x(0, 0) > margin && 1.0 - x(0, 0) > margin;
  const SymEigen e = sym_eigen(x);
  return e.values[0] > margin && 1.0 - e.values[x.dim() - 1] > margin;
}

// ---------------------------------------------------------------- Jacobians

double jac_congruence(const Mat& a) {
  const double d = determinant(a);
  if (d == 0.0 || !std::isfinite(d)) throw Error(ErrorCode::SingularMatrix, "|A| = 0");
  return std::pow(std::abs(d), a.dim() + 1);
}

double jac_inverse(const SymMat& y) {
  const SpdCheck c = spd_check(y);
  if (!c.is_pd) throw Error(ErrorCode::NotPositiveDefinite, "Y must be positive definite");
  return std::pow(determinant(y), -(y.dim() + 1));
}

double jac_dirichlet_chain(std::span<const SymMat> y) {
  const int k = static_cast<int>(y.size());
  if (k == 0) return 1.0;
  const int p = y[0].dim();
  double j = 1.0;
  for (int idx = 0; idx < k; ++idx) {
    check_same(p, y[idx].dim());
    if (!in_unit_interval(y[idx])) {
      throw Error(ErrorCode::OutOfRange, "Y_" + std::to_string(idx + 1) + " violates O < Y < I");
    }
    const double exponent = double(k - (idx + 1)) * (p + 1) / 2.0;
    j *= std::pow(determinant(SymMat::identity(p) - y[idx]), exponent);
  }
  return j;
}

FdJacobian fd_jacobian_det(const VectorMap& map, std::span<const double> point, std::optional<double> step) {
  const int n = static_cast<int>(point.size());
  double inf_norm = 0.0;
  for (double x : point) inf_norm = std::max(inf_norm, std::abs(x));
  const double h = step.value_or(1e-5 * (1.0 + inf_norm));
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");

  std::vector<double> jac(n * n);
  std::vector<double> x(point.begin(), point.end());
  for (int c = 0; c < n; ++c) {
    const double x0 = x[c];
    x[c] = x0 + h;
    const std::vector<double> fp = map(x);
    x[c] = x0 - h;
    const std::vector<double> fm = map(x);
    x[c] = x0;
    if (int(fp.size()) != n || int(fm.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "map must be square R^n -> R^n");
    }
    for (int r = 0; r < n; ++r) jac[r * n + c] = (fp[r] - fm[r]) / (2.0 * h);
  }
  FdJacobian out;
  out.abs_det = std::abs(lu_det(jac, n));
  out.singular_warning = out.abs_det < 1e-14;
  return out;
}

Mat cholesky(const SymMat& a) {
  const int p = a.dim();
  Mat l(p);
  for (int j = 0; j < p; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "Cholesky pivot is not positive");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < p; ++i) {
      double v = a(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

double log_det_spd(const SymMat& a) {
  const int p = a.dim();
  if (p == 1) return a(0, 0) > 0.0 ? std::log(a(0, 0)) : -std::numeric_limits<double>::infinity();
  try {
    const Mat l = cholesky(a);
    double s = 0.0;
    for (int i = 0; i < p; ++i) s += std::log(l(i, i));
    return 2.0 * s;
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace kober
