#include "kober/randmat.hpp"

#include <cmath>
#include <string>

#include "kober/error.hpp"

namespace kober {

namespace {

std::seed_seq make_seed_seq(RngStream s) {
  return std::seed_seq{std::uint32_t(s.seed), std::uint32_t(s.seed >> 32), std::uint32_t(s.stream_id),
                       std::uint32_t(s.stream_id >> 32), std::uint32_t(0x6b6f6265)};
}

std::mt19937_64 make_engine(RngStream s) {
  auto seq = make_seed_seq(s);
  return std::mt19937_64(seq);
}

SymMat normalize_by_sum(const SymMat& part, const SymMat& total_inv_sqrt) {
  return congruence(total_inv_sqrt, part);
}

}  // namespace

Rng::Rng(RngStream stream, bool mirrored) : engine_(make_engine(stream)), mirrored_(mirrored) {}

double Rng::uniform() {
  const double u = (double(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return mirrored_ ? 1.0 - u : u;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double v1, v2, s;
  do {
    v1 = 2.0 * uniform() - 1.0;
    v2 = 2.0 * uniform() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v2 * f;
  has_spare_ = true;
  return v1 * f;
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw Error(ErrorCode::DomainError, "gamma shape must be positive");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::chi_square(double df) { return 2.0 * gamma(0.5 * df); }

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

Mat sample_wishart_factor(int p, double df, Rng& rng) {
  if (!(df > p - 1)) {
    throw Error(ErrorCode::DomainError,
                "Wishart degrees of freedom must exceed p-1 = " + std::to_string(p - 1) + ", got " + std::to_string(df));
  }
  // Bartlett: lower triangular T, T_ii^2 ~ chi^2(df - i) (0-based i), T_ij ~ N(0,1).
  Mat t(p);
  for (int i = 0; i < p; ++i) {
    t(i, i) = std::sqrt(rng.chi_square(df - i));
    for (int j = 0; j < i; ++j) t(i, j) = rng.normal();
  }
  return t;
}

SymMat sample_wishart(int p, double df, Rng& rng) {
  if (!(df > p - 1)) {
    throw Error(ErrorCode::DomainError,
                "Wishart degrees of freedom must exceed p-1 = " + std::to_string(p - 1) + ", got " + std::to_string(df));
  }
  const Mat t = sample_wishart_factor(p, df, rng);
  SymMat w(p);
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) {
      double s = 0.0;
      for (int m = 0; m <= i; ++m) s += t(i, m) * t(j, m);
      w.set(i, j, s);
    }
  return w;
}

void validate(const BetaMatParams& params) {
  const double bound = (params.p - 1) / 2.0;
  if (!(params.a > bound) || !(params.b > bound)) {
    throw Error(ErrorCode::DomainError, "matrix beta shapes must exceed (p-1)/2 = " + std::to_string(bound) +
                                            ", got a = " + std::to_string(params.a) +
                                            ", b = " + std::to_string(params.b));
  }
}

SymMat sample_matrix_beta(const BetaMatParams& params, Rng& rng) {
  validate(params);
  const int p = params.p;
  if (p == 1) return SymMat::scalar(1, rng.beta(params.a, params.b));
  const SymMat s1 = sample_wishart(p, 2.0 * params.a, rng);
  const SymMat s2 = sample_wishart(p, 2.0 * params.b, rng);
  return normalize_by_sum(s1, sym_inv_sqrt(s1 + s2));
}

SymMat sample_matrix_beta2(const BetaMatParams& params, Rng& rng) {
  validate(params);
  const int p = params.p;
  if (p == 1) return SymMat::scalar(1, rng.gamma(params.a) / rng.gamma(params.b));
  const Mat t1 = sample_wishart_factor(p, 2.0 * params.a, rng);
  const Mat t2 = sample_wishart_factor(p, 2.0 * params.b, rng);
  return congruence(inverse(t2).transpose() * t1, SymMat::identity(p));
}

SymMat sample_matrix_gamma(int p, double shape, double scale, Rng& rng) {
  if (!(scale > 0.0)) throw Error(ErrorCode::DomainError, "matrix gamma scale must be positive");
  if (p == 1) return SymMat::scalar(1, scale * rng.gamma(shape));
  // W ~ W_p(2 shape, I) has density prop. to |W|^(shape-(p+1)/2) exp(-tr W / 2)
  return (0.5 * scale) * sample_wishart(p, 2.0 * shape, rng);
}

std::vector<SymMat> sample_matrix_dirichlet(int p, std::span<const double> shapes, Rng& rng) {
  if (shapes.size() < 2) throw Error(ErrorCode::InvalidArgument, "Dirichlet needs at least two shapes");
  std::vector<SymMat> w;
  w.reserve(shapes.size());
  SymMat total(p);
  for (double a : shapes) {
    if (!(a > (p - 1) / 2.0)) {
      throw Error(ErrorCode::DomainError, "Dirichlet shape must exceed (p-1)/2, got " + std::to_string(a));
    }
    if (p == 1) {
      w.push_back(SymMat::scalar(1, rng.gamma(a)));
    } else {
      w.push_back(sample_wishart(p, 2.0 * a, rng));
    }
    total += w.back();
  }
  const SymMat n = sym_inv_sqrt(total);
  std::vector<SymMat> x;
  x.reserve(shapes.size() - 1);
  for (std::size_t j = 0; j + 1 < shapes.size(); ++j) x.push_back(normalize_by_sum(w[j], n));
  return x;
}

std::vector<SymMat> sample_dirichlet_chain(const DirichletChainParams& params, Rng& rng) {
  const int p = params.p;
  const int k = params.k();
  if (k < 1 || int(params.second.size()) != k) {
    throw Error(ErrorCode::DimensionMismatch, "chain needs k >= 1 zeta values and k second shapes");
  }
  const double bound = (p - 1) / 2.0;
  std::vector<SymMat> y;
  y.reserve(k);
  for (int j = 0; j < k; ++j) {
    const double a = params.zeta[j] + (p + 1) / 2.0;
    const double b = params.second[j];
    if (!(a > bound) || !(b > bound)) {
      throw Error(ErrorCode::ChainDomainError, "chain parameter pair for j=" + std::to_string(j + 1) + " is (" +
                                                   std::to_string(a) + ", " + std::to_string(b) +
                                                   "); both must exceed (p-1)/2 = " + std::to_string(bound));
    }
    y.push_back(sample_matrix_beta({p, a, b}, rng));
  }
  return dirichlet_chain_forward(y);
}

std::vector<SymMat> dirichlet_chain_forward(std::span<const SymMat> y) {
  std::vector<SymMat> x;
  if (y.empty()) return x;
  const int p = y[0].dim();
  x.reserve(y.size());
  SymMat partial(p);  // X_1 + ... + X_{j-1}
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (j == 0) {
      x.push_back(y[0]);
    } else {
      const SymMat root = sym_sqrt(SymMat::identity(p) - partial);
      x.push_back(congruence(root, y[j]));
    }
    partial += x.back();
  }
  return x;
}

std::vector<SymMat> inverse_dirichlet_chain(std::span<const SymMat> x) {
  std::vector<SymMat> y;
  if (x.empty()) return y;
  const int p = x[0].dim();
  y.reserve(x.size());
  SymMat partial(p);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j == 0) {
      y.push_back(x[0]);
    } else {
      const SymMat rest = SymMat::identity(p) - partial;
      if (!(min_eigenvalue(rest) > 0.0)) {
        throw Error(ErrorCode::OutOfRange, "partial sum X_1 + ... + X_" + std::to_string(j) + " is not below I");
      }
      y.push_back(congruence(sym_inv_sqrt(rest), x[j]));
    }
    partial += x[j];
  }
  if (!(min_eigenvalue(SymMat::identity(p) - partial) > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "X_1 + ... + X_k is not below I");
  }
  return y;
}

}  // namespace kober
