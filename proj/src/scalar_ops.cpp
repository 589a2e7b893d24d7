#include "kober/scalar_ops.hpp"

#include <cmath>
#include <string>

#include "kober/error.hpp"
#include "kober/hypergeometric.hpp"
#include "kober/matgamma.hpp"

namespace kober {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::DomainError, what);
}

double recip_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 0.0) return std::exp(-ln_gamma(x));
  return 1.0 / std::tgamma(x);
}

// Second-kind integrand t^(zeta-1) f(u/t) on (0,1), with f = O(v^-d) at
// infinity. Returns the Jacobi t-exponent and the power of t left in the
// integrand so the weight absorbs the singular part.
struct TailPlan {
  double weight_exp;
  double residual_exp;
};

TailPlan second_kind_plan(double zeta, double decay, const char* where) {
  if (!(zeta + decay > 0.0)) {
    throw Error(ErrorCode::TailDivergence, std::string(where) + ": zeta + decay must be positive (zeta = " +
                                               std::to_string(zeta) + ", decay = " + std::to_string(decay) + ")");
  }
  if (zeta > 0.0 && decay >= 0.0) return {zeta - 1.0, 0.0};
  if (std::isinf(decay)) return {0.0, zeta - 1.0};
  return {zeta - 1.0 + decay, -decay};
}

double tpow(double t, double e) { return e == 0.0 ? 1.0 : std::pow(t, e); }

// Scale on which f varies: 1/rate for the exponential families, 1 for
// callbacks, none (0) for the scale-free power family.
double variation_scale(const TestFunction1D& f) {
  switch (f.family()) {
    case TestFunction1D::Family::power: return 0.0;
    case TestFunction1D::Family::exp_decay:
    case TestFunction1D::Family::power_times_exp: return 1.0 / f.rate();
    case TestFunction1D::Family::callback: return 1.0;
  }
  return 0.0;
}

// f(u t) varies on t ~ scale/u. f(u/t) varies on t ~ u/scale for small u
// and, for large u, on 1 - t ~ scale/u (negative layer: graded towards 1).
double first_kind_layer(double scale, double u) { return scale > 0.0 ? scale / u : 0.0; }
double second_kind_layer(double scale, double u) {
  if (scale <= 0.0) return 0.0;
  return u <= scale ? u / scale : -scale / u;
}

void check_first_kind(const ScalarOpSpec& spec, double u, const char* name) {
  require(spec.alpha > 0.0, std::string(name) + ": order alpha must be positive");
  require(spec.zeta > -1.0, std::string(name) + ": zeta must exceed -1");
  require(u > 0.0, std::string(name) + ": evaluation point must be positive");
}

double central_difference(const std::function<double(double)>& F, double x, int m, double h) {
  double s = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= m; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    s += sign * binom * F(x + (0.5 * m - i) * h);
    binom = binom * (m - i) / (i + 1.0);
  }
  return s / std::pow(h, m);
}

// Richardson-extrapolated central difference, O(h^4).
double derivative_fd(const std::function<double(double)>& F, double x, int m, double h) {
  const double coarse = central_difference(F, x, m, h);
  const double fine = central_difference(F, x, m, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double fd_step(double rel_tol, int m, double x) {
  double h = std::pow(rel_tol, 1.0 / (m + 2)) * (1.0 + std::abs(x));
  // keep the stencil inside (0, x + ...)
  const double limit = 0.9 * 2.0 * x / std::max(m, 1);
  return std::min(h, limit);
}

}  // namespace

// ---------------------------------------------------------------- test functions

TestFunction1D TestFunction1D::power(double lambda, double coeff) {
  TestFunction1D f;
  f.family_ = Family::power;
  f.lambda_ = lambda;
  f.coeff_ = coeff;
  return f;
}

TestFunction1D TestFunction1D::exp_decay(double rate, double coeff) {
  if (!(rate > 0.0)) throw Error(ErrorCode::DomainError, "exponential rate must be positive");
  TestFunction1D f;
  f.family_ = Family::exp_decay;
  f.rate_ = rate;
  f.coeff_ = coeff;
  return f;
}

TestFunction1D TestFunction1D::power_times_exp(double lambda, double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::DomainError, "exponential rate must be positive");
  TestFunction1D f;
  f.family_ = Family::power_times_exp;
  f.lambda_ = lambda;
  f.rate_ = rate;
  return f;
}

TestFunction1D TestFunction1D::callback(std::function<double(double)> fn, double decay, int smoothness) {
  TestFunction1D f;
  f.family_ = Family::callback;
  f.fn_ = std::move(fn);
  f.decay_ = decay;
  f.smoothness_ = smoothness;
  return f;
}

double TestFunction1D::operator()(double v) const {
  switch (family_) {
    case Family::power: return coeff_ * (lambda_ == 0.0 ? 1.0 : std::pow(v, lambda_));
    case Family::exp_decay: return coeff_ * std::exp(-rate_ * v);
    case Family::power_times_exp: return std::pow(v, lambda_) * std::exp(-rate_ * v);
    case Family::callback: return fn_(v);
  }
  return 0.0;
}

double TestFunction1D::decay() const noexcept {
  switch (family_) {
    case Family::power: return -lambda_;
    case Family::exp_decay:
    case Family::power_times_exp: return infinity();
    case Family::callback: return decay_;
  }
  return 0.0;
}

int TestFunction1D::smoothness() const noexcept {
  if (family_ == Family::callback) return smoothness_;
  return std::numeric_limits<int>::max();
}

TestFunction1D TestFunction1D::derivative(int m) const {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be non-negative");
  switch (family_) {
    case Family::power: {
      double c = coeff_;
      for (int i = 0; i < m; ++i) c *= (lambda_ - i);
      return power(lambda_ - m, c);
    }
    case Family::exp_decay: return exp_decay(rate_, coeff_ * std::pow(-rate_, m));
    default: break;
  }
  throw Error(ErrorCode::NonDifferentiable, "no closed-form derivative for this function family");
}

// ---------------------------------------------------------------- one variable

ScalarValue kober_first(const ScalarOpSpec& spec, const TestFunction1D& f, double u, const QuadConfig& q) {
  check_first_kind(spec, u, "kober1");
  if (f.family() == TestFunction1D::Family::power) {
    require(spec.zeta + f.lambda() > -1.0, "kober1: zeta + lambda must exceed -1 for the power family");
  }
  const QuadResult r = integrate_jacobi([&](double t) { return f(u * t); }, spec.alpha - 1.0, spec.zeta, q,
                                        first_kind_layer(variation_scale(f), u));
  const double scale = std::exp(-ln_gamma(spec.alpha));
  return {scale * r.value, scale * r.last_delta};
}

ScalarValue kober_second(const ScalarOpSpec& spec, const TestFunction1D& f, double u, const QuadConfig& q) {
  require(spec.alpha > 0.0, "kober2: order alpha must be positive");
  require(u > 0.0, "kober2: evaluation point must be positive");
  const TailPlan plan = second_kind_plan(spec.zeta, f.decay(), "kober2");
  const QuadResult r = integrate_jacobi([&](double t) { return tpow(t, plan.residual_exp) * f(u / t); },
                                        spec.alpha - 1.0, plan.weight_exp, q, second_kind_layer(variation_scale(f), u));
  const double scale = std::exp(-ln_gamma(spec.alpha));
  return {scale * r.value, scale * r.last_delta};
}

ScalarValue riemann_liouville(const ScalarOpSpec& spec, const TestFunction1D& f, double x, const QuadConfig& q) {
  require(spec.alpha > 0.0, "riemann-liouville: order alpha must be positive");
  const double a = spec.lower;
  require(x > a, "riemann-liouville: x must exceed the lower limit");
  const double len = x - a;
  double weight_exp = 0.0;
  std::function<double(double)> g = [&](double t) { return f(a + len * t); };
  if (a == 0.0 && f.family() == TestFunction1D::Family::power && f.lambda() < 0.0) {
    require(f.lambda() > -1.0, "riemann-liouville: power family needs lambda > -1");
    weight_exp = f.lambda();
    g = [&](double) { return f(len); };
  }
  const QuadResult r = integrate_jacobi(g, spec.alpha - 1.0, weight_exp, q);
  const double scale = std::exp(spec.alpha * std::log(len) - ln_gamma(spec.alpha));
  return {scale * r.value, scale * r.last_delta};
}

namespace {

// 1/Gamma(alpha) int_0^inf w^(alpha-1) h(w) dw with h = O(w^-decay).
ScalarValue half_line(double alpha, const std::function<double(double)>& h, double decay, double split,
                      const QuadConfig& q, const char* name) {
  require(alpha > 0.0, std::string(name) + ": order alpha must be positive");
  if (!(decay > alpha)) {
    throw Error(ErrorCode::TailDivergence, std::string(name) + ": function decay " + std::to_string(decay) +
                                               " must exceed alpha = " + std::to_string(alpha));
  }
  const double c = split;
  const QuadResult head = integrate_jacobi([&](double t) { return h(c * t); }, 0.0, alpha - 1.0, q);
  QuadResult tail;
  if (std::isinf(decay)) {
    tail = integrate_jacobi([&](double t) { return std::pow(t, -alpha - 1.0) * h(c / t); }, 0.0, 0.0, q);
  } else {
    tail = integrate_jacobi([&](double t) { return std::pow(t, -decay) * h(c / t); }, 0.0, decay - alpha - 1.0, q);
  }
  const double scale = std::exp(alpha * std::log(c) - ln_gamma(alpha));
  return {scale * (head.value + tail.value), scale * (head.last_delta + tail.last_delta)};
}

}  // namespace

ScalarValue weyl_right(const ScalarOpSpec& spec, const TestFunction1D& f, double x, const QuadConfig& q) {
  return half_line(spec.alpha, [&](double w) { return f(x + w); }, f.decay(), 1.0 + std::abs(x), q, "weyl-right");
}

ScalarValue weyl_left(const ScalarOpSpec& spec, const TestFunction1D& f, double x, const QuadConfig& q) {
  return half_line(spec.alpha, [&](double w) { return f(x - w); }, f.decay(), 1.0 + std::abs(x), q, "weyl-left");
}

ScalarValue saigo_first(const ScalarOpSpec& spec, const TestFunction1D& f, double u, const QuadConfig& q) {
  check_first_kind(spec, u, "saigo1");
  const double a = spec.alpha + spec.saigo_beta;
  const double b = -spec.saigo_gamma;
  const double c = spec.alpha;
  const QuadResult r = integrate_jacobi(
      [&](double t) { return gauss_2f1(a, b, c, 1.0 - t) * f(u * t); }, spec.alpha - 1.0, spec.zeta, q,
      first_kind_layer(variation_scale(f), u));
  const double scale = std::exp(-ln_gamma(spec.alpha));
  return {scale * r.value, scale * r.last_delta};
}

ScalarValue evaluate(const ScalarOpSpec& spec, const TestFunction1D& f, double point, const QuadConfig& q) {
  switch (spec.kind) {
    case ScalarOpKind::kober1: return kober_first(spec, f, point, q);
    case ScalarOpKind::kober2: return kober_second(spec, f, point, q);
    case ScalarOpKind::riemann_liouville: return riemann_liouville(spec, f, point, q);
    case ScalarOpKind::weyl_left: return weyl_left(spec, f, point, q);
    case ScalarOpKind::weyl_right: return weyl_right(spec, f, point, q);
    case ScalarOpKind::saigo1: return saigo_first(spec, f, point, q);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown operator kind");
}

// ---------------------------------------------------------------- derivatives

TestFunction1D frac_derivative_power(double alpha, const TestFunction1D& f) {
  if (f.family() != TestFunction1D::Family::power) {
    throw Error(ErrorCode::InvalidArgument, "closed-form fractional derivative needs the power family");
  }
  require(alpha > 0.0, "fractional derivative: order must be positive");
  require(f.lambda() > -1.0, "fractional derivative: power family needs lambda > -1");
  const double lambda = f.lambda();
  const double c = f.coeff() * std::exp(ln_gamma(lambda + 1.0)) * recip_gamma(lambda + 1.0 - alpha);
  return TestFunction1D::power(lambda - alpha, c);
}

ScalarValue frac_derivative(double alpha, const TestFunction1D& f, double x, const QuadConfig& q) {
  require(alpha > 0.0, "fractional derivative: order must be positive");
  require(x > 0.0, "fractional derivative: x must be positive");
  const int m = static_cast<int>(std::floor(alpha)) + 1;
  const double mu = m - alpha;

  if (f.family() == TestFunction1D::Family::power) {
    return {frac_derivative_power(alpha, f)(x), 0.0};
  }

  if (f.family() == TestFunction1D::Family::exp_decay) {
    // D^m I^mu f = sum_{i<m} f^(i)(0) x^(i-alpha)/Gamma(i+1-alpha) + I^mu f^(m)
    double boundary = 0.0;
    for (int i = 0; i < m; ++i) {
      boundary += f.derivative(i)(0.0) * std::pow(x, i - alpha) * recip_gamma(i + 1.0 - alpha);
    }
    ScalarOpSpec rl{ScalarOpKind::riemann_liouville, mu};
    const ScalarValue inner = riemann_liouville(rl, f.derivative(m), x, q);
    return {boundary + inner.value, inner.quad_delta};
  }

  if (f.smoothness() < m) {
    throw Error(ErrorCode::NonDifferentiable, "fractional derivative of order " + std::to_string(alpha) +
                                                  " needs a function declared at least " + std::to_string(m) +
                                                  " times differentiable");
  }
  ScalarOpSpec rl{ScalarOpKind::riemann_liouville, mu};
  double worst_delta = 0.0;
  auto F = [&](double y) {
    const ScalarValue v = riemann_liouville(rl, f, y, q);
    worst_delta = std::max(worst_delta, v.quad_delta);
    return v.value;
  };
  const double h = fd_step(q.rel_tol, m, x);
  const double d = derivative_fd(F, x, m, h);
  return {d, worst_delta / std::pow(h, m)};
}

// ---------------------------------------------------------------- multivariable

MultiFunction MultiFunction::separable(std::vector<TestFunction1D> factors) {
  MultiFunction f;
  for (const auto& g : factors) f.decay.push_back(g.decay());
  int smooth = std::numeric_limits<int>::max();
  for (const auto& g : factors) smooth = std::min(smooth, g.smoothness());
  f.smoothness = smooth;
  f.factors = std::move(factors);
  f.fn = [fs = f.factors](std::span<const double> v) {
    double p = 1.0;
    for (std::size_t j = 0; j < fs.size(); ++j) p *= fs[j](v[j]);
    return p;
  };
  return f;
}

MultiFunction MultiFunction::general(std::function<double(std::span<const double>)> fn, std::vector<double> decay,
                                     int smoothness) {
  MultiFunction f;
  f.fn = std::move(fn);
  f.decay = std::move(decay);
  f.smoothness = smoothness;
  return f;
}

ScalarValue multivar_op(OperatorKind kind, const std::vector<KernelPair>& params, const MultiFunction& f,
                        std::span<const double> u, const QuadConfig& q) {
  const std::size_t k = params.size();
  if (k < 1 || k > 3) throw Error(ErrorCode::InvalidArgument, "multivariable operators support 1 <= k <= 3");
  if (u.size() != k || std::size_t(f.arity()) != k) {
    throw Error(ErrorCode::DimensionMismatch, "parameter, point and function arity must agree");
  }
  std::vector<double> wa(k), wb(k), resid(k, 0.0), layers(k, 0.0);
  double log_scale = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::string tag = "variable " + std::to_string(j + 1);
    require(params[j].alpha > 0.0, tag + ": alpha must be positive");
    require(u[j] > 0.0, tag + ": evaluation point must be positive");
    wa[j] = params[j].alpha - 1.0;
    log_scale -= ln_gamma(params[j].alpha);
    const double scale = f.is_separable() ? variation_scale(f.factors[j]) : 1.0;
    layers[j] = kind == OperatorKind::first ? first_kind_layer(scale, u[j]) : second_kind_layer(scale, u[j]);
    if (kind == OperatorKind::first) {
      require(params[j].zeta > -1.0, tag + ": zeta must exceed -1");
      wb[j] = params[j].zeta;
    } else {
      const TailPlan plan = second_kind_plan(params[j].zeta, f.decay[j], tag.c_str());
      wb[j] = plan.weight_exp;
      resid[j] = plan.residual_exp;
    }
  }
  std::vector<double> v(k);
  const QuadResult r = integrate_jacobi_tensor(
      [&](const std::vector<double>& t) {
        double w = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
          if (kind == OperatorKind::first) {
            v[j] = u[j] * t[j];
          } else {
            v[j] = u[j] / t[j];
            w *= tpow(t[j], resid[j]);
          }
        }
        return w * f(v);
      },
      wa, wb, q, layers);
  const double scale = std::exp(log_scale);
  return {scale * r.value, scale * r.last_delta};
}

ScalarValue multivar_frac_derivative(std::span<const double> alphas, const MultiFunction& f, std::span<const double> x,
                                     const QuadConfig& q) {
  const std::size_t k = alphas.size();
  if (k < 1 || k > 2) throw Error(ErrorCode::InvalidArgument, "multivariable derivatives support k <= 2");
  if (x.size() != k || std::size_t(f.arity()) != k) {
    throw Error(ErrorCode::DimensionMismatch, "order, point and function arity must agree");
  }
  if (f.is_separable()) {
    double prod = 1.0, delta = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const ScalarValue d = frac_derivative(alphas[j], f.factors[j], x[j], q);
      prod *= d.value;
      delta += std::abs(d.quad_delta);
    }
    return {prod, delta};
  }
  if (k == 1) {
    const TestFunction1D g = TestFunction1D::callback(
        [&](double v) { return f(std::span<const double>(&v, 1)); }, f.decay[0], f.smoothness);
    return frac_derivative(alphas[0], g, x[0], q);
  }

  std::vector<int> m(k);
  std::vector<double> mu(k), wa(k), wb(k, 0.0);
  double log_norm = 0.0;
  int max_m = 0;
  for (std::size_t j = 0; j < k; ++j) {
    require(alphas[j] > 0.0, "fractional derivative: orders must be positive");
    require(x[j] > 0.0, "fractional derivative: x must be positive");
    m[j] = static_cast<int>(std::floor(alphas[j])) + 1;
    mu[j] = m[j] - alphas[j];
    wa[j] = mu[j] - 1.0;
    log_norm -= ln_gamma(mu[j]);
    max_m = std::max(max_m, m[j]);
  }
  if (f.smoothness < max_m) {
    throw Error(ErrorCode::NonDifferentiable, "mixed fractional derivative needs a function declared at least " +
                                                  std::to_string(max_m) + " times differentiable");
  }
  double worst_delta = 0.0;
  auto F = [&](double y0, double y1) {
    const double y[2] = {y0, y1};
    double v[2];
    const QuadResult r = integrate_jacobi_tensor(
        [&](const std::vector<double>& t) {
          v[0] = y[0] * t[0];
          v[1] = y[1] * t[1];
          return f(std::span<const double>(v, 2));
        },
        wa, wb, q);
    worst_delta = std::max(worst_delta, r.last_delta);
    return std::exp(log_norm + mu[0] * std::log(y0) + mu[1] * std::log(y1)) * r.value;
  };
  const double h0 = fd_step(q.rel_tol, m[0] + m[1], x[0]);
  const double h1 = fd_step(q.rel_tol, m[0] + m[1], x[1]);
  auto mixed = [&](double s) {
    // tensor product of one-dimensional central stencils
    double total = 0.0;
    double b0 = 1.0;
    for (int i = 0; i <= m[0]; ++i) {
      double b1 = 1.0;
      for (int j = 0; j <= m[1]; ++j) {
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        total += sign * b0 * b1 * F(x[0] + (0.5 * m[0] - i) * h0 * s, x[1] + (0.5 * m[1] - j) * h1 * s);
        b1 = b1 * (m[1] - j) / (j + 1.0);
      }
      b0 = b0 * (m[0] - i) / (i + 1.0);
    }
    return total / (std::pow(h0 * s, m[0]) * std::pow(h1 * s, m[1]));
  };
  const double coarse = mixed(1.0);
  const double fine = mixed(0.5);
  return {(4.0 * fine - coarse) / 3.0, worst_delta};
}

}  // namespace kober
