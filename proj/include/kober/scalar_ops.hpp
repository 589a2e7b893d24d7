#pragma once

// One-variable and multivariable scalar fractional integrals: Kober of the
// first and second kind, Riemann-Liouville, Weyl, Saigo, Riemann-Liouville
// fractional derivatives, and the product-kernel multivariable operators.
//
// Every operator is reduced to an integral over (0, 1) whose endpoint
// singularities are carried by a Gauss-Jacobi weight.

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "kober/common.hpp"
#include "kober/quadrature.hpp"

namespace kober {

class TestFunction1D {
 public:
  enum class Family { power, exp_decay, power_times_exp, callback };

  /// coeff * v^lambda
  static TestFunction1D power(double lambda, double coeff = 1.0);
  /// coeff * exp(-rate v)
  static TestFunction1D exp_decay(double rate = 1.0, double coeff = 1.0);
  /// v^lambda exp(-rate v)
  static TestFunction1D power_times_exp(double lambda, double rate = 1.0);
  /// decay: f(v) = O(v^-decay) as v -> infinity (use infinity() for
  /// exponential decay). smoothness: number of continuous derivatives the
  /// caller vouches for; -1 means undeclared.
  static TestFunction1D callback(std::function<double(double)> fn, double decay = 0.0, int smoothness = -1);

  double operator()(double v) const;

  Family family() const noexcept { return family_; }
  double lambda() const noexcept { return lambda_; }
  double rate() const noexcept { return rate_; }
  double coeff() const noexcept { return coeff_; }
  double decay() const noexcept;
  int smoothness() const noexcept;

  /// m-th derivative for the power and exp_decay families.
  TestFunction1D derivative(int m) const;

  static constexpr double infinity() noexcept { return std::numeric_limits<double>::infinity(); }

 private:
  Family family_ = Family::power;
  double lambda_ = 0.0;
  double rate_ = 1.0;
  double coeff_ = 1.0;
  double decay_ = 0.0;
  int smoothness_ = -1;
  std::function<double(double)> fn_;
};

enum class ScalarOpKind { kober1, kober2, riemann_liouville, weyl_left, weyl_right, saigo1 };

struct ScalarOpSpec {
  ScalarOpKind kind = ScalarOpKind::kober1;
  double alpha = 1.0;
  double zeta = 0.0;
  double lower = 0.0;        // Riemann-Liouville lower limit
  double saigo_beta = 0.0;   // Saigo kernel 2F1(alpha + beta, -gamma; alpha; 1 - v/u)
  double saigo_gamma = 0.0;
};

struct ScalarValue {
  double value = 0.0;
  double quad_delta = 0.0;
};

/// u^(-zeta-alpha)/Gamma(alpha) int_0^u (u-v)^(alpha-1) v^zeta f(v) dv
ScalarValue kober_first(const ScalarOpSpec& spec, const TestFunction1D& f, double u, const QuadConfig& q = {});
/// u^zeta/Gamma(alpha) int_u^inf v^(-zeta-alpha) (v-u)^(alpha-1) f(v) dv
ScalarValue kober_second(const ScalarOpSpec& spec, const TestFunction1D& f, double u, const QuadConfig& q = {});
/// 1/Gamma(alpha) int_a^x (x-v)^(alpha-1) f(v) dv
ScalarValue riemann_liouville(const ScalarOpSpec& spec, const TestFunction1D& f, double x, const QuadConfig& q = {});
/// 1/Gamma(alpha) int_x^inf (v-x)^(alpha-1) f(v) dv
ScalarValue weyl_right(const ScalarOpSpec& spec, const TestFunction1D& f, double x, const QuadConfig& q = {});
/// 1/Gamma(alpha) int_-inf^x (x-v)^(alpha-1) f(v) dv; f.decay() is read as
/// the decay rate towards -infinity.
ScalarValue weyl_left(const ScalarOpSpec& spec, const TestFunction1D& f, double x, const QuadConfig& q = {});
/// Kober kernel of the first kind multiplied by 2F1(alpha+beta, -gamma; alpha; 1 - v/u).
ScalarValue saigo_first(const ScalarOpSpec& spec, const TestFunction1D& f, double u, const QuadConfig& q = {});

/// Dispatches on spec.kind.
ScalarValue evaluate(const ScalarOpSpec& spec, const TestFunction1D& f, double point, const QuadConfig& q = {});

/// Riemann-Liouville derivative D^m I^(m-alpha) f with m = floor(alpha) + 1.
ScalarValue frac_derivative(double alpha, const TestFunction1D& f, double x, const QuadConfig& q = {});

/// Closed form of the derivative for the power family, itself a power function.
TestFunction1D frac_derivative_power(double alpha, const TestFunction1D& f);

/// A function of k scalar variables.
struct MultiFunction {
  std::function<double(std::span<const double>)> fn;
  /// Per-variable decay exponents (see TestFunction1D::callback).
  std::vector<double> decay;
  int smoothness = -1;
  /// Non-empty when f is the product of these one-variable factors.
  std::vector<TestFunction1D> factors;

  static MultiFunction separable(std::vector<TestFunction1D> factors);
  static MultiFunction general(std::function<double(std::span<const double>)> fn, std::vector<double> decay,
                               int smoothness = -1);

  int arity() const noexcept { return static_cast<int>(decay.size()); }
  bool is_separable() const noexcept { return !factors.empty(); }
  double operator()(std::span<const double> v) const { return fn(v); }
};

/// Product-kernel Kober operator in k <= 3 scalar variables, evaluated with
/// tensor-product Gauss-Jacobi quadrature.
ScalarValue multivar_op(OperatorKind kind, const std::vector<KernelPair>& params, const MultiFunction& f,
                        std::span<const double> u, const QuadConfig& q = {});

/// Mixed Riemann-Liouville derivative of orders alpha_1..alpha_k (k <= 2).
ScalarValue multivar_frac_derivative(std::span<const double> alphas, const MultiFunction& f, std::span<const double> x,
                                     const QuadConfig& q = {});

}  // namespace kober
