#include "kober/hypergeometric.hpp"

#include <cmath>
#include <string>

#include "kober/error.hpp"

namespace kober {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

double recip_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

double series(double a, double b, double c, double z, const Hyp2F1Options& opt) {
  double sum = 1.0;
  double term = 1.0;
  for (int n = 0; n < opt.max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    const double ratio = std::abs((a + n + 1.0) * (b + n + 1.0) / ((c + n + 1.0) * (n + 2.0)) * z);
    if (std::abs(term) <= opt.rel_tol * std::abs(sum) && ratio < 1.0) return sum;
  }
  throw Error(ErrorCode::NonConvergence, "2F1 series did not converge within " + std::to_string(opt.max_terms) +
                                             " terms at z = " + std::to_string(z));
}

}  // namespace

double gauss_2f1(double a, double b, double c, double z, const Hyp2F1Options& opt) {
  if (is_nonpositive_integer(c)) {
    throw Error(ErrorCode::DomainError, "2F1 lower parameter c must not be a non-positive integer");
  }
  if (!(z < 1.0) || !std::isfinite(z)) {
    throw Error(ErrorCode::DomainError, "2F1 argument must be finite and below 1, got " + std::to_string(z));
  }
  if (a == 0.0 || b == 0.0 || z == 0.0) return 1.0;
  if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return series(a, b, c, z, opt);

  if (z < -0.5) {
    // Pfaff: 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))
    return std::pow(1.0 - z, -a) * gauss_2f1(a, c - b, c, z / (z - 1.0), opt);
  }
  if (z <= 0.5) return series(a, b, c, z, opt);

  const double s = c - a - b;
  if (near_integer(s)) return series(a, b, c, z, opt);

  const double w = 1.0 - z;
  const double g_c = std::tgamma(c);
  const double t1 = g_c * std::tgamma(s) * recip_gamma(c - a) * recip_gamma(c - b);
  const double t2 = g_c * std::tgamma(-s) * recip_gamma(a) * recip_gamma(b);
  double out = 0.0;
  if (t1 != 0.0) out += t1 * series(a, b, 1.0 - s, w, opt);
  if (t2 != 0.0) out += t2 * std::pow(w, s) * series(c - a, c - b, 1.0 + s, w, opt);
  return out;
}

}  // namespace kober
