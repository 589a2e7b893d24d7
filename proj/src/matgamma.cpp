#include "kober/matgamma.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "kober/error.hpp"

namespace kober {

namespace {

constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczosCoef = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5,
};

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::DomainError, "ln_gamma requires a finite positive argument, got " + std::to_string(x));
  }
  // the approximation is tuned for x >= 0.5; shift smaller arguments up
  if (x < 0.5) return ln_gamma(x + 1.0) - std::log(x);
  const double z = x - 1.0;
  double a = kLanczosCoef[0];
  for (std::size_t k = 1; k < kLanczosCoef.size(); ++k) a += kLanczosCoef[k] / (z + double(k));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double ln_gamma_p(int p, double alpha) {
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "dimension p must be >= 1");
  const double bound = (p - 1) / 2.0;
  if (!(alpha > bound)) {
    throw Error(ErrorCode::DomainError, "Gamma_p requires alpha > (p-1)/2 = " + std::to_string(bound) +
                                            ", got alpha = " + std::to_string(alpha) + " (p=" + std::to_string(p) + ")");
  }
  double s = p * (p - 1) / 4.0 * std::log(std::numbers::pi);
  for (int i = 0; i < p; ++i) s += ln_gamma(alpha - i / 2.0);
  return s;
}

double gamma_p(int p, double alpha) { return std::exp(ln_gamma_p(p, alpha)); }

double ln_gamma_ratio(const GammaRatioSpec& spec) {
  double s = 0.0;
  for (double a : spec.numerator) s += ln_gamma_p(spec.p, a);
  for (double a : spec.denominator) s -= ln_gamma_p(spec.p, a);
  return s;
}

double gamma_ratio(const GammaRatioSpec& spec) {
  const double l = ln_gamma_ratio(spec);
  if (l > 709.78) throw Error(ErrorCode::Overflow, "gamma ratio exceeds double range (ln = " + std::to_string(l) + ")");
  return std::exp(l);
}

}  // namespace kober
