#pragma once

#include <span>
#include <vector>

namespace kober {

/// ln Gamma(x) for x > 0 via a Lanczos approximation (g = 607/128, 15 terms).
double ln_gamma(double x);

/// ln Gamma_p(alpha) = p(p-1)/4 ln(pi) + sum_{i=0}^{p-1} ln Gamma(alpha - i/2),
/// defined for alpha > (p-1)/2.
double ln_gamma_p(int p, double alpha);
double gamma_p(int p, double alpha);

struct GammaRatioSpec {
  int p = 1;
  std::vector<double> numerator;
  std::vector<double> denominator;
};

/// prod Gamma_p(num) / prod Gamma_p(den), accumulated in log space.
double gamma_ratio(const GammaRatioSpec& spec);
double ln_gamma_ratio(const GammaRatioSpec& spec);

}  // namespace kober
