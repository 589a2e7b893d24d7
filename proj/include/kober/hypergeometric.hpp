#pragma once

namespace kober {

struct Hyp2F1Options {
  int max_terms = 200000;
  double rel_tol = 1e-15;
};

/// Gauss hypergeometric 2F1(a, b; c; z) for real z < 1.
///
/// The power series is summed directly for |z| <= 0.5. For z < -0.5 the Pfaff
/// transformation maps the argument into (0, 0.5]. For 0.5 < z < 1 the
/// connection formula in 1 - z is used when c - a - b is not an integer;
/// otherwise the series is summed directly and NonConvergence is raised if
/// the term budget runs out.
double gauss_2f1(double a, double b, double c, double z, const Hyp2F1Options& opt = {});

}  // namespace kober
