#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace kober {

struct QuadConfig {
  int base_nodes = 64;
  int max_doublings = 6;
  double rel_tol = 1e-9;
};

void validate(const QuadConfig& q);

/// Gauss rule on (0, 1) for the weight (1-t)^a t^b, a, b > -1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch construction; rules are cached and immutable once built, so
/// the returned reference stays valid for the life of the process and can be
/// read from any thread.
const GaussRule& gauss_jacobi_unit(int n, double a, double b);

/// Composite rule for the same weight, graded towards t = 0: Gauss-Jacobi
/// with the t^b weight on (0, layer), Gauss-Legendre on cells growing by a
/// factor of 4, and the (1-t)^a weight on the last cell. n nodes per cell.
/// A negative layer grades towards t = 1 instead, with cell (1 - |layer|, 1)
/// carrying the (1-t)^a weight. For |layer| >= 1/4 or layer = 0 this is
/// gauss_jacobi_unit(n, a, b).
GaussRule graded_jacobi_rule(int n, double a, double b, double layer);

struct QuadResult {
  double value = 0.0;
  double last_delta = 0.0;  // |I_n - I_{n/2}| of the accepted estimate
  int nodes = 0;
};

/// Integral over (0, 1) of (1-t)^a t^b g(t), doubling the node count from
/// q.base_nodes until successive estimates agree to q.rel_tol. Throws
/// QuadratureNotConverged when the doubling budget runs out. A positive
/// `layer` switches to graded_jacobi_rule for integrands that vary on the
/// scale t ~ layer.
QuadResult integrate_jacobi(const std::function<double(double)>& g, double a, double b, const QuadConfig& q,
                            double layer = 0.0);

/// Tensor-product version over (0, 1)^k with per-axis weights
/// (1-t_i)^a_i t_i^b_i and optional per-axis layers.
QuadResult integrate_jacobi_tensor(const std::function<double(const std::vector<double>&)>& g,
                                   const std::vector<double>& a, const std::vector<double>& b, const QuadConfig& q,
                                   const std::vector<double>& layers = {});

}  // namespace kober
