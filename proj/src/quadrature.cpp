#include "kober/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <tuple>

#include "kober/error.hpp"
#include "kober/matgamma.hpp"

namespace kober {

namespace {

// Implicit QL on a symmetric tridiagonal matrix, tracking only the first
// component of each eigenvector (all Golub-Welsch needs).
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  constexpr double eps = 2.220446049250313e-16;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 100) throw Error(ErrorCode::NonConvergence, "tridiagonal eigensolver did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = (r = std::hypot(f, g));
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

GaussRule build_rule(int n, double a, double b) {
  // Jacobi polynomials P^(a,b) on [-1,1] with weight (1-x)^a (1+x)^b.
  std::vector<double> diag(n), off(n, 0.0), z(n, 0.0);
  const double ab = a + b;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      diag[i] = (b - a) / (ab + 2.0);
    } else {
      const double t = 2.0 * i + ab;
      diag[i] = (b * b - a * a) / (t * (t + 2.0));
    }
  }
  for (int i = 1; i < n; ++i) {
    double beta;
    if (i == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double t = 2.0 * i + ab;
      beta = 4.0 * i * (i + a) * (i + b) * (i + ab) / (t * t * (t + 1.0) * (t - 1.0));
    }
    off[i - 1] = std::sqrt(beta);
  }
  z[0] = 1.0;
  tridiagonal_ql(diag, off, z);

  const double mass = std::exp(ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] < diag[y]; });
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (1.0 + diag[order[i]]);
    rule.weights[i] = mass * z[order[i]] * z[order[i]];
  }
  return rule;
}

struct RuleCache {
  std::mutex mu;
  std::map<std::tuple<int, double, double>, std::unique_ptr<const GaussRule>> rules;
};

RuleCache& cache() {
  static RuleCache c;
  return c;
}

bool converged(double now, double prev, double l1, double tol) {
  const double delta = std::abs(now - prev);
  return delta <= tol * std::max(std::abs(now), 1e-8 * l1) || delta == 0.0 || l1 < 1e-280;
}

}  // namespace

void validate(const QuadConfig& q) {
  if (q.base_nodes < 2 || q.max_doublings < 0 || !(q.rel_tol > 0.0 && q.rel_tol < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "quadrature config needs base_nodes >= 2, max_doublings >= 0, rel_tol in (0,1)");
  }
}

const GaussRule& gauss_jacobi_unit(int n, double a, double b) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "node count must be positive");
  if (!(a > -1.0) || !(b > -1.0)) {
    throw Error(ErrorCode::DomainError,
                "Jacobi weight exponents must exceed -1, got a = " + std::to_string(a) + ", b = " + std::to_string(b));
  }
  RuleCache& c = cache();
  const auto key = std::make_tuple(n, a, b);
  {
    std::lock_guard lock(c.mu);
    if (auto it = c.rules.find(key); it != c.rules.end()) return *it->second;
  }
  auto rule = std::make_unique<const GaussRule>(build_rule(n, a, b));
  std::lock_guard lock(c.mu);
  auto [it, inserted] = c.rules.try_emplace(key, std::move(rule));
  return *it->second;
}

namespace {

bool graded(double layer) { return layer != 0.0 && std::abs(layer) < 0.25; }

}  // namespace

GaussRule graded_jacobi_rule(int n, double a, double b, double layer) {
  if (!graded(layer)) return gauss_jacobi_unit(n, a, b);
  if (layer < 0.0) {
    GaussRule out = graded_jacobi_rule(n, b, a, -layer);
    for (double& t : out.nodes) t = 1.0 - t;
    return out;
  }
  GaussRule out;
  auto push = [&](double t, double w) {
    out.nodes.push_back(t);
    out.weights.push_back(w);
  };
  const GaussRule& head = gauss_jacobi_unit(n, 0.0, b);
  const double hs = std::pow(layer, b + 1.0);
  for (int i = 0; i < n; ++i) {
    const double t = layer * head.nodes[i];
    push(t, hs * head.weights[i] * std::pow(1.0 - t, a));
  }
  const GaussRule& mid = gauss_jacobi_unit(n, 0.0, 0.0);
  double c = layer;
  while (4.0 * c <= 0.25) {
    for (int i = 0; i < n; ++i) {
      const double t = c + 3.0 * c * mid.nodes[i];
      push(t, 3.0 * c * mid.weights[i] * std::pow(1.0 - t, a) * std::pow(t, b));
    }
    c *= 4.0;
  }
  const GaussRule& tail = gauss_jacobi_unit(n, a, 0.0);
  const double ts = std::pow(1.0 - c, a + 1.0);
  for (int i = 0; i < n; ++i) {
    const double t = c + (1.0 - c) * tail.nodes[i];
    push(t, ts * tail.weights[i] * std::pow(t, b));
  }
  return out;
}

QuadResult integrate_jacobi(const std::function<double(double)>& g, double a, double b, const QuadConfig& q,
                            double layer) {
  validate(q);
  auto apply = [&](int n, double& l1) {
    GaussRule local;
    if (graded(layer)) local = graded_jacobi_rule(n, a, b, layer);
    const GaussRule& r = graded(layer) ? local : gauss_jacobi_unit(n, a, b);
    const int m = static_cast<int>(r.nodes.size());
    double s = 0.0;
    l1 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = r.weights[i] * g(r.nodes[i]);
      s += v;
      l1 += std::abs(v);
    }
    return s;
  };
  int n = q.base_nodes;
  double l1 = 0.0;
  double prev = apply(n, l1);
  double delta = 0.0;
  for (int d = 0; d < q.max_doublings; ++d) {
    n *= 2;
    const double now = apply(n, l1);
    delta = std::abs(now - prev);
    if (!std::isfinite(now)) break;
    if (converged(now, prev, l1, q.rel_tol)) return {now, delta, n};
    prev = now;
  }
  throw Error(ErrorCode::QuadratureNotConverged,
              "successive estimates still differ by " + std::to_string(delta) + " at " + std::to_string(n) + " nodes");
}

QuadResult integrate_jacobi_tensor(const std::function<double(const std::vector<double>&)>& g,
                                   const std::vector<double>& a, const std::vector<double>& b, const QuadConfig& q,
                                   const std::vector<double>& layers) {
  validate(q);
  const std::size_t k = a.size();
  if (k == 0 || b.size() != k) throw Error(ErrorCode::DimensionMismatch, "tensor quadrature needs matching exponent lists");
  if (!layers.empty() && layers.size() != k) throw Error(ErrorCode::DimensionMismatch, "one layer per axis");
  auto apply = [&](int n, double& l1) {
    std::vector<GaussRule> local(k);
    std::vector<const GaussRule*> rules(k);
    std::vector<int> sizes(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double layer = layers.empty() ? 0.0 : layers[i];
      if (graded(layer)) {
        local[i] = graded_jacobi_rule(n, a[i], b[i], layer);
        rules[i] = &local[i];
      } else {
        rules[i] = &gauss_jacobi_unit(n, a[i], b[i]);
      }
      sizes[i] = static_cast<int>(rules[i]->nodes.size());
    }
    std::vector<int> idx(k, 0);
    std::vector<double> t(k);
    double s = 0.0;
    l1 = 0.0;
    for (;;) {
      double w = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        t[i] = rules[i]->nodes[idx[i]];
        w *= rules[i]->weights[idx[i]];
      }
      const double v = w * g(t);
      s += v;
      l1 += std::abs(v);
      std::size_t ax = 0;
      while (ax < k && ++idx[ax] == sizes[ax]) idx[ax++] = 0;
      if (ax == k) break;
    }
    return s;
  };
  int n = q.base_nodes;
  double l1 = 0.0;
  double prev = apply(n, l1);
  double delta = 0.0;
  for (int d = 0; d < q.max_doublings; ++d) {
    n *= 2;
    const double now = apply(n, l1);
    delta = std::abs(now - prev);
    if (!std::isfinite(now)) break;
    if (converged(now, prev, l1, q.rel_tol)) return {now, delta, n};
    prev = now;
  }
  throw Error(ErrorCode::QuadratureNotConverged,
              "successive tensor estimates still differ by " + std::to_string(delta) + " at " + std::to_string(n) +
                  " nodes per axis");
}

}  // namespace kober
