#include "kober/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "kober/error.hpp"

namespace kober {

void validate(const MCConfig& mc) {
  if (mc.n_samples < 1000) throw Error(ErrorCode::InvalidArgument, "MC needs n_samples >= 1000");
  if (mc.n_streams < 2 || std::size_t(mc.n_streams) > mc.n_samples) {
    throw Error(ErrorCode::InvalidArgument, "MC needs 2 <= n_streams <= n_samples");
  }
}

std::vector<McEstimate> mc_mean_vec(const MCConfig& mc, int dim, const std::function<void(Rng&, std::span<double>)>& draw) {
  validate(mc);
  const int streams = mc.n_streams;
  const std::size_t base = mc.n_samples / streams;
  const std::size_t extra = mc.n_samples % streams;

  // per stream: count, then dim sums and dim sums of squares
  std::vector<std::size_t> counts(streams);
  std::vector<double> sums(std::size_t(streams) * dim, 0.0), sq(std::size_t(streams) * dim, 0.0);

  auto run_stream = [&](int b) {
    const std::size_t n = base + (std::size_t(b) < extra ? 1 : 0);
    counts[b] = n;
    const RngStream id{mc.seed, mc.stream_offset + std::uint64_t(b)};
    Rng rng(id);
    Rng mirror(id, true);
    std::vector<double> out(dim), out2(dim);
    double* s = &sums[std::size_t(b) * dim];
    double* s2 = &sq[std::size_t(b) * dim];
    for (std::size_t i = 0; i < n; ++i) {
      draw(rng, out);
      if (mc.antithetic) {
        draw(mirror, out2);
        for (int d = 0; d < dim; ++d) out[d] = 0.5 * (out[d] + out2[d]);
      }
      for (int d = 0; d < dim; ++d) {
        s[d] += out[d];
        s2[d] += out[d] * out[d];
      }
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min<int>(streams, hw > 1 ? int(hw) : 1);
  if (workers <= 1) {
    for (int b = 0; b < streams; ++b) run_stream(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int b = next++; b < streams; b = next++) {
          if (failed) return;
          try {
            run_stream(b);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
            return;
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<McEstimate> out(dim);
  const double n_total = double(mc.n_samples);
  for (int d = 0; d < dim; ++d) {
    McEstimate& e = out[d];
    e.n = mc.n_samples;
    double total = 0.0, total_sq = 0.0;
    e.batch_means.resize(streams);
    for (int b = 0; b < streams; ++b) {
      total += sums[std::size_t(b) * dim + d];
      total_sq += sq[std::size_t(b) * dim + d];
      e.batch_means[b] = sums[std::size_t(b) * dim + d] / double(counts[b]);
    }
    e.mean = total / n_total;
    double var_batch = 0.0;
    for (int b = 0; b < streams; ++b) {
      const double dev = e.batch_means[b] - e.mean;
      var_batch += double(counts[b]) * dev * dev;
    }
    var_batch /= n_total * (streams - 1);
    e.se = std::sqrt(var_batch);
    const double var_iid = std::max(0.0, total_sq / n_total - e.mean * e.mean) / (n_total - 1.0);
    const double se_iid = std::sqrt(var_iid);
    if (!std::isfinite(e.se) || !std::isfinite(e.mean)) {
      e.se_converged = false;
    } else if (se_iid == 0.0 || e.se == 0.0) {
      e.se_converged = (se_iid == 0.0 && e.se == 0.0);
    } else {
      const double ratio = e.se / se_iid;
      e.se_converged = ratio > 0.5 && ratio < 2.0;
    }
  }
  return out;
}

McEstimate mc_mean(const MCConfig& mc, const std::function<double(Rng&)>& draw) {
  return mc_mean_vec(mc, 1, [&](Rng& rng, std::span<double> out) { out[0] = draw(rng); }).front();
}

double z_score(double a, double se_a, double b, double se_b) {
  const double se = std::sqrt(se_a * se_a + se_b * se_b);
  if (se == 0.0) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(a - b) / se;
}

}  // namespace kober
