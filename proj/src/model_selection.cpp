#include "baycount/model_selection.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "baycount/stats.hpp"

namespace baycount {

LoglikEstimate estimate_loglik(std::span<const double> trace) {
  if (trace.empty()) throw std::invalid_argument("log-likelihood trace is empty");
  return LoglikEstimate{sample_mean(trace), empirical_quantile(trace, 0.025),
                        empirical_quantile(trace, 0.975)};
}

LoglikEstimate estimate_loglik(const ChainOutput& chain) {
  return estimate_loglik(chain.loglik_trace);
}

std::vector<double> second_difference(std::span<const double> loglik) {
  if (loglik.size() < 3) {
    throw std::invalid_argument("second difference needs at least three values");
  }
  std::vector<double> out(loglik.size() - 2);
  for (std::size_t m = 1; m + 1 < loglik.size(); ++m) {
    out[m - 1] = 2.0 * loglik[m] - loglik[m - 1] - loglik[m + 1];
  }
  return out;
}

SelectionReport assemble_report(int k_min, std::span<const LoglikEstimate> estimates) {
  SelectionReport report;
  for (std::size_t m = 0; m < estimates.size(); ++m) {
    report.k_grid.push_back(k_min + static_cast<int>(m));
    report.loglik_mean.push_back(estimates[m].mean);
    report.loglik_ci.emplace_back(estimates[m].lower, estimates[m].upper);
  }
  report.delta2 = second_difference(report.loglik_mean);
  // strict comparison keeps the first (smallest) K on ties
  std::size_t best = 0;
  for (std::size_t m = 1; m < report.delta2.size(); ++m) {
    if (report.delta2[m] > report.delta2[best]) best = m;
  }
  report.k_hat = report.k_grid[best + 1];
  return report;
}

std::uint64_t chain_seed(std::uint64_t master_seed, int k) {
  return mix64(master_seed ^ mix64(static_cast<std::uint64_t>(k)));
}

SelectionReport select_k(const CountMatrix& y, int k_min, int k_max, const Hyperparameters& hp,
                         const ChainConfig& cfg, int workers, const ChainSink& sink) {
  if (k_min < 1 || k_min + 2 > k_max) {
    throw std::invalid_argument("K grid needs 1 <= k_min and k_min + 2 <= k_max");
  }
  cfg.validate();
  hp.validate();
  const int grid = k_max - k_min + 1;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, grid);

  std::vector<LoglikEstimate> estimates(static_cast<std::size_t>(grid));
  std::vector<std::string> failures(static_cast<std::size_t>(grid));
  std::atomic<int> next{0};
  std::mutex sink_mutex;

  auto work = [&] {
    for (int m = next++; m < grid; m = next++) {
      const int k = k_min + m;
      try {
        ChainConfig chain_cfg = cfg;
        chain_cfg.seed = chain_seed(cfg.seed, k);
        ChainOutput chain = run_chain(y, k, hp, chain_cfg);
        estimates[static_cast<std::size_t>(m)] = estimate_loglik(chain);
        if (sink) {
          std::lock_guard lock(sink_mutex);
          sink(k, std::move(chain));
        }
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(m)] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (int m = 0; m < grid; ++m) {
    if (!failures[static_cast<std::size_t>(m)].empty()) {
      throw std::runtime_error("chain for K=" + std::to_string(k_min + m) +
                               " failed: " + failures[static_cast<std::size_t>(m)]);
    }
  }
  return assemble_report(k_min, estimates);
}

}  // namespace baycount
