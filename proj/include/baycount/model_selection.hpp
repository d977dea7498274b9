#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "baycount/count_model.hpp"
#include "baycount/gibbs.hpp"

namespace baycount {

struct LoglikEstimate {
  double mean = 0.0;
  double lower = 0.0;  // 2.5% empirical quantile of the kept-draw trace
  double upper = 0.0;  // 97.5%
};

/// Mean and 95% interval of the per-draw log-likelihood trace.
LoglikEstimate estimate_loglik(std::span<const double> trace);
LoglikEstimate estimate_loglik(const ChainOutput& chain);

/// 2 L(K) - L(K-1) - L(K+1) for every interior position of the sequence.
std::vector<double> second_difference(std::span<const double> loglik);

struct SelectionReport {
  std::vector<int> k_grid;
  std::vector<double> loglik_mean;
  std::vector<std::pair<double, double>> loglik_ci;
  std::vector<double> delta2;  // delta2[m] belongs to k_grid[m + 1]
  int k_hat = 0;
};

/// Builds the report from per-K estimates over the contiguous grid
/// k_min..k_min+n-1. Ties in the argmax go to the smallest K.
SelectionReport assemble_report(int k_min, std::span<const LoglikEstimate> estimates);

/// Receives each finished chain (K, chain) in grid order.
using ChainSink = std::function<void(int, ChainOutput&&)>;

/// Seed of the chain at K, derived from the master seed.
std::uint64_t chain_seed(std::uint64_t master_seed, int k);

/// Runs one chain per K in [k_min, k_max] and picks the maximizer of the
/// second difference. `workers` chains run concurrently; results do not
/// depend on it.
SelectionReport select_k(const CountMatrix& y, int k_min, int k_max, const Hyperparameters& hp,
                         const ChainConfig& cfg, int workers = 1, const ChainSink& sink = {});

}  // namespace baycount
