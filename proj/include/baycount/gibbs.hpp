#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "baycount/count_model.hpp"
#include "baycount/rng.hpp"

namespace baycount {

struct ChainConfig {
  int burn_in = 1000;
  int total_iterations = 2000;
  int thin = 1;
  std::uint64_t seed = 1;
  bool store_draws = true;
  int threads = 1;  // workers for table allocation; 0 = all cores

  void validate() const;
  int kept_draws() const { return (total_iterations - burn_in) / thin; }
  bool keeps(int iteration) const {
    return iteration > burn_in && (iteration - burn_in) % thin == 0;
  }
};

/// Purpose tags that separate the counter-based substreams of one sweep.
enum class StreamTag : std::uint64_t {
  kInitPhi = 1,
  kInitAlpha,
  kInitR,
  kInitTheta,
  kInitZeta,
  kInitP,
  kAllocate,
  kPhi,
  kAlpha,
  kLambda,
  kSecondLevel,
  kThirdLevel,
  kGamma0,
  kR,
  kTheta,
  kZeta,
  kC,
  kC0,
  kP,
};

/// Maps factor indices to the keys their random streams are derived from.
/// Relabeling the factors of a state together with its keys reproduces the
/// relabeled trajectory exactly.
class FactorKeys {
 public:
  explicit FactorKeys(int factors);
  explicit FactorKeys(std::vector<std::uint64_t> keys);

  int size() const { return static_cast<int>(keys_.size()); }
  std::uint64_t operator[](int k) const { return keys_[static_cast<std::size_t>(k)]; }
  /// Factor indices sorted by key; every loop that accumulates over factors
  /// visits them in this order.
  std::span<const int> order() const { return order_; }
  /// New key m is old key perm[m], matching permute_factors.
  FactorKeys permuted(std::span<const int> perm) const;

 private:
  std::vector<std::uint64_t> keys_;
  std::vector<int> order_;
};

struct SweepContext {
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  const FactorKeys* keys = nullptr;
  int threads = 1;

  RngStream stream(StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0) const {
    return RngStream(seed, stream_key(static_cast<std::uint64_t>(tag), iteration, a, b));
  }
};

/// CRT table counts per cell, split across the gene effect and the K
/// factors, accumulated into marginal statistics. second_level and
/// third_level are left at zero.
AugmentedStats allocate_tables(const CountMatrix& y, const ModelState& state,
                               const SweepContext& ctx);

Eigen::MatrixXd update_phi(const AugmentedStats& stats, double eta,
                           const SweepContext& ctx);

Eigen::MatrixXd update_theta(const AugmentedStats& stats, const Eigen::VectorXd& r,
                             const SweepContext& ctx);

Eigen::VectorXd update_zeta(const AugmentedStats& stats, const ModelState& state,
                            const SweepContext& ctx);

struct GeneEffectDraw {
  Eigen::VectorXd alpha;
  double lambda;
};
GeneEffectDraw update_alpha_lambda(const AugmentedStats& stats, const ModelState& state,
                                   const Hyperparameters& hp, const SweepContext& ctx);

struct ShapeDraw {
  Eigen::VectorXd r;
  double gamma0;
  CountArray second_level;
  IndexVector third_level;
};
/// Draws the second- and third-level CRT tables from the current r and
/// gamma0, then gamma0 (with r integrated out) and r given gamma0.
ShapeDraw update_r_gamma0(const AugmentedStats& stats, const ModelState& state,
                          const Hyperparameters& hp, const SweepContext& ctx);

struct ScaleDraw {
  Eigen::VectorXd c;
  double c0;
  Eigen::VectorXd p;
};
ScaleDraw update_c_p(const AugmentedStats& stats, const ModelState& state,
                     const Hyperparameters& hp, const IndexVector& column_totals,
                     const SweepContext& ctx);

/// One blocked Gibbs sweep: allocation, phi, (alpha, lambda), (gamma0, r),
/// theta, zeta, then (c, c0, p).
ModelState gibbs_sweep(const CountMatrix& y, const ModelState& state,
                       const Hyperparameters& hp, const SweepContext& ctx,
                       AugmentedStats* stats_out = nullptr);

/// Starting point: gamma0, c0, c and lambda at their prior means, every
/// other parameter drawn from its prior.
ModelState initialize_state(Eigen::Index genes, Eigen::Index samples, int factors,
                            const Hyperparameters& hp, std::uint64_t seed,
                            const FactorKeys& keys);

/// A full draw from the prior, hyperparameters included.
ModelState draw_prior_state(Eigen::Index genes, Eigen::Index samples, int factors,
                            const Hyperparameters& hp, RngStream& rng);

/// Welford accumulators over kept draws.
struct StreamingMoments {
  std::int64_t count = 0;
  Eigen::MatrixXd phi_mean, phi_m2;
  Eigen::MatrixXd theta_mean, theta_m2;
  Eigen::VectorXd alpha_mean, zeta_mean, p_mean, r_mean, c_mean;
  double lambda_mean = 0.0, gamma0_mean = 0.0, c0_mean = 0.0;

  void add(const ModelState& s);
  Eigen::MatrixXd phi_variance() const;
  Eigen::MatrixXd theta_variance() const;
};

struct ChainOutput {
  int num_factors = 0;
  ChainConfig config;
  Hyperparameters hyper;
  std::vector<ModelState> draws;  // kept draws, only when config.store_draws
  StreamingMoments moments;
  std::vector<double> loglik_trace;
  std::vector<int> kept_iterations;
  std::vector<double> sweep_seconds;

  std::size_t kept() const { return loglik_trace.size(); }
};

ChainOutput run_chain(const CountMatrix& y, int factors, const Hyperparameters& hp,
                      const ChainConfig& cfg);

/// Runs from an explicit starting state and factor keys.
ChainOutput run_chain(const CountMatrix& y, ModelState initial, const Hyperparameters& hp,
                      const ChainConfig& cfg, const FactorKeys& keys);

/// Sample autocorrelation at lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> trace, int max_lag);

}  // namespace baycount
