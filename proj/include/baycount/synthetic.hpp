#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "baycount/count_model.hpp"

namespace baycount {

enum class Scenario { kOne = 1, kTwo = 2 };

/// Simulated counts with the parameters that generated them.
struct SyntheticTruth {
  Scenario scenario = Scenario::kOne;
  std::uint64_t seed = 0;
  CountMatrix y;
  /// G x K0. Simplex columns (phi) in scenario I, unconstrained positive
  /// loadings (W) in scenario II.
  Eigen::MatrixXd loadings;
  Eigen::MatrixXd theta;  // K0 x S
  Eigen::VectorXd alpha;
  double lambda = 1.0;
  Eigen::VectorXd zeta;   // scenario I only; empty in scenario II
  Eigen::VectorXd p;
};

/// Data drawn from the model itself: phi_k ~ Dir(0.05), theta_j ~ Dir(0.5),
/// zeta_j ~ Gamma(0.5 K0, 1), lambda = 1, alpha ~ Dir(0.5).
SyntheticTruth generate_scenario1(Eigen::Index genes, Eigen::Index samples, int factors,
                                  std::uint64_t seed);

/// Misspecified data: w_ik ~ Gamma(0.05, scale 10) with no column-sum
/// constraint and no zeta.
SyntheticTruth generate_scenario2(Eigen::Index genes, Eigen::Index samples, int factors,
                                  std::uint64_t seed);

/// Probability p_j with variance-to-mean ratio p/(1-p) ~ Uniform(100, 1e6).
double draw_overdispersed_probability(RngStream& rng);

struct NormalizedColumns {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd sums;
};
NormalizedColumns normalize_columns(const Eigen::MatrixXd& w);

/// Pearson correlation; 0 when either side has zero variance.
double pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b);

/// perm[m] is the truth column matched to estimate column m, chosen to
/// maximize the summed column correlations. Exhaustive for K <= 8, greedy
/// above.
std::vector<int> align_factors(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

struct RecoveryReport {
  std::vector<int> permutation;
  std::vector<double> phi_correlation;  // per estimate column
  double theta_mae = 0.0;
  double theta_coverage = 0.0;
};

/// Scores estimates against a synthetic truth after factor alignment.
/// Scenario II loadings are column-normalized before comparison.
RecoveryReport recovery_metrics(const SyntheticTruth& truth, const Eigen::MatrixXd& phi_hat,
                                const Eigen::MatrixXd& theta_hat,
                                const Eigen::MatrixXd& theta_lower,
                                const Eigen::MatrixXd& theta_upper);

}  // namespace baycount
