#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "baycount/count_model.hpp"

namespace support {

/// Sample mean and variance with their Monte Carlo standard errors.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
  double skewness = 0.0;
  double skewness_se = 0.0;
};
Moments moments(std::span<const double> x);

/// True when |estimate - target| <= k * se.
bool within_se(double estimate, double target, double se, double k = 3.0);

/// Two-sample chi-square homogeneity test on integer outcomes. Outcomes
/// are binned by value; the upper tail is pooled, and adjacent bins are
/// merged until every expected count is at least `min_expected`.
struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
ChiSquare two_sample_chi_square(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                double min_expected = 5.0);

/// Variance of the mean of a correlated series from non-overlapping batch
/// means.
double batch_mean_variance(std::span<const double> x, int batches = 50);

struct MonitorZ {
  std::string name;
  double z = 0.0;
};

/// Joint-distribution ("getting it right") check on a G=5, S=3, K=2 model.
/// Compares first and second moments of monitored parameters between
/// independent prior draws and a chain that alternates one Gibbs sweep
/// with a fresh draw of Y. Returns one z-score per monitored moment.
std::vector<MonitorZ> getting_it_right(int rounds, std::uint64_t seed);

/// Moderate hyperparameters that keep Y small enough for the check.
baycount::Hyperparameters gir_hyperparameters();

/// x ~ NB(r, p) against l ~ Pois(-r log(1-p)), x ~ SumLog(l, p).
ChiSquare compound_poisson_check(double r, double p, int draws, std::uint64_t seed);

/// CRT(x, r) with x ~ NB(r, p) against Pois(-r log(1-p)).
ChiSquare crt_poisson_check(double r, double p, int draws, std::uint64_t seed);

/// Gene-0 table split of allocate_tables on a fixed G=2, S=2, K=2 instance
/// against the unblocked path: Dirichlet-multinomial split of each count
/// into its K+1 latent NB components, then one CRT per component.
ChiSquare allocation_check(int draws, std::uint64_t seed);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace support
