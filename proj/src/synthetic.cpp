#include "baycount/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "baycount/distributions.hpp"

namespace baycount {

namespace {

enum class GeneratorTag : std::uint64_t { kScenario1 = 101, kScenario2 = 102 };

void check_sizes(Eigen::Index genes, Eigen::Index samples, int factors) {
  if (genes < 1 || samples < 1 || factors < 1) {
    throw std::invalid_argument("G, S and K0 must all be at least 1");
  }
}

Eigen::VectorXd dirichlet_vector(Eigen::Index size, double concentration, RngStream& rng) {
  const std::vector<double> conc(static_cast<std::size_t>(size), concentration);
  const std::vector<double> draw = dist::sample_dirichlet(conc, rng);
  return Eigen::Map<const Eigen::VectorXd>(draw.data(), size);
}

CountArray draw_nb_counts(const Eigen::MatrixXd& shapes, const Eigen::VectorXd& p, RngStream& rng) {
  CountArray y(shapes.rows(), shapes.cols());
  for (Eigen::Index j = 0; j < shapes.cols(); ++j) {
    for (Eigen::Index i = 0; i < shapes.rows(); ++i) {
      y(i, j) = dist::sample_negative_binomial(std::max(shapes(i, j), kShapeFloor), p(j), rng);
    }
  }
  return y;
}

double permutation_score(const Eigen::MatrixXd& corr, const std::vector<int>& perm) {
  double score = 0.0;
  for (std::size_t m = 0; m < perm.size(); ++m) score += corr(static_cast<Eigen::Index>(m), perm[m]);
  return score;
}

}  // namespace

double draw_overdispersed_probability(RngStream& rng) {
  const double ratio = 100.0 + (1e6 - 100.0) * rng.uniform();
  return ratio / (1.0 + ratio);
}

SyntheticTruth generate_scenario1(Eigen::Index genes, Eigen::Index samples, int factors,
                                  std::uint64_t seed) {
  check_sizes(genes, samples, factors);
  RngStream rng(seed, stream_key(static_cast<std::uint64_t>(GeneratorTag::kScenario1)));
  Eigen::MatrixXd phi(genes, factors);
  for (int k = 0; k < factors; ++k) phi.col(k) = dirichlet_vector(genes, 0.05, rng);
  Eigen::MatrixXd theta(factors, samples);
  for (Eigen::Index j = 0; j < samples; ++j) theta.col(j) = dirichlet_vector(factors, 0.5, rng);
  Eigen::VectorXd zeta(samples);
  for (Eigen::Index j = 0; j < samples; ++j) zeta(j) = dist::sample_gamma(0.5 * factors, 1.0, rng);
  const Eigen::VectorXd alpha = dirichlet_vector(genes, 0.5, rng);
  Eigen::VectorXd p(samples);
  for (Eigen::Index j = 0; j < samples; ++j) p(j) = draw_overdispersed_probability(rng);
  const double lambda = 1.0;

  const Eigen::MatrixXd shapes =
      (lambda * alpha).replicate(1, samples) + phi * theta * zeta.asDiagonal();
  CountArray counts = draw_nb_counts(shapes, p, rng);
  return SyntheticTruth{Scenario::kOne, seed, CountMatrix::with_default_ids(std::move(counts)),
                        std::move(phi), std::move(theta), alpha, lambda, std::move(zeta), p};
}

SyntheticTruth generate_scenario2(Eigen::Index genes, Eigen::Index samples, int factors,
                                  std::uint64_t seed) {
  check_sizes(genes, samples, factors);
  RngStream rng(seed, stream_key(static_cast<std::uint64_t>(GeneratorTag::kScenario2)));
  Eigen::MatrixXd w(genes, factors);
  for (int k = 0; k < factors; ++k) {
    for (Eigen::Index i = 0; i < genes; ++i) w(i, k) = dist::sample_gamma(0.05, 10.0, rng);
  }
  Eigen::MatrixXd theta(factors, samples);
  for (Eigen::Index j = 0; j < samples; ++j) theta.col(j) = dirichlet_vector(factors, 0.5, rng);
  const Eigen::VectorXd alpha = dirichlet_vector(genes, 0.5, rng);
  Eigen::VectorXd p(samples);
  for (Eigen::Index j = 0; j < samples; ++j) p(j) = draw_overdispersed_probability(rng);
  const double lambda = 1.0;

  const Eigen::MatrixXd shapes = (lambda * alpha).replicate(1, samples) + w * theta;
  CountArray counts = draw_nb_counts(shapes, p, rng);
  return SyntheticTruth{Scenario::kTwo, seed, CountMatrix::with_default_ids(std::move(counts)),
                        std::move(w), std::move(theta), alpha, lambda, Eigen::VectorXd(), p};
}

NormalizedColumns normalize_columns(const Eigen::MatrixXd& w) {
  NormalizedColumns out{w, w.colwise().sum().transpose()};
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    if (!(out.sums(k) > 0.0)) throw std::invalid_argument("column sum must be positive");
    out.matrix.col(k) /= out.sums(k);
  }
  return out;
}

double pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("pearson needs two equal-length vectors of size >= 2");
  }
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return (da * db).sum() / std::sqrt(saa * sbb);
}

std::vector<int> align_factors(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("estimate and truth must have the same shape");
  }
  const int k = static_cast<int>(estimate.cols());
  Eigen::MatrixXd corr(k, k);
  for (int m = 0; m < k; ++m) {
    for (int t = 0; t < k; ++t) corr(m, t) = pearson(estimate.col(m), truth.col(t));
  }
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  if (k <= 8) {
    std::vector<int> best = perm;
    double best_score = permutation_score(corr, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
      const double score = permutation_score(corr, perm);
      if (score > best_score) {
        best_score = score;
        best = perm;
      }
    }
    return best;
  }
  // greedy: repeatedly take the largest remaining correlation
  std::vector<bool> est_used(static_cast<std::size_t>(k), false);
  std::vector<bool> truth_used(static_cast<std::size_t>(k), false);
  for (int round = 0; round < k; ++round) {
    double best = -std::numeric_limits<double>::infinity();
    int bm = -1, bt = -1;
    for (int m = 0; m < k; ++m) {
      if (est_used[static_cast<std::size_t>(m)]) continue;
      for (int t = 0; t < k; ++t) {
        if (truth_used[static_cast<std::size_t>(t)] || corr(m, t) <= best) continue;
        best = corr(m, t);
        bm = m;
        bt = t;
      }
    }
    perm[static_cast<std::size_t>(bm)] = bt;
    est_used[static_cast<std::size_t>(bm)] = true;
    truth_used[static_cast<std::size_t>(bt)] = true;
  }
  return perm;
}

RecoveryReport recovery_metrics(const SyntheticTruth& truth, const Eigen::MatrixXd& phi_hat,
                                const Eigen::MatrixXd& theta_hat,
                                const Eigen::MatrixXd& theta_lower,
                                const Eigen::MatrixXd& theta_upper) {
  const Eigen::MatrixXd reference = truth.scenario == Scenario::kTwo
                                        ? normalize_columns(truth.loadings).matrix
                                        : truth.loadings;
  if (theta_hat.rows() != truth.theta.rows() || theta_hat.cols() != truth.theta.cols() ||
      theta_lower.rows() != theta_hat.rows() || theta_lower.cols() != theta_hat.cols() ||
      theta_upper.rows() != theta_hat.rows() || theta_upper.cols() != theta_hat.cols()) {
    throw std::invalid_argument("theta estimates must match the truth dimensions");
  }
  RecoveryReport report;
  report.permutation = align_factors(phi_hat, reference);
  const Eigen::Index k = phi_hat.cols();
  double abs_error = 0.0;
  std::int64_t covered = 0;
  for (Eigen::Index m = 0; m < k; ++m) {
    const int t = report.permutation[static_cast<std::size_t>(m)];
    report.phi_correlation.push_back(pearson(phi_hat.col(m), reference.col(t)));
    for (Eigen::Index j = 0; j < theta_hat.cols(); ++j) {
      const double value = truth.theta(t, j);
      abs_error += std::abs(theta_hat(m, j) - value);
      if (theta_lower(m, j) <= value && value <= theta_upper(m, j)) ++covered;
    }
  }
  const double cells = static_cast<double>(theta_hat.size());
  report.theta_mae = abs_error / cells;
  report.theta_coverage = static_cast<double>(covered) / cells;
  return report;
}

}  // namespace baycount
