#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "baycount/count_model.hpp"
#include "baycount/gibbs.hpp"

namespace baycount {

/// Posterior means and equal-tailed credible intervals over kept draws.
struct PosteriorSummary {
  Eigen::MatrixXd phi_mean;     // G x K
  Eigen::MatrixXd theta_mean;   // K x S
  Eigen::MatrixXd theta_lower;  // K x S
  Eigen::MatrixXd theta_upper;  // K x S
  double lambda_mean = 0.0;
  Eigen::VectorXd zeta_mean;
  Eigen::VectorXd p_mean;
  std::int64_t draw_count = 0;
  double level = 0.95;
};

PosteriorSummary summarize(std::span<const ModelState> draws, double level = 0.95);
PosteriorSummary summarize(const ChainOutput& chain, double level = 0.95);

/// Factor indices sorted by decreasing mean proportion across samples.
std::vector<int> factor_display_order(const Eigen::MatrixXd& theta_mean);

/// Relabels factors so that new factor m is old factor order[m].
PosteriorSummary reorder_factors(const PosteriorSummary& summary, std::span<const int> order);

/// argmax_k theta_kj per sample (0-based), ties to the smallest k.
std::vector<int> dominant_subclone(const Eigen::MatrixXd& theta_mean);

/// Sample standard deviation (n - 1 denominator) of each row.
Eigen::VectorXd across_factor_sd(const Eigen::MatrixXd& phi_mean);

struct RankedGene {
  Eigen::Index gene = 0;
  double sd = 0.0;
};

/// Genes with across-factor sd >= threshold, by decreasing sd.
std::vector<RankedGene> rank_de_genes(const Eigen::MatrixXd& phi_mean, double threshold);

/// The n genes with the largest across-factor sd, by decreasing sd.
std::vector<RankedGene> top_de_genes(const Eigen::MatrixXd& phi_mean, std::size_t n);

/// Entrywise log10(max(x, floor)).
Eigen::MatrixXd log_scale_view(const Eigen::MatrixXd& phi_mean, double floor = 1e-12);

}  // namespace baycount
