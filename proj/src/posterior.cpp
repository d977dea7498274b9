#include "baycount/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "baycount/stats.hpp"

namespace baycount {

PosteriorSummary summarize(std::span<const ModelState> draws, double level) {
  if (draws.size() < 2) throw std::invalid_argument("summary needs at least two draws");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  const ModelState& first = draws.front();
  const double n = static_cast<double>(draws.size());

  PosteriorSummary out;
  out.draw_count = static_cast<std::int64_t>(draws.size());
  out.level = level;
  out.phi_mean = Eigen::MatrixXd::Zero(first.phi.rows(), first.phi.cols());
  out.theta_mean = Eigen::MatrixXd::Zero(first.theta.rows(), first.theta.cols());
  out.zeta_mean = Eigen::VectorXd::Zero(first.zeta.size());
  out.p_mean = Eigen::VectorXd::Zero(first.p.size());
  for (const ModelState& s : draws) {
    if (s.phi.rows() != first.phi.rows() || s.phi.cols() != first.phi.cols() ||
        s.theta.cols() != first.theta.cols()) {
      throw std::invalid_argument("draws have inconsistent dimensions");
    }
    out.phi_mean += s.phi;
    out.theta_mean += s.theta;
    out.zeta_mean += s.zeta;
    out.p_mean += s.p;
    out.lambda_mean += s.lambda;
  }
  out.phi_mean /= n;
  out.theta_mean /= n;
  out.zeta_mean /= n;
  out.p_mean /= n;
  out.lambda_mean /= n;

  const double tail = (1.0 - level) / 2.0;
  out.theta_lower.resize(first.theta.rows(), first.theta.cols());
  out.theta_upper.resize(first.theta.rows(), first.theta.cols());
  std::vector<double> values(draws.size());
  for (Eigen::Index j = 0; j < first.theta.cols(); ++j) {
    for (Eigen::Index k = 0; k < first.theta.rows(); ++k) {
      for (std::size_t d = 0; d < draws.size(); ++d) values[d] = draws[d].theta(k, j);
      out.theta_lower(k, j) = empirical_quantile(values, tail);
      out.theta_upper(k, j) = empirical_quantile(values, 1.0 - tail);
    }
  }
  return out;
}

PosteriorSummary summarize(const ChainOutput& chain, double level) {
  if (chain.draws.empty()) {
    throw std::invalid_argument("chain has no stored draws; rerun with draw storage on");
  }
  return summarize(std::span<const ModelState>(chain.draws), level);
}

std::vector<int> factor_display_order(const Eigen::MatrixXd& theta_mean) {
  const Eigen::VectorXd avg = theta_mean.rowwise().mean();
  std::vector<int> order(static_cast<std::size_t>(theta_mean.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return avg(a) > avg(b); });
  return order;
}

PosteriorSummary reorder_factors(const PosteriorSummary& summary, std::span<const int> order) {
  if (static_cast<Eigen::Index>(order.size()) != summary.theta_mean.rows()) {
    throw std::invalid_argument("factor order length differs from K");
  }
  PosteriorSummary out = summary;
  for (std::size_t m = 0; m < order.size(); ++m) {
    const auto dst = static_cast<Eigen::Index>(m);
    out.phi_mean.col(dst) = summary.phi_mean.col(order[m]);
    out.theta_mean.row(dst) = summary.theta_mean.row(order[m]);
    out.theta_lower.row(dst) = summary.theta_lower.row(order[m]);
    out.theta_upper.row(dst) = summary.theta_upper.row(order[m]);
  }
  return out;
}

std::vector<int> dominant_subclone(const Eigen::MatrixXd& theta_mean) {
  std::vector<int> labels(static_cast<std::size_t>(theta_mean.cols()), 0);
  for (Eigen::Index j = 0; j < theta_mean.cols(); ++j) {
    int best = 0;
    for (Eigen::Index k = 1; k < theta_mean.rows(); ++k) {
      if (theta_mean(k, j) > theta_mean(best, j)) best = static_cast<int>(k);
    }
    labels[static_cast<std::size_t>(j)] = best;
  }
  return labels;
}

Eigen::VectorXd across_factor_sd(const Eigen::MatrixXd& phi_mean) {
  if (phi_mean.cols() < 2) throw std::invalid_argument("across-factor sd needs K >= 2");
  Eigen::VectorXd sd(phi_mean.rows());
  for (Eigen::Index i = 0; i < phi_mean.rows(); ++i) {
    const Eigen::ArrayXd row = phi_mean.row(i).transpose().array();
    const double mean = row.mean();
    sd(i) = std::sqrt((row - mean).square().sum() / static_cast<double>(row.size() - 1));
  }
  return sd;
}

namespace {

std::vector<RankedGene> ranked_by_sd(const Eigen::MatrixXd& phi_mean) {
  const Eigen::VectorXd sd = across_factor_sd(phi_mean);
  std::vector<RankedGene> genes(static_cast<std::size_t>(sd.size()));
  for (Eigen::Index i = 0; i < sd.size(); ++i) genes[static_cast<std::size_t>(i)] = {i, sd(i)};
  std::stable_sort(genes.begin(), genes.end(),
                   [](const RankedGene& a, const RankedGene& b) { return a.sd > b.sd; });
  return genes;
}

}  // namespace

std::vector<RankedGene> rank_de_genes(const Eigen::MatrixXd& phi_mean, double threshold) {
  std::vector<RankedGene> genes = ranked_by_sd(phi_mean);
  std::erase_if(genes, [&](const RankedGene& g) { return !(g.sd >= threshold); });
  return genes;
}

std::vector<RankedGene> top_de_genes(const Eigen::MatrixXd& phi_mean, std::size_t n) {
  if (n > static_cast<std::size_t>(phi_mean.rows())) {
    throw std::invalid_argument("requested more top genes than there are genes");
  }
  std::vector<RankedGene> genes = ranked_by_sd(phi_mean);
  genes.resize(n);
  return genes;
}

Eigen::MatrixXd log_scale_view(const Eigen::MatrixXd& phi_mean, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("log floor must be positive");
  return phi_mean.array().max(floor).log10().matrix();
}

}  // namespace baycount
