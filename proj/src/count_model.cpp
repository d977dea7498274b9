#include "baycount/count_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "baycount/distributions.hpp"
#include "baycount/special.hpp"

namespace baycount {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument(std::string("duplicate ") + what + " id '" + id + "'");
    }
  }
}

double nb_log_pmf_unchecked(std::int64_t y, double r, double p) {
  const double yd = static_cast<double>(y);
  double value = r * std::log1p(-p);
  if (y > 0) {
    value += log_gamma(yd + r) - log_gamma(r) - log_gamma(yd + 1.0) + yd * std::log(p);
  }
  return value;
}

void check_simplex(const Eigen::Ref<const Eigen::VectorXd>& v, double tol,
                   const std::string& what) {
  if ((v.array() < 0.0).any() || !v.allFinite()) {
    throw std::logic_error(what + " has a negative or non-finite entry");
  }
  if (std::abs(v.sum() - 1.0) > tol) {
    throw std::logic_error(what + " does not sum to one");
  }
}

void check_positive(const Eigen::Ref<const Eigen::VectorXd>& v, const std::string& what) {
  if (!v.allFinite() || (v.array() <= 0.0).any()) {
    throw std::logic_error(what + " must be positive and finite");
  }
}

}  // namespace

CountMatrix::CountMatrix(CountArray values, std::vector<std::string> gene_ids,
                         std::vector<std::string> sample_ids)
    : values_(std::move(values)),
      gene_ids_(std::move(gene_ids)),
      sample_ids_(std::move(sample_ids)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw std::invalid_argument("count matrix needs at least one gene and one sample");
  }
  if (static_cast<Eigen::Index>(gene_ids_.size()) != values_.rows() ||
      static_cast<Eigen::Index>(sample_ids_.size()) != values_.cols()) {
    throw std::invalid_argument("identifier counts do not match matrix dimensions");
  }
  if ((values_.array() < 0).any()) {
    throw std::invalid_argument("counts must be nonnegative");
  }
  check_unique(gene_ids_, "gene");
  check_unique(sample_ids_, "sample");
}

CountMatrix CountMatrix::with_default_ids(CountArray values) {
  std::vector<std::string> genes(static_cast<std::size_t>(values.rows()));
  std::vector<std::string> samples(static_cast<std::size_t>(values.cols()));
  for (std::size_t i = 0; i < genes.size(); ++i) genes[i] = "gene_" + std::to_string(i + 1);
  for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = "sample_" + std::to_string(j + 1);
  return CountMatrix(std::move(values), std::move(genes), std::move(samples));
}

IndexVector CountMatrix::column_totals() const {
  return values_.colwise().sum().transpose();
}

bool operator==(const CountMatrix& a, const CountMatrix& b) {
  return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
         a.values_ == b.values_ && a.gene_ids_ == b.gene_ids_ &&
         a.sample_ids_ == b.sample_ids_;
}

void Hyperparameters::validate() const {
  const double all[] = {eta, delta, a0, b0, e0, f0, g0, h0, u0, v0};
  for (double v : all) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument("hyperparameters must be positive and finite");
    }
  }
}

void ModelState::validate(double tol) const {
  const Eigen::Index g = phi.rows();
  const Eigen::Index s = theta.cols();
  const Eigen::Index k = phi.cols();
  if (k < 1 || theta.rows() != k || r.size() != k || alpha.size() != g ||
      zeta.size() != s || p.size() != s || c.size() != s) {
    throw std::logic_error("model state dimensions are inconsistent");
  }
  for (Eigen::Index m = 0; m < k; ++m) check_simplex(phi.col(m), tol, "phi column");
  for (Eigen::Index j = 0; j < s; ++j) check_simplex(theta.col(j), tol, "theta column");
  check_simplex(alpha, tol, "alpha");
  check_positive(zeta, "zeta");
  check_positive(r, "r");
  check_positive(c, "c");
  if (!(lambda > 0.0) || !(gamma0 > 0.0) || !(c0 > 0.0) || !std::isfinite(lambda) ||
      !std::isfinite(gamma0) || !std::isfinite(c0)) {
    throw std::logic_error("lambda, gamma0 and c0 must be positive and finite");
  }
  if ((p.array() <= 0.0).any() || (p.array() >= 1.0).any()) {
    throw std::logic_error("p must lie strictly inside (0, 1)");
  }
}

AugmentedStats AugmentedStats::zeros(Eigen::Index genes, Eigen::Index samples, int factors) {
  AugmentedStats out;
  out.gene_factor = CountArray::Zero(genes, factors);
  out.factor_sample = CountArray::Zero(factors, samples);
  out.gene_effect = IndexVector::Zero(genes);
  out.second_level = CountArray::Zero(factors, samples);
  out.third_level = IndexVector::Zero(factors);
  return out;
}

double nb_log_pmf(std::int64_t y, double r, double p) {
  if (y < 0) throw std::invalid_argument("NB count must be nonnegative");
  if (!std::isfinite(r) || r <= 0.0) throw std::invalid_argument("NB shape must be positive");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("NB probability must lie in (0, 1)");
  return nb_log_pmf_unchecked(y, r, p);
}

double cell_shape(const ModelState& state, Eigen::Index i, Eigen::Index j) {
  double shape = state.lambda * state.alpha(i);
  const double zeta = state.zeta(j);
  for (Eigen::Index k = 0; k < state.phi.cols(); ++k) {
    shape += state.phi(i, k) * state.theta(k, j) * zeta;
  }
  return std::max(shape, kShapeFloor);
}

double model_mean(const ModelState& state, Eigen::Index i, Eigen::Index j) {
  const double p = state.p(j);
  return cell_shape(state, i, j) * p / (1.0 - p);
}

double full_log_likelihood(const CountMatrix& y, const ModelState& state) {
  if (y.genes() != state.genes() || y.samples() != state.samples()) {
    throw std::invalid_argument("count matrix and state dimensions differ");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.samples(); ++j) {
    const double p = state.p(j);
    for (Eigen::Index i = 0; i < y.genes(); ++i) {
      total += nb_log_pmf_unchecked(y(i, j), cell_shape(state, i, j), p);
    }
  }
  return total;
}

CountArray draw_counts(const ModelState& state, RngStream& rng) {
  CountArray out(state.genes(), state.samples());
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      out(i, j) = dist::sample_negative_binomial(cell_shape(state, i, j), state.p(j), rng);
    }
  }
  return out;
}

bool identical(const ModelState& a, const ModelState& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(a.phi, b.phi) && same(a.theta, b.theta) && same(a.alpha, b.alpha) &&
         same(a.zeta, b.zeta) && same(a.p, b.p) && same(a.r, b.r) && same(a.c, b.c) &&
         a.lambda == b.lambda && a.gamma0 == b.gamma0 && a.c0 == b.c0;
}

ModelState permute_factors(const ModelState& state, std::span<const int> perm) {
  const int k = state.num_factors();
  if (static_cast<int>(perm.size()) != k) {
    throw std::invalid_argument("permutation length differs from factor count");
  }
  ModelState out = state;
  for (int m = 0; m < k; ++m) {
    out.phi.col(m) = state.phi.col(perm[m]);
    out.theta.row(m) = state.theta.row(perm[m]);
    out.r(m) = state.r(perm[m]);
  }
  return out;
}

}  // namespace baycount
