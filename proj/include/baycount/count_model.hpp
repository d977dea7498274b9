#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "baycount/rng.hpp"

namespace baycount {

using CountArray =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IndexVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Shapes below this are clamped before any log or sampler call; Dirichlet
/// draws with small concentrations routinely underflow to zero.
inline constexpr double kShapeFloor = 1e-300;

/// Observed G x S read-count matrix (genes by samples).
class CountMatrix {
 public:
  CountMatrix(CountArray values, std::vector<std::string> gene_ids,
              std::vector<std::string> sample_ids);

  /// Uses gene_1..gene_G and sample_1..sample_S as identifiers.
  static CountMatrix with_default_ids(CountArray values);

  Eigen::Index genes() const { return values_.rows(); }
  Eigen::Index samples() const { return values_.cols(); }
  std::int64_t operator()(Eigen::Index i, Eigen::Index j) const {
    return values_(i, j);
  }
  const CountArray& values() const { return values_; }
  const std::vector<std::string>& gene_ids() const { return gene_ids_; }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }

  /// y_.j for every sample.
  IndexVector column_totals() const;

  friend bool operator==(const CountMatrix& a, const CountMatrix& b);

 private:
  CountArray values_;
  std::vector<std::string> gene_ids_;
  std::vector<std::string> sample_ids_;
};

/// Prior and hyperprior constants. Gamma pairs are (shape, rate).
struct Hyperparameters {
  double eta = 0.1;    // Dirichlet concentration for factor loadings
  double delta = 0.1;  // Dirichlet concentration for the gene effect
  double a0 = 0.01, b0 = 0.01;
  double e0 = 1.0, f0 = 1.0;
  double g0 = 1.0, h0 = 1.0;
  double u0 = 100.0, v0 = 100.0;

  void validate() const;
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// One full parameter set for a fixed number of factors K.
struct ModelState {
  Eigen::MatrixXd phi;    // G x K, simplex columns
  Eigen::MatrixXd theta;  // K x S, simplex columns
  Eigen::VectorXd alpha;  // G, simplex
  double lambda = 1.0;
  Eigen::VectorXd zeta;   // S
  Eigen::VectorXd p;      // S, inside (0, 1)
  Eigen::VectorXd r;      // K
  Eigen::VectorXd c;      // S
  double gamma0 = 1.0;
  double c0 = 1.0;

  int num_factors() const { return static_cast<int>(phi.cols()); }
  Eigen::Index genes() const { return phi.rows(); }
  Eigen::Index samples() const { return theta.cols(); }

  /// Throws std::logic_error naming the first violated invariant.
  void validate(double simplex_tol = 1e-10) const;
};

/// Sufficient statistics of the latent table counts from one sweep.
struct AugmentedStats {
  CountArray gene_factor;      // G x K, sum over samples of l_ijk
  CountArray factor_sample;    // K x S, sum over genes of l_ijk
  IndexVector gene_effect;     // G, sum over samples of l_ij0
  std::int64_t gene_effect_total = 0;
  CountArray second_level;     // K x S, CRT tables of factor_sample
  IndexVector third_level;     // K

  static AugmentedStats zeros(Eigen::Index genes, Eigen::Index samples, int factors);
};

/// log NB(y; r, p) = lgamma(y+r) - lgamma(r) - log y! + r log(1-p) + y log p.
double nb_log_pmf(std::int64_t y, double r, double p);

/// NB shape of cell (i, j): lambda*alpha_i + sum_k phi_ik theta_kj zeta_j,
/// clamped to kShapeFloor.
double cell_shape(const ModelState& state, Eigen::Index i, Eigen::Index j);

/// E[y_ij] = cell shape * p_j / (1 - p_j).
double model_mean(const ModelState& state, Eigen::Index i, Eigen::Index j);

double full_log_likelihood(const CountMatrix& y, const ModelState& state);

/// Draws a count matrix from the NB model given a state.
CountArray draw_counts(const ModelState& state, RngStream& rng);

/// Bitwise equality of every parameter, including shapes.
bool identical(const ModelState& a, const ModelState& b);

/// Applies a factor relabeling: new factor m is old factor perm[m].
ModelState permute_factors(const ModelState& state, std::span<const int> perm);

}  // namespace baycount
