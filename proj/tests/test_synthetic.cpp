#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "baycount/distributions.hpp"
#include "baycount/synthetic.hpp"
#include "support.hpp"

using namespace baycount;

namespace {

Eigen::MatrixXd permute_columns(const Eigen::MatrixXd& m, const std::vector<int>& perm) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t c = 0; c < perm.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = m.col(perm[c]);
  return out;
}

Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& m, const std::vector<int>& perm) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < perm.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(perm[r]);
  return out;
}

Eigen::MatrixXd jittered(const Eigen::MatrixXd& phi, double weight, RngStream& rng) {
  Eigen::MatrixXd out = phi;
  const std::vector<double> conc(static_cast<std::size_t>(phi.rows()), 1.0);
  for (Eigen::Index k = 0; k < phi.cols(); ++k) {
    const auto noise = dist::sample_dirichlet(conc, rng);
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      out(i, k) = (1.0 - weight) * phi(i, k) + weight * noise[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("scenario I structure") {
  const auto t = generate_scenario1(100, 20, 3, 7);
  CHECK(t.scenario == Scenario::kOne);
  CHECK(t.y.genes() == 100);
  CHECK(t.y.samples() == 20);
  CHECK(t.loadings.rows() == 100);
  CHECK(t.loadings.cols() == 3);
  CHECK(t.lambda == 1.0);
  CHECK(t.zeta.size() == 20);
  CHECK((t.y.values().array() >= 0).all());
  for (Eigen::Index j = 0; j < 20; ++j) CHECK(t.theta.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(t.loadings.col(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.alpha.sum() == doctest::Approx(1.0).epsilon(1e-12));

  const auto again = generate_scenario1(100, 20, 3, 7);
  CHECK(again.y == t.y);
  CHECK(again.loadings == t.loadings);
  CHECK_FALSE(generate_scenario1(100, 20, 3, 8).y == t.y);

  const auto single = generate_scenario1(10, 5, 1, 3);
  CHECK((single.theta.array() == 1.0).all());
  CHECK_THROWS_AS(generate_scenario1(0, 5, 1, 3), std::invalid_argument);
}

TEST_CASE("scenario II structure") {
  const auto t = generate_scenario2(1000, 40, 5, 21);
  CHECK(t.scenario == Scenario::kTwo);
  CHECK(t.zeta.size() == 0);
  CHECK((t.loadings.array() >= 0.0).all());
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(std::abs(t.loadings.col(k).sum() - 1.0) > 1e-6);
  // w ~ Gamma(0.05, scale 10): mean 0.5, variance 5
  const double n = static_cast<double>(t.loadings.size());
  CHECK(support::within_se(t.loadings.mean(), 0.5, std::sqrt(5.0 / n)));
  CHECK(generate_scenario2(1000, 40, 5, 21).y == t.y);
  CHECK_THROWS_AS(generate_scenario2(10, 0, 2, 1), std::invalid_argument);
}

TEST_CASE("overdispersion ratio range") {
  RngStream rng(71, 1);
  std::vector<double> ratio(100000);
  for (auto& r : ratio) {
    const double p = draw_overdispersed_probability(rng);
    r = p / (1.0 - p);
    REQUIRE(r >= 100.0 * (1.0 - 1e-9));
    REQUIRE(r <= 1e6 * (1.0 + 1e-9));
  }
  const auto m = support::moments(ratio);
  CHECK(support::within_se(m.mean, (100.0 + 1e6) / 2.0, m.mean_se));
}

TEST_CASE("scenario I column totals follow the aggregate law") {
  // standardized y.j against NB(lambda + zeta_j, p_j) across replicates
  std::vector<double> z;
  std::vector<double> ratio;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto t = generate_scenario1(100, 20, 3, seed);
    const auto totals = t.y.column_totals();
    for (Eigen::Index j = 0; j < 20; ++j) {
      const double shape = t.lambda + t.zeta(j);
      const double odds = t.p(j) / (1.0 - t.p(j));
      const double mean = shape * odds;
      const double var = mean / (1.0 - t.p(j));
      z.push_back((static_cast<double>(totals(j)) - mean) / std::sqrt(var));
      ratio.push_back(var / mean);
      REQUIRE(var / mean >= 100.0);
      REQUIRE(var / mean <= 1e6 + 1.0);
    }
  }
  const auto m = support::moments(z);
  CHECK(support::within_se(m.mean, 0.0, m.mean_se));
  CHECK(support::within_se(m.variance, 1.0, m.variance_se));
}

TEST_CASE("normalize_columns") {
  Eigen::MatrixXd w(3, 2);
  w << 1.0, 2.0, 0.0, 2.0, 0.0, 4.0;
  const auto n = normalize_columns(w);
  CHECK(n.matrix.col(0) == Eigen::Vector3d(1.0, 0.0, 0.0));
  CHECK(n.matrix.col(1).isApprox(Eigen::Vector3d(0.25, 0.25, 0.5)));
  CHECK(n.sums(1) == 8.0);
  const auto t = generate_scenario2(50, 4, 3, 2);
  const auto nt = normalize_columns(t.loadings);
  CHECK(((nt.matrix * nt.sums.asDiagonal()) - t.loadings).cwiseAbs().maxCoeff() < 1e-12);
  w.col(0).setZero();
  CHECK_THROWS_AS(normalize_columns(w), std::invalid_argument);
}

TEST_CASE("pearson") {
  const Eigen::Vector3d a(1.0, 2.0, 3.0);
  CHECK(pearson(a, Eigen::Vector3d(2.0, 4.0, 6.0)) == doctest::Approx(1.0));
  CHECK(pearson(a, Eigen::Vector3d(3.0, 2.0, 1.0)) == doctest::Approx(-1.0));
  CHECK(pearson(a, Eigen::Vector3d(5.0, 5.0, 5.0)) == 0.0);
  CHECK_THROWS_AS(pearson(a, Eigen::Vector2d(1.0, 2.0)), std::invalid_argument);
}

TEST_CASE("align_factors") {
  const auto t = generate_scenario1(100, 20, 3, 31);
  CHECK(align_factors(t.loadings, t.loadings) == std::vector<int>{0, 1, 2});
  CHECK(align_factors(permute_columns(t.loadings, {2, 1, 0}), t.loadings) ==
        std::vector<int>{2, 1, 0});

  RngStream rng(72, 1);
  int recovered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = generate_scenario1(100, 20, 3, 1000 + static_cast<std::uint64_t>(trial));
    std::vector<int> planted{0, 1, 2};
    for (int s = trial % 6; s > 0; --s) std::next_permutation(planted.begin(), planted.end());
    const Eigen::MatrixXd estimate = permute_columns(jittered(truth.loadings, 0.2, rng), planted);
    if (align_factors(estimate, truth.loadings) == planted) ++recovered;
  }
  CHECK(recovered == 100);

  // greedy branch above eight factors
  const auto wide = generate_scenario1(200, 10, 10, 32);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  CHECK(align_factors(permute_columns(wide.loadings, perm), wide.loadings) == perm);
  CHECK_THROWS_AS(align_factors(wide.loadings, t.loadings), std::invalid_argument);
}

TEST_CASE("recovery_metrics") {
  const auto t = generate_scenario1(100, 20, 3, 41);
  SUBCASE("truth scores perfectly") {
    const auto r = recovery_metrics(t, t.loadings, t.theta, t.theta, t.theta);
    for (double c : r.phi_correlation) CHECK(c == doctest::Approx(1.0));
    CHECK(r.theta_mae == 0.0);
    CHECK(r.theta_coverage == 1.0);
  }
  SUBCASE("permuted truth scores perfectly after alignment") {
    const std::vector<int> perm{1, 2, 0};
    const Eigen::MatrixXd theta = permute_rows(t.theta, perm);
    const auto r = recovery_metrics(t, permute_columns(t.loadings, perm), theta, theta, theta);
    CHECK(r.permutation == perm);
    for (double c : r.phi_correlation) CHECK(c == doctest::Approx(1.0));
    CHECK(r.theta_mae == 0.0);
    CHECK(r.theta_coverage == 1.0);
  }
  SUBCASE("common relabeling leaves the scores unchanged") {
    RngStream rng(73, 1);
    const Eigen::MatrixXd phi_hat = jittered(t.loadings, 0.3, rng);
    const Eigen::MatrixXd theta_hat = (t.theta.array() * 0.9 + 0.1 / 3.0).matrix();
    const Eigen::MatrixXd lower = (theta_hat.array() - 0.05).matrix();
    const Eigen::MatrixXd upper = (theta_hat.array() + 0.05).matrix();
    const auto base = recovery_metrics(t, phi_hat, theta_hat, lower, upper);

    const std::vector<int> perm{2, 0, 1};
    SyntheticTruth relabeled = t;
    relabeled.loadings = permute_columns(t.loadings, perm);
    relabeled.theta = permute_rows(t.theta, perm);
    const auto moved = recovery_metrics(relabeled, permute_columns(phi_hat, perm),
                                        permute_rows(theta_hat, perm), permute_rows(lower, perm),
                                        permute_rows(upper, perm));
    auto a = base.phi_correlation, b = moved.phi_correlation;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(moved.theta_mae == doctest::Approx(base.theta_mae).epsilon(1e-14));
    CHECK(moved.theta_coverage == base.theta_coverage);
  }
  SUBCASE("scenario II truth is column-normalized") {
    const auto s2 = generate_scenario2(80, 10, 3, 42);
    const Eigen::MatrixXd scaled = s2.loadings * 7.0;
    const auto r = recovery_metrics(s2, normalize_columns(scaled).matrix, s2.theta, s2.theta, s2.theta);
    for (double c : r.phi_correlation) CHECK(c == doctest::Approx(1.0));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(recovery_metrics(t, t.loadings, t.theta.leftCols(5), t.theta, t.theta),
                    std::invalid_argument);
  }
}
