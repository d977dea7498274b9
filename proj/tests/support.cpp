#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

#include "baycount/distributions.hpp"
#include "baycount/gibbs.hpp"

namespace support {

using namespace baycount;

Moments moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Moments out;
  out.mean = mean;
  out.variance = m2 * n / (n - 1.0);
  out.mean_se = std::sqrt(out.variance / n);
  out.variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  out.skewness_se = std::sqrt(6.0 / n);
  return out;
}

bool within_se(double estimate, double target, double se, double k) {
  return std::abs(estimate - target) <= k * se;
}

namespace {

ChiSquare pooled_test(const std::map<std::int64_t, std::pair<double, double>>& counts,
                      double na, double nb, double min_expected) {
  // merge adjacent bins (in key order) until both expected counts are large
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> acc{0.0, 0.0};
  auto expected_ok = [&](const std::pair<double, double>& c) {
    const double total = c.first + c.second;
    return total * na / (na + nb) >= min_expected && total * nb / (na + nb) >= min_expected;
  };
  for (const auto& [key, c] : counts) {
    acc.first += c.first;
    acc.second += c.second;
    if (expected_ok(acc)) {
      bins.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (bins.empty()) {
      bins.push_back(acc);
    } else {
      bins.back().first += acc.first;
      bins.back().second += acc.second;
    }
  }
  ChiSquare out;
  out.dof = static_cast<int>(bins.size()) - 1;
  if (out.dof < 1) return out;
  const double n = na + nb;
  for (const auto& [a, b] : bins) {
    const double total = a + b;
    const double ea = total * na / n;
    const double eb = total * nb / n;
    out.statistic += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
  }
  out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic);
  return out;
}

}  // namespace

ChiSquare two_sample_chi_square(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                double min_expected) {
  std::map<std::int64_t, std::pair<double, double>> counts;
  for (auto v : a) counts[v].first += 1.0;
  for (auto v : b) counts[v].second += 1.0;
  return pooled_test(counts, static_cast<double>(a.size()), static_cast<double>(b.size()),
                     min_expected);
}

double batch_mean_variance(std::span<const double> x, int batches) {
  const std::size_t len = x.size() / static_cast<std::size_t>(batches);
  std::vector<double> means;
  for (int k = 0; k < batches; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < len; ++t) s += x[static_cast<std::size_t>(k) * len + t];
    means.push_back(s / static_cast<double>(len));
  }
  const Moments m = moments(means);
  return m.variance / static_cast<double>(batches);
}

Hyperparameters gir_hyperparameters() {
  Hyperparameters hp;
  hp.eta = 0.5;
  hp.delta = 0.5;
  hp.a0 = 2.0;
  hp.b0 = 3.0;
  hp.e0 = 20.0;
  hp.f0 = 20.0;
  hp.g0 = 8.0;
  hp.h0 = 4.0;
  hp.u0 = 2.0;
  hp.v0 = 2.0;
  return hp;
}

namespace {

std::vector<std::pair<std::string, double>> monitored(const ModelState& s) {
  std::vector<std::pair<std::string, double>> m{{"lambda", s.lambda},
                                                {"gamma0", s.gamma0},
                                                {"c0", s.c0},
                                                {"r_sum", s.r.sum()},
                                                {"r_1", s.r(0)},
                                                {"phi_11", s.phi(0, 0)},
                                                {"alpha_1", s.alpha(0)}};
  for (Eigen::Index j = 0; j < s.samples(); ++j) {
    const std::string idx = std::to_string(j + 1);
    m.emplace_back("p_" + idx, s.p(j));
    m.emplace_back("zeta_" + idx, s.zeta(j));
    m.emplace_back("c_" + idx, s.c(j));
    m.emplace_back("theta_1" + idx, s.theta(0, j));
  }
  return m;
}

}  // namespace

std::vector<MonitorZ> getting_it_right(int rounds, std::uint64_t seed) {
  const Eigen::Index G = 5, S = 3;
  const int K = 2;
  const Hyperparameters hp = gir_hyperparameters();

  std::vector<std::vector<double>> marginal, successive;
  std::vector<std::string> names;
  RngStream prior_rng(seed, 1);
  for (int n = 0; n < rounds; ++n) {
    const auto m = monitored(draw_prior_state(G, S, K, hp, prior_rng));
    if (names.empty()) {
      for (const auto& [name, v] : m) names.push_back(name);
      marginal.resize(m.size());
      successive.resize(m.size());
    }
    for (std::size_t d = 0; d < m.size(); ++d) marginal[d].push_back(m[d].second);
  }

  RngStream data_rng(seed, 2);
  ModelState state = draw_prior_state(G, S, K, hp, data_rng);
  CountMatrix y = CountMatrix::with_default_ids(draw_counts(state, data_rng));
  const FactorKeys keys(K);
  for (int n = 0; n < rounds; ++n) {
    const SweepContext ctx{seed ^ 0x5eedULL, static_cast<std::uint64_t>(n + 1), &keys, 1};
    state = gibbs_sweep(y, state, hp, ctx);
    y = CountMatrix::with_default_ids(draw_counts(state, data_rng));
    const auto m = monitored(state);
    for (std::size_t d = 0; d < m.size(); ++d) successive[d].push_back(m[d].second);
  }

  std::vector<MonitorZ> out;
  for (std::size_t d = 0; d < names.size(); ++d) {
    for (int power = 1; power <= 2; ++power) {
      std::vector<double> a(marginal[d]), b(successive[d]);
      for (auto& v : a) v = std::pow(v, power);
      for (auto& v : b) v = std::pow(v, power);
      const Moments ma = moments(a);
      const double var = ma.variance / static_cast<double>(a.size()) + batch_mean_variance(b);
      const double z = (ma.mean - moments(b).mean) / std::sqrt(var);
      out.push_back({names[d] + (power == 1 ? "" : "^2"), z});
    }
  }
  return out;
}

ChiSquare compound_poisson_check(double r, double p, int draws, std::uint64_t seed) {
  RngStream a(seed, 1), b(seed, 2);
  std::vector<std::int64_t> nb(static_cast<std::size_t>(draws)), compound(nb.size());
  for (auto& v : nb) v = dist::sample_negative_binomial(r, p, a);
  for (auto& v : compound) v = dist::sample_sumlog(dist::sample_poisson(-r * std::log1p(-p), b), p, b);
  return two_sample_chi_square(nb, compound);
}

ChiSquare crt_poisson_check(double r, double p, int draws, std::uint64_t seed) {
  RngStream a(seed, 3), b(seed, 4);
  std::vector<std::int64_t> tables(static_cast<std::size_t>(draws)), poisson(tables.size());
  for (auto& v : tables) v = dist::sample_crt(dist::sample_negative_binomial(r, p, a), r, a);
  for (auto& v : poisson) v = dist::sample_poisson(-r * std::log1p(-p), b);
  return two_sample_chi_square(tables, poisson);
}

namespace {

std::int64_t encode_split(std::int64_t effect, std::int64_t f1, std::int64_t f2) {
  return effect * 1000000 + f1 * 1000 + f2;
}

std::int64_t unblocked_split(const CountMatrix& y, const ModelState& s, RngStream& rng) {
  const int k = s.num_factors();
  std::vector<std::int64_t> totals(static_cast<std::size_t>(k + 1), 0);
  for (Eigen::Index j = 0; j < y.samples(); ++j) {
    std::vector<double> shapes{s.lambda * s.alpha(0)};
    for (int f = 0; f < k; ++f) shapes.push_back(s.phi(0, f) * s.theta(f, j) * s.zeta(j));
    const auto w = dist::sample_dirichlet(shapes, rng);
    const auto x = dist::sample_multinomial(y(0, j), w, rng);
    for (std::size_t c = 0; c < shapes.size(); ++c) totals[c] += dist::sample_crt(x[c], shapes[c], rng);
  }
  return encode_split(totals[0], totals[1], totals[2]);
}

}  // namespace

ChiSquare allocation_check(int draws, std::uint64_t seed) {
  RngStream init(seed, 5);
  ModelState s = draw_prior_state(2, 2, 2, gir_hyperparameters(), init);
  s.zeta = Eigen::Vector2d(3.0, 2.0);
  s.lambda = 1.5;
  CountArray v(2, 2);
  v << 9, 4, 15, 2;
  const auto y = CountMatrix::with_default_ids(v);
  const FactorKeys keys(2);
  std::vector<std::int64_t> blocked(static_cast<std::size_t>(draws)), unblocked(blocked.size());
  for (std::size_t d = 0; d < blocked.size(); ++d) {
    const SweepContext ctx{seed, d + 1, &keys, 1};
    const auto stats = allocate_tables(y, s, ctx);
    blocked[d] = encode_split(stats.gene_effect(0), stats.gene_factor(0, 0), stats.gene_factor(0, 1));
  }
  RngStream rng(seed, 6);
  for (auto& code : unblocked) code = unblocked_split(y, s, rng);
  return two_sample_chi_square(blocked, unblocked);
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("baycount_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace support
