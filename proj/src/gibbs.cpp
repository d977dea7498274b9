#include "baycount/gibbs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "baycount/distributions.hpp"

namespace baycount {

namespace {

constexpr double kProbabilityClamp = 1e-12;

const FactorKeys& keys_of(const SweepContext& ctx) {
  if (ctx.keys == nullptr) throw std::logic_error("sweep context has no factor keys");
  return *ctx.keys;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Normalizes log-scale weights into a simplex, summing in `order`.
void normalize_in_order(Eigen::Ref<Eigen::VectorXd> logw, std::span<const int> order) {
  double top = -std::numeric_limits<double>::infinity();
  for (int k : order) top = std::max(top, logw(k));
  double total = 0.0;
  for (int k : order) {
    logw(k) = std::exp(logw(k) - top);
    total += logw(k);
  }
  for (int k : order) logw(k) /= total;
}

double ordered_sum(const Eigen::VectorXd& v, std::span<const int> order) {
  double total = 0.0;
  for (int k : order) total += v(k);
  return total;
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

// -log(1 - p_j)
Eigen::VectorXd neg_log_complement(const Eigen::VectorXd& p) {
  Eigen::VectorXd q(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) q(j) = -std::log1p(-p(j));
  return q;
}

struct AllocationPartial {
  CountArray factor_sample;
  std::int64_t gene_effect_total = 0;
};

// Allocates genes [begin, end); rows of gene_factor and gene_effect are
// written in place, column statistics go to the partial.
void allocate_rows(const CountMatrix& y, const ModelState& state, const SweepContext& ctx,
                   Eigen::Index begin, Eigen::Index end, AugmentedStats& stats,
                   AllocationPartial& partial) {
  const FactorKeys& keys = keys_of(ctx);
  const int factors = state.num_factors();
  // component 0 is the gene effect, component k+1 is factor k
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(factors) + 1);
  order.push_back(0);
  for (int k : keys.order()) order.push_back(k + 1);
  std::vector<double> weights(static_cast<std::size_t>(factors) + 1);
  std::vector<double> uniform(weights.size(), 1.0);
  std::vector<std::int64_t> split(weights.size());

  for (Eigen::Index j = 0; j < y.samples(); ++j) {
    const double zeta = state.zeta(j);
    for (Eigen::Index i = begin; i < end; ++i) {
      const std::int64_t count = y(i, j);
      if (count == 0) continue;
      weights[0] = state.lambda * state.alpha(i);
      double shape = weights[0];
      for (int k : keys.order()) {
        const double w = state.phi(i, k) * state.theta(k, j) * zeta;
        weights[static_cast<std::size_t>(k) + 1] = w;
        shape += w;
      }
      RngStream rng = ctx.stream(StreamTag::kAllocate, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(j));
      const std::int64_t tables = dist::sample_crt(count, std::max(shape, kShapeFloor), rng);
      // every component underflowed: no information to prefer one
      const std::span<const double> w =
          shape > 0.0 ? std::span<const double>(weights) : std::span<const double>(uniform);
      dist::sample_multinomial_into(tables, w, order, split, rng);
      stats.gene_effect(i) += split[0];
      partial.gene_effect_total += split[0];
      for (int k = 0; k < factors; ++k) {
        const std::int64_t part = split[static_cast<std::size_t>(k) + 1];
        stats.gene_factor(i, k) += part;
        partial.factor_sample(k, j) += part;
      }
    }
  }
}

}  // namespace

void ChainConfig::validate() const {
  if (burn_in < 0 || total_iterations <= burn_in) {
    throw std::invalid_argument("chain needs 0 <= burn_in < total_iterations");
  }
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (threads < 0) throw std::invalid_argument("threads must be nonnegative");
}

FactorKeys::FactorKeys(int factors) {
  if (factors < 1) throw std::invalid_argument("need at least one factor");
  keys_.resize(static_cast<std::size_t>(factors));
  std::iota(keys_.begin(), keys_.end(), std::uint64_t{0});
  order_.resize(keys_.size());
  std::iota(order_.begin(), order_.end(), 0);
}

FactorKeys::FactorKeys(std::vector<std::uint64_t> keys) : keys_(std::move(keys)) {
  if (keys_.empty()) throw std::invalid_argument("need at least one factor");
  order_.resize(keys_.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::sort(order_.begin(), order_.end(), [&](int a, int b) {
    return keys_[static_cast<std::size_t>(a)] < keys_[static_cast<std::size_t>(b)];
  });
  for (std::size_t m = 1; m < order_.size(); ++m) {
    if (keys_[static_cast<std::size_t>(order_[m])] ==
        keys_[static_cast<std::size_t>(order_[m - 1])]) {
      throw std::invalid_argument("factor keys must be distinct");
    }
  }
}

FactorKeys FactorKeys::permuted(std::span<const int> perm) const {
  if (perm.size() != keys_.size()) {
    throw std::invalid_argument("permutation length differs from factor count");
  }
  std::vector<std::uint64_t> out(keys_.size());
  for (std::size_t m = 0; m < perm.size(); ++m) {
    out[m] = keys_[static_cast<std::size_t>(perm[m])];
  }
  return FactorKeys(std::move(out));
}

AugmentedStats allocate_tables(const CountMatrix& y, const ModelState& state,
                               const SweepContext& ctx) {
  if (y.genes() != state.genes() || y.samples() != state.samples()) {
    throw std::invalid_argument("count matrix and state dimensions differ");
  }
  const int factors = state.num_factors();
  AugmentedStats stats = AugmentedStats::zeros(y.genes(), y.samples(), factors);
  const int workers = static_cast<int>(
      std::min<Eigen::Index>(resolve_threads(ctx.threads), y.genes()));

  std::vector<AllocationPartial> partials(static_cast<std::size_t>(workers));
  for (auto& part : partials) part.factor_sample = CountArray::Zero(factors, y.samples());

  const Eigen::Index chunk = (y.genes() + workers - 1) / workers;
  auto run = [&](int w) {
    const Eigen::Index begin = std::min<Eigen::Index>(y.genes(), w * chunk);
    const Eigen::Index end = std::min<Eigen::Index>(y.genes(), begin + chunk);
    allocate_rows(y, state, ctx, begin, end, stats, partials[static_cast<std::size_t>(w)]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  // integer reduction: exact, so independent of the worker count
  for (const auto& part : partials) {
    stats.factor_sample += part.factor_sample;
    stats.gene_effect_total += part.gene_effect_total;
  }
  return stats;
}

Eigen::MatrixXd update_phi(const AugmentedStats& stats, double eta, const SweepContext& ctx) {
  const FactorKeys& keys = keys_of(ctx);
  const Eigen::Index genes = stats.gene_factor.rows();
  Eigen::MatrixXd phi(genes, stats.gene_factor.cols());
  for (Eigen::Index k = 0; k < phi.cols(); ++k) {
    RngStream rng = ctx.stream(StreamTag::kPhi, keys[static_cast<int>(k)]);
    for (Eigen::Index i = 0; i < genes; ++i) {
      phi(i, k) = dist::sample_log_gamma(eta + static_cast<double>(stats.gene_factor(i, k)), rng);
    }
    dist::normalize_log_weights(std::span<double>(phi.col(k).data(), static_cast<std::size_t>(genes)));
  }
  return phi;
}

Eigen::MatrixXd update_theta(const AugmentedStats& stats, const Eigen::VectorXd& r,
                             const SweepContext& ctx) {
  const FactorKeys& keys = keys_of(ctx);
  const Eigen::Index factors = stats.factor_sample.rows();
  Eigen::MatrixXd theta(factors, stats.factor_sample.cols());
  for (Eigen::Index j = 0; j < theta.cols(); ++j) {
    for (int k : keys.order()) {
      RngStream rng = ctx.stream(StreamTag::kTheta, static_cast<std::uint64_t>(j), keys[k]);
      theta(k, j) =
          dist::sample_log_gamma(r(k) + static_cast<double>(stats.factor_sample(k, j)), rng);
    }
    normalize_in_order(theta.col(j), keys.order());
  }
  return theta;
}

Eigen::VectorXd update_zeta(const AugmentedStats& stats, const ModelState& state,
                            const SweepContext& ctx) {
  const FactorKeys& keys = keys_of(ctx);
  const double r_total = ordered_sum(state.r, keys.order());
  const Eigen::VectorXd q = neg_log_complement(state.p);
  Eigen::VectorXd zeta(state.samples());
  for (Eigen::Index j = 0; j < zeta.size(); ++j) {
    RngStream rng = ctx.stream(StreamTag::kZeta, static_cast<std::uint64_t>(j));
    const double tables = static_cast<double>(stats.factor_sample.col(j).sum());
    zeta(j) = dist::sample_gamma(r_total + tables, 1.0 / (state.c(j) + q(j)), rng);
  }
  return zeta;
}

GeneEffectDraw update_alpha_lambda(const AugmentedStats& stats, const ModelState& state,
                                   const Hyperparameters& hp, const SweepContext& ctx) {
  GeneEffectDraw out;
  out.alpha.resize(stats.gene_effect.size());
  RngStream alpha_rng = ctx.stream(StreamTag::kAlpha);
  for (Eigen::Index i = 0; i < out.alpha.size(); ++i) {
    out.alpha(i) =
        dist::sample_log_gamma(hp.delta + static_cast<double>(stats.gene_effect(i)), alpha_rng);
  }
  dist::normalize_log_weights(
      std::span<double>(out.alpha.data(), static_cast<std::size_t>(out.alpha.size())));

  const double q_total = neg_log_complement(state.p).sum();
  RngStream lambda_rng = ctx.stream(StreamTag::kLambda);
  out.lambda = dist::sample_gamma(hp.u0 + static_cast<double>(stats.gene_effect_total),
                                  1.0 / (hp.v0 + q_total), lambda_rng);
  return out;
}

ShapeDraw update_r_gamma0(const AugmentedStats& stats, const ModelState& state,
                          const Hyperparameters& hp, const SweepContext& ctx) {
  const FactorKeys& keys = keys_of(ctx);
  const int factors = state.num_factors();
  const Eigen::Index samples = state.samples();
  const Eigen::VectorXd q = neg_log_complement(state.p);

  ShapeDraw out;
  out.second_level = CountArray::Zero(factors, samples);
  out.third_level = IndexVector::Zero(factors);

  // With theta_j * zeta_j integrated out, B_kj ~ NB(r_k, q_j / (c_j + q_j)),
  // whose CRT tables are Poisson with rate r_k * log(1 + q_j / c_j).
  double rate_total = 0.0;
  for (Eigen::Index j = 0; j < samples; ++j) rate_total += std::log1p(q(j) / state.c(j));

  const double shape_prior = state.gamma0 / factors;
  for (int k : keys.order()) {
    std::int64_t row_total = 0;
    for (Eigen::Index j = 0; j < samples; ++j) {
      RngStream rng = ctx.stream(StreamTag::kSecondLevel, static_cast<std::uint64_t>(j), keys[k]);
      const std::int64_t tables = dist::sample_crt(stats.factor_sample(k, j), state.r(k), rng);
      out.second_level(k, j) = tables;
      row_total += tables;
    }
    RngStream rng = ctx.stream(StreamTag::kThirdLevel, keys[k]);
    out.third_level(k) = dist::sample_crt(row_total, shape_prior, rng);
  }

  // gamma0 with r integrated out: sum_k l''_k ~ Pois(gamma0 * log(1 + Q / c0)).
  RngStream gamma_rng = ctx.stream(StreamTag::kGamma0);
  out.gamma0 = dist::sample_gamma(hp.g0 + static_cast<double>(out.third_level.sum()),
                                  1.0 / (hp.h0 + std::log1p(rate_total / state.c0)), gamma_rng);

  out.r.resize(factors);
  for (int k : keys.order()) {
    RngStream rng = ctx.stream(StreamTag::kR, keys[k]);
    const double shape =
        out.gamma0 / factors + static_cast<double>(out.second_level.row(k).sum());
    out.r(k) = dist::sample_gamma(shape, 1.0 / (state.c0 + rate_total), rng);
  }
  return out;
}

ScaleDraw update_c_p(const AugmentedStats& /*stats*/, const ModelState& state,
                     const Hyperparameters& hp, const IndexVector& column_totals,
                     const SweepContext& ctx) {
  const FactorKeys& keys = keys_of(ctx);
  const double r_total = ordered_sum(state.r, keys.order());
  const Eigen::Index samples = state.samples();
  ScaleDraw out;
  out.c.resize(samples);
  out.p.resize(samples);
  for (Eigen::Index j = 0; j < samples; ++j) {
    RngStream rng = ctx.stream(StreamTag::kC, static_cast<std::uint64_t>(j));
    out.c(j) = dist::sample_gamma(hp.e0 + r_total, 1.0 / (hp.f0 + state.zeta(j)), rng);
  }
  RngStream c0_rng = ctx.stream(StreamTag::kC0);
  out.c0 = dist::sample_gamma(hp.e0 + state.gamma0, 1.0 / (hp.f0 + r_total), c0_rng);
  for (Eigen::Index j = 0; j < samples; ++j) {
    RngStream rng = ctx.stream(StreamTag::kP, static_cast<std::uint64_t>(j));
    const double draw = dist::sample_beta(hp.a0 + static_cast<double>(column_totals(j)),
                                          hp.b0 + state.lambda + state.zeta(j), rng);
    out.p(j) = clamp_probability(draw);
  }
  return out;
}

ModelState gibbs_sweep(const CountMatrix& y, const ModelState& state, const Hyperparameters& hp,
                       const SweepContext& ctx, AugmentedStats* stats_out) {
  ModelState next = state;
  AugmentedStats stats = allocate_tables(y, next, ctx);

  next.phi = update_phi(stats, hp.eta, ctx);

  GeneEffectDraw gene_effect = update_alpha_lambda(stats, next, hp, ctx);
  next.alpha = std::move(gene_effect.alpha);
  next.lambda = gene_effect.lambda;

  // theta and zeta are redrawn after r because the (gamma0, r) update
  // integrates them out.
  ShapeDraw shapes = update_r_gamma0(stats, next, hp, ctx);
  next.r = std::move(shapes.r);
  next.gamma0 = shapes.gamma0;
  stats.second_level = std::move(shapes.second_level);
  stats.third_level = std::move(shapes.third_level);

  next.theta = update_theta(stats, next.r, ctx);
  next.zeta = update_zeta(stats, next, ctx);

  ScaleDraw scales = update_c_p(stats, next, hp, y.column_totals(), ctx);
  next.c = std::move(scales.c);
  next.c0 = scales.c0;
  next.p = std::move(scales.p);

  if (stats_out != nullptr) *stats_out = std::move(stats);
  return next;
}

ModelState initialize_state(Eigen::Index genes, Eigen::Index samples, int factors,
                            const Hyperparameters& hp, std::uint64_t seed,
                            const FactorKeys& keys) {
  hp.validate();
  if (genes < 1 || samples < 1 || factors < 1) {
    throw std::invalid_argument("state needs at least one gene, sample and factor");
  }
  if (keys.size() != factors) throw std::invalid_argument("factor keys do not match K");
  const SweepContext ctx{seed, 0, &keys, 1};

  ModelState s;
  s.gamma0 = hp.g0 / hp.h0;
  s.c0 = hp.e0 / hp.f0;
  s.lambda = hp.u0 / hp.v0;
  s.c = Eigen::VectorXd::Constant(samples, hp.e0 / hp.f0);

  s.r.resize(factors);
  for (int k : keys.order()) {
    RngStream rng = ctx.stream(StreamTag::kInitR, keys[k]);
    s.r(k) = dist::sample_gamma(s.gamma0 / factors, 1.0 / s.c0, rng);
  }
  s.phi.resize(genes, factors);
  for (int k = 0; k < factors; ++k) {
    RngStream rng = ctx.stream(StreamTag::kInitPhi, keys[k]);
    for (Eigen::Index i = 0; i < genes; ++i) s.phi(i, k) = dist::sample_log_gamma(hp.eta, rng);
    dist::normalize_log_weights(std::span<double>(s.phi.col(k).data(), static_cast<std::size_t>(genes)));
  }
  s.alpha.resize(genes);
  {
    RngStream rng = ctx.stream(StreamTag::kInitAlpha);
    for (Eigen::Index i = 0; i < genes; ++i) s.alpha(i) = dist::sample_log_gamma(hp.delta, rng);
    dist::normalize_log_weights(std::span<double>(s.alpha.data(), static_cast<std::size_t>(genes)));
  }
  s.theta.resize(factors, samples);
  const double r_total = ordered_sum(s.r, keys.order());
  s.zeta.resize(samples);
  s.p.resize(samples);
  for (Eigen::Index j = 0; j < samples; ++j) {
    for (int k : keys.order()) {
      RngStream rng = ctx.stream(StreamTag::kInitTheta, static_cast<std::uint64_t>(j), keys[k]);
      s.theta(k, j) = dist::sample_log_gamma(s.r(k), rng);
    }
    normalize_in_order(s.theta.col(j), keys.order());
    RngStream zeta_rng = ctx.stream(StreamTag::kInitZeta, static_cast<std::uint64_t>(j));
    s.zeta(j) = dist::sample_gamma(r_total, 1.0 / s.c(j), zeta_rng);
    RngStream p_rng = ctx.stream(StreamTag::kInitP, static_cast<std::uint64_t>(j));
    s.p(j) = clamp_probability(dist::sample_beta(hp.a0, hp.b0, p_rng));
  }
  return s;
}

ModelState draw_prior_state(Eigen::Index genes, Eigen::Index samples, int factors,
                            const Hyperparameters& hp, RngStream& rng) {
  hp.validate();
  ModelState s;
  s.gamma0 = dist::sample_gamma(hp.g0, 1.0 / hp.h0, rng);
  s.c0 = dist::sample_gamma(hp.e0, 1.0 / hp.f0, rng);
  s.r.resize(factors);
  for (int k = 0; k < factors; ++k) s.r(k) = dist::sample_gamma(s.gamma0 / factors, 1.0 / s.c0, rng);
  s.c.resize(samples);
  s.zeta.resize(samples);
  s.p.resize(samples);
  s.theta.resize(factors, samples);
  const std::vector<double> r(s.r.data(), s.r.data() + factors);
  for (Eigen::Index j = 0; j < samples; ++j) {
    s.c(j) = dist::sample_gamma(hp.e0, 1.0 / hp.f0, rng);
    const std::vector<double> col = dist::sample_dirichlet(r, rng);
    for (int k = 0; k < factors; ++k) s.theta(k, j) = col[static_cast<std::size_t>(k)];
    s.zeta(j) = dist::sample_gamma(s.r.sum(), 1.0 / s.c(j), rng);
    s.p(j) = clamp_probability(dist::sample_beta(hp.a0, hp.b0, rng));
  }
  s.phi.resize(genes, factors);
  const std::vector<double> eta(static_cast<std::size_t>(genes), hp.eta);
  for (int k = 0; k < factors; ++k) {
    const std::vector<double> col = dist::sample_dirichlet(eta, rng);
    for (Eigen::Index i = 0; i < genes; ++i) s.phi(i, k) = col[static_cast<std::size_t>(i)];
  }
  const std::vector<double> delta(static_cast<std::size_t>(genes), hp.delta);
  const std::vector<double> alpha = dist::sample_dirichlet(delta, rng);
  s.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), genes);
  s.lambda = dist::sample_gamma(hp.u0, 1.0 / hp.v0, rng);
  return s;
}

void StreamingMoments::add(const ModelState& s) {
  if (count == 0) {
    phi_mean = Eigen::MatrixXd::Zero(s.phi.rows(), s.phi.cols());
    phi_m2 = phi_mean;
    theta_mean = Eigen::MatrixXd::Zero(s.theta.rows(), s.theta.cols());
    theta_m2 = theta_mean;
    alpha_mean = Eigen::VectorXd::Zero(s.alpha.size());
    zeta_mean = Eigen::VectorXd::Zero(s.zeta.size());
    p_mean = Eigen::VectorXd::Zero(s.p.size());
    r_mean = Eigen::VectorXd::Zero(s.r.size());
    c_mean = Eigen::VectorXd::Zero(s.c.size());
  }
  ++count;
  const double n = static_cast<double>(count);
  const Eigen::MatrixXd phi_delta = s.phi - phi_mean;
  phi_mean += phi_delta / n;
  phi_m2 += phi_delta.cwiseProduct(s.phi - phi_mean);
  const Eigen::MatrixXd theta_delta = s.theta - theta_mean;
  theta_mean += theta_delta / n;
  theta_m2 += theta_delta.cwiseProduct(s.theta - theta_mean);
  alpha_mean += (s.alpha - alpha_mean) / n;
  zeta_mean += (s.zeta - zeta_mean) / n;
  p_mean += (s.p - p_mean) / n;
  r_mean += (s.r - r_mean) / n;
  c_mean += (s.c - c_mean) / n;
  lambda_mean += (s.lambda - lambda_mean) / n;
  gamma0_mean += (s.gamma0 - gamma0_mean) / n;
  c0_mean += (s.c0 - c0_mean) / n;
}

Eigen::MatrixXd StreamingMoments::phi_variance() const {
  if (count < 2) return Eigen::MatrixXd::Zero(phi_m2.rows(), phi_m2.cols());
  return phi_m2 / static_cast<double>(count - 1);
}

Eigen::MatrixXd StreamingMoments::theta_variance() const {
  if (count < 2) return Eigen::MatrixXd::Zero(theta_m2.rows(), theta_m2.cols());
  return theta_m2 / static_cast<double>(count - 1);
}

ChainOutput run_chain(const CountMatrix& y, int factors, const Hyperparameters& hp,
                      const ChainConfig& cfg) {
  if (factors < 1) throw std::invalid_argument("K must be at least 1");
  cfg.validate();
  const FactorKeys keys(factors);
  ModelState initial = initialize_state(y.genes(), y.samples(), factors, hp, cfg.seed, keys);
  return run_chain(y, std::move(initial), hp, cfg, keys);
}

ChainOutput run_chain(const CountMatrix& y, ModelState initial, const Hyperparameters& hp,
                      const ChainConfig& cfg, const FactorKeys& keys) {
  cfg.validate();
  hp.validate();
  initial.validate();
  ChainOutput out;
  out.num_factors = initial.num_factors();
  out.config = cfg;
  out.hyper = hp;
  const auto kept = static_cast<std::size_t>(cfg.kept_draws());
  out.loglik_trace.reserve(kept);
  out.kept_iterations.reserve(kept);
  out.sweep_seconds.reserve(static_cast<std::size_t>(cfg.total_iterations));
  if (cfg.store_draws) out.draws.reserve(kept);

  ModelState state = std::move(initial);
  for (int it = 1; it <= cfg.total_iterations; ++it) {
    const SweepContext ctx{cfg.seed, static_cast<std::uint64_t>(it), &keys, cfg.threads};
    const auto start = std::chrono::steady_clock::now();
    state = gibbs_sweep(y, state, hp, ctx);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    out.sweep_seconds.push_back(elapsed.count());
    if (!cfg.keeps(it)) continue;
    out.loglik_trace.push_back(full_log_likelihood(y, state));
    out.kept_iterations.push_back(it);
    out.moments.add(state);
    if (cfg.store_draws) out.draws.push_back(state);
  }
  return out;
}

std::vector<double> autocorrelation(std::span<const double> trace, int max_lag) {
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= trace.size()) {
    throw std::invalid_argument("trace must be longer than max_lag");
  }
  const double n = static_cast<double>(trace.size());
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / n;
  double denom = 0.0;
  for (double x : trace) denom += (x - mean) * (x - mean);
  std::vector<double> acf(static_cast<std::size_t>(max_lag) + 1, 0.0);
  acf[0] = 1.0;
  if (denom == 0.0) return acf;
  for (int lag = 1; lag <= max_lag; ++lag) {
    double num = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < trace.size(); ++t) {
      num += (trace[t] - mean) * (trace[t + static_cast<std::size_t>(lag)] - mean);
    }
    acf[static_cast<std::size_t>(lag)] = num / denom;
  }
  return acf;
}

}  // namespace baycount
