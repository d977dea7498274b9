#include "baycount/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "baycount/special.hpp"

namespace baycount::dist {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// Marsaglia-Tsang squeeze for shape >= 1, returning the log of the draw.
double log_gamma_marsaglia(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d) + std::log(v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

// Sequential-search inversion; used when n * p is small.
std::int64_t binomial_inversion(std::int64_t n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  const double start = std::pow(q, static_cast<double>(n));
  for (;;) {
    double r = start;
    double u = rng.uniform();
    std::int64_t x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) break;
      r *= a / static_cast<double>(x) - s;
    }
    if (x <= n) return x;
  }
}

// Hormann's PTRS transformed rejection, valid for mean >= 10.
std::int64_t poisson_ptrs(double mean, RngStream& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - log_gamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

double sample_normal(RngStream& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_log_gamma(double shape, RngStream& rng) {
  require(positive_finite(shape), "gamma shape must be positive and finite");
  if (shape >= 1.0) return log_gamma_marsaglia(shape, rng);
  const double boosted = log_gamma_marsaglia(shape + 1.0, rng);
  return boosted + std::log(rng.uniform()) / shape;
}

double sample_gamma(double shape, double scale, RngStream& rng) {
  require(positive_finite(shape), "gamma shape must be positive and finite");
  require(positive_finite(scale), "gamma scale must be positive and finite");
  const double value = std::exp(sample_log_gamma(shape, rng) + std::log(scale));
  return std::clamp(value, kPositiveFloor, std::numeric_limits<double>::max());
}

double sample_beta(double a, double b, RngStream& rng) {
  require(positive_finite(a) && positive_finite(b),
          "beta parameters must be positive and finite");
  const double la = sample_log_gamma(a, rng);
  const double lb = sample_log_gamma(b, rng);
  return 1.0 / (1.0 + std::exp(lb - la));
}

void normalize_log_weights(std::span<double> log_weights) {
  if (log_weights.empty()) return;
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (double& w : log_weights) {
    w = std::exp(w - top);
    total += w;
  }
  for (double& w : log_weights) w /= total;
}

std::vector<double> sample_dirichlet(std::span<const double> concentration,
                                     RngStream& rng) {
  require(!concentration.empty(), "dirichlet needs at least one component");
  std::vector<double> out(concentration.size());
  for (std::size_t k = 0; k < concentration.size(); ++k) {
    require(positive_finite(concentration[k]),
            "dirichlet concentration must be positive and finite");
    out[k] = sample_log_gamma(concentration[k], rng);
  }
  normalize_log_weights(out);
  return out;
}

std::int64_t sample_poisson(double mean, RngStream& rng) {
  require(std::isfinite(mean) && mean >= 0.0,
          "poisson mean must be nonnegative and finite");
  if (mean == 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(mean, rng);
  for (;;) {
    double prob = std::exp(-mean);
    double u = rng.uniform();
    std::int64_t k = 0;
    while (u > prob && k < 1000) {
      u -= prob;
      ++k;
      prob *= mean / static_cast<double>(k);
    }
    if (k < 1000) return k;
  }
}

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  require(n >= 0, "binomial trial count must be nonnegative");
  require(p >= 0.0 && p <= 1.0, "binomial probability must lie in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
  if (static_cast<double>(n) * p < 20.0) return binomial_inversion(n, p, rng);
  // Split on the i-th order statistic of n uniforms (Devroye, ch. X.4).
  const std::int64_t i = (n + 1) / 2;
  const double la = sample_log_gamma(static_cast<double>(i), rng);
  const double lb = sample_log_gamma(static_cast<double>(n + 1 - i), rng);
  const double u = 1.0 / (1.0 + std::exp(lb - la));
  const double one_minus_u = 1.0 / (1.0 + std::exp(la - lb));
  if (u <= p) {
    return i + sample_binomial(n - i, std::clamp((p - u) / one_minus_u, 0.0, 1.0), rng);
  }
  return sample_binomial(i - 1, std::clamp(p / u, 0.0, 1.0), rng);
}

std::int64_t sample_crt(std::int64_t x, double r, RngStream& rng) {
  require(x >= 0, "CRT customer count must be nonnegative");
  require(positive_finite(r), "CRT concentration must be positive and finite");
  if (x == 0) return 0;
  std::int64_t tables = 1;  // the first customer always opens a table
  std::int64_t t = 2;
  // Bernoulli sum while success probabilities are large.
  const double direct_limit = std::max(64.0, 3.0 * r + 1.0);
  for (; t <= x && static_cast<double>(t) <= direct_limit; ++t) {
    if (rng.uniform() * (r + static_cast<double>(t - 1)) < r) ++tables;
  }
  // Beyond that, invert the waiting time to the next success. The log
  // probability of no success at positions t..m is
  //   lgamma(m) - lgamma(t-1) - lgamma(r+m) + lgamma(r+t-1).
  while (t <= x) {
    const double base = log_gamma(r + static_cast<double>(t - 1)) -
                        log_gamma(static_cast<double>(t - 1));
    auto no_success_through = [&](std::int64_t m) {
      const double md = static_cast<double>(m);
      return log_gamma(md) - log_gamma(r + md) + base;
    };
    const double log_u = std::log(rng.uniform());
    if (no_success_through(x) > log_u) break;
    // Smallest m in [t, x] with no_success_through(m) <= log_u. Start from
    // the asymptotic root of -r log((m + c) / (t - 1 + c)) = log_u, then
    // bracket and bisect.
    const double c = 0.5 * (r - 1.0);
    const double guess =
        (static_cast<double>(t - 1) + c) * std::exp(-log_u / r) - c;
    std::int64_t start = t;
    if (!(guess < static_cast<double>(x))) {
      start = x;
    } else if (guess > static_cast<double>(t)) {
      start = static_cast<std::int64_t>(guess);
    }
    std::int64_t lo = t - 1;  // no_success_through(lo) > log_u, or lo == t - 1
    std::int64_t hi = x;      // no_success_through(hi) <= log_u
    std::int64_t step = 1;
    if (no_success_through(start) > log_u) {
      lo = start;
      for (std::int64_t probe = std::min(x, start + step); probe < x;
           probe = std::min(x, lo + step)) {
        if (no_success_through(probe) <= log_u) {
          hi = probe;
          break;
        }
        lo = probe;
        step *= 2;
      }
    } else {
      hi = start;
      for (std::int64_t probe = std::max(t - 1, start - step); probe > t - 1;
           probe = std::max(t - 1, hi - step)) {
        if (no_success_through(probe) > log_u) {
          lo = probe;
          break;
        }
        hi = probe;
        step *= 2;
      }
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (no_success_through(mid) > log_u) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    ++tables;
    t = hi + 1;
  }
  return tables;
}

std::int64_t sample_logarithmic(double p, RngStream& rng) {
  require(p > 0.0 && p < 1.0, "logarithmic parameter must lie in (0, 1)");
  // Kemp's LK algorithm
  const double log_q = std::log1p(-p);
  for (;;) {
    const double v = rng.uniform();
    if (v >= p) return 1;
    const double u = rng.uniform();
    const double q = -std::expm1(log_q * u);
    if (v <= q * q) {
      const double draw = std::floor(1.0 + std::log(v) / std::log(q));
      if (draw < 1.0) continue;
      if (draw >= 9.2e18) continue;
      return static_cast<std::int64_t>(draw);
    }
    return v >= q ? 1 : 2;
  }
}

std::int64_t sample_sumlog(std::int64_t ell, double p, RngStream& rng) {
  require(ell >= 0, "sum-logarithmic term count must be nonnegative");
  require(p > 0.0 && p < 1.0, "logarithmic parameter must lie in (0, 1)");
  std::int64_t total = 0;
  for (std::int64_t t = 0; t < ell; ++t) total += sample_logarithmic(p, rng);
  return total;
}

void sample_multinomial_into(std::int64_t n, std::span<const double> weights,
                             std::span<const int> order,
                             std::span<std::int64_t> out, RngStream& rng) {
  require(n >= 0, "multinomial trial count must be nonnegative");
  require(out.size() == weights.size() && order.size() == weights.size(),
          "multinomial buffers must match the weight count");
  std::fill(out.begin(), out.end(), 0);
  if (n == 0) return;
  // suffix sums in visiting order avoid cancellation from running subtraction
  std::vector<double> remaining(order.size() + 1, 0.0);
  for (std::size_t m = order.size(); m-- > 0;) {
    const double w = weights[order[m]];
    require(std::isfinite(w) && w >= 0.0,
            "multinomial weights must be nonnegative and finite");
    remaining[m] = remaining[m + 1] + w;
  }
  require(remaining[0] > 0.0, "multinomial weights are all zero");
  std::int64_t left = n;
  for (std::size_t m = 0; m < order.size() && left > 0; ++m) {
    const double w = weights[order[m]];
    if (w <= 0.0) continue;
    std::int64_t draw;
    if (remaining[m + 1] <= 0.0) {
      draw = left;
    } else {
      draw = sample_binomial(left, std::min(1.0, w / remaining[m]), rng);
    }
    out[order[m]] = draw;
    left -= draw;
  }
}

std::vector<std::int64_t> sample_multinomial(std::int64_t n,
                                             std::span<const double> weights,
                                             RngStream& rng) {
  std::vector<int> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::int64_t> out(weights.size(), 0);
  sample_multinomial_into(n, weights, order, out, rng);
  return out;
}

std::int64_t sample_negative_binomial(double r, double p, RngStream& rng) {
  require(positive_finite(r), "NB shape must be positive and finite");
  require(p > 0.0 && p < 1.0, "NB probability must lie in (0, 1)");
  const double rate = sample_gamma(r, p / (1.0 - p), rng);
  return sample_poisson(rate, rng);
}

}  // namespace baycount::dist
