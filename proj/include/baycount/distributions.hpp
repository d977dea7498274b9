#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "baycount/rng.hpp"

namespace baycount::dist {

/// Smallest value any continuous positive draw is allowed to return.
inline constexpr double kPositiveFloor = 1e-300;

double sample_normal(RngStream& rng);

/// Gamma with the given shape and scale (mean shape*scale).
/// Shapes below one use the boosting identity
/// Gamma(a) = Gamma(a+1) * U^(1/a), evaluated on the log scale.
double sample_gamma(double shape, double scale, RngStream& rng);

/// Log of a Gamma(shape, 1) draw. Stays finite for shapes where the draw
/// itself underflows double precision.
double sample_log_gamma(double shape, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

std::vector<double> sample_dirichlet(std::span<const double> concentration,
                                     RngStream& rng);

/// Normalizes log-gamma variates into a simplex vector in place.
void normalize_log_weights(std::span<double> log_weights);

std::int64_t sample_poisson(double mean, RngStream& rng);

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng);

/// Chinese restaurant table count: the sum of x independent
/// Bernoulli(r / (r + t - 1)) variables, t = 1..x.
std::int64_t sample_crt(std::int64_t x, double r, RngStream& rng);

/// Logarithmic-series draw with mass -p^u / (u log(1-p)), u >= 1.
std::int64_t sample_logarithmic(double p, RngStream& rng);

std::int64_t sample_sumlog(std::int64_t ell, double p, RngStream& rng);

std::vector<std::int64_t> sample_multinomial(std::int64_t n,
                                             std::span<const double> weights,
                                             RngStream& rng);

/// Multinomial split into `out`, visiting categories in `order`.
/// `out` and `weights` have the same length; `order` is a permutation of
/// their indices.
void sample_multinomial_into(std::int64_t n, std::span<const double> weights,
                             std::span<const int> order,
                             std::span<std::int64_t> out, RngStream& rng);

/// NB(r, p) as a Poisson mixture over Gamma(r, p/(1-p)).
std::int64_t sample_negative_binomial(double r, double p, RngStream& rng);

}  // namespace baycount::dist
