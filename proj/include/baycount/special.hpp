#pragma once

#include <cmath>

namespace baycount {

/// log|Gamma(x)|. glibc's lgamma writes the global `signgam`, so the
/// reentrant variant is used where available.
inline double log_gamma(double x) noexcept {
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace baycount
