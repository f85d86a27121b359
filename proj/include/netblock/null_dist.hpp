#pragma once

#include <cmath>

#include "netblock/errors.hpp"

namespace netblock {

// Limiting null law of the corrected max-correlation statistic:
//   F(x) = exp{ -pi^(-1/2) exp(-x/2) }.
// The pi^(-1/2) constant is the one consistent with the quantile formula
// below; F is strictly increasing from 0 to 1 over the reals.
inline double gumbel_cdf(double x) {
  constexpr double inv_sqrt_pi = 0.564189583547756286948079451561;
  return std::exp(-inv_sqrt_pi * std::exp(-x / 2.0));
}

// (1-alpha) quantile of F: q_alpha = -log(pi) - 2 log log{1/(1-alpha)}.
inline double gumbel_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("gumbel_quantile: alpha must be in (0, 1)");
  constexpr double log_pi = 1.144729885849400174143427351353;
  return -log_pi - 2.0 * std::log(std::log(1.0 / (1.0 - alpha)));
}

// Simultaneous threshold over all p(p-1)/2 region pairs:
// reject a pair when its statistic exceeds 2 log{p(p-1)/2} + q_alpha.
inline double fwer_threshold(std::size_t p, double alpha) {
  if (p < 2) throw DomainError("fwer_threshold: need p >= 2 regions");
  const double pairs = static_cast<double>(p) * (static_cast<double>(p) - 1.0) / 2.0;
  return 2.0 * std::log(pairs) + gumbel_quantile(alpha);
}

inline double normal_cdf(double z) {
  constexpr double inv_sqrt2 = 0.707106781186547524400844362105;
  return 0.5 * std::erfc(-z * inv_sqrt2);
}

// Inverse standard normal CDF: Acklam's rational approximation polished by
// one Halley step, good to ~1e-15 over (0,1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("normal_quantile: p must be in (0, 1)");

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};

  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double u = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (p <= 1.0 - plow) {
    const double u = p - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }

  const double e = normal_cdf(x) - p;
  const double pdf = 0.398942280401432677939946059934 * std::exp(-0.5 * x * x);
  const double u = e / pdf;
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace netblock
