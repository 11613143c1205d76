#include "limlsel/stats/distributions.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace limlsel::stats {

double norm_pdf(double x) {
  constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw std::domain_error("norm_quantile: p must lie in [0, 1]");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

double log_norm_cdf_floored(double x) {
  const double p = norm_cdf(x);
  return std::log(p < kProbabilityFloor ? kProbabilityFloor : p);
}

namespace {

// Below this point Phi(x) loses relative precision to underflow.
constexpr double kTailCut = -30.0;

// Continued fraction for the Mills ratio Phi(x) / phi(x) at x << 0.
double mills_ratio_tail(double x) {
  const double t = -x;
  double frac = t;
  for (int k = 40; k >= 1; --k) frac = t + k / frac;
  return 1.0 / frac;
}

}  // namespace

double inverse_mills(double x) {
  if (x < kTailCut) return 1.0 / mills_ratio_tail(x);
  return norm_pdf(x) / norm_cdf(x);
}

double log_norm_cdf(double x) {
  if (x < kTailCut) {
    return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(mills_ratio_tail(x));
  }
  return std::log(norm_cdf(x));
}

double logistic_cdf(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("logistic_quantile: p must lie in (0, 1), got " +
                            std::to_string(p));
  }
  return std::log(p) - std::log1p(-p);
}

double student_t_cdf(double x, double df) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>{df}, x);
}

Correlation::Correlation(double rho) : rho_(rho) {
  if (!std::isfinite(rho) || std::abs(rho) >= 1.0) {
    throw std::invalid_argument("correlation must lie in (-1, 1), got " +
                                std::to_string(rho));
  }
}

}  // namespace limlsel::stats
