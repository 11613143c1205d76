#pragma once

#include <limits>

namespace limlsel::stats {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard normal density and CDF. The CDF accepts +-infinity.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

// log(Phi(x)) with the probability floored at kProbabilityFloor.
inline constexpr double kProbabilityFloor = 1e-300;
double log_norm_cdf_floored(double x);

// phi(x) / Phi(x), accurate far into the lower tail.
double inverse_mills(double x);
// log(Phi(x)) without flooring, accurate far into the lower tail.
double log_norm_cdf(double x);

double logistic_cdf(double x);
// Throws std::domain_error unless 0 < p < 1.
double logistic_quantile(double p);

double student_t_cdf(double x, double df);

// Correlation in the open interval (-1, 1).
class Correlation {
 public:
  // Throws std::invalid_argument when |rho| >= 1 or rho is not finite.
  explicit Correlation(double rho);
  double value() const { return rho_; }

 private:
  double rho_;
};

}  // namespace limlsel::stats
