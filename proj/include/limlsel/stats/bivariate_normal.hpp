#pragma once

#include <array>
#include <cstddef>

#include "limlsel/stats/distributions.hpp"

namespace limlsel::stats {

// Standard bivariate normal with fixed correlation. The Gauss-Legendre nodes
// of the Drezner-Genz integration depend only on rho, so they are computed
// once here and reused across cdf() calls.
class BivariateNormal {
 public:
  explicit BivariateNormal(Correlation rho);

  double rho() const { return rho_; }

  // P(V <= h, U <= k). Either bound may be +-infinity.
  double cdf(double h, double k) const;

  double pdf(double h, double k) const;

 private:
  double upper(double h, double k) const;
  double lower_tail(double h, double k) const;

  static constexpr std::size_t kMaxNodes = 40;

  double rho_;
  std::size_t node_count_ = 0;
  std::array<double, kMaxNodes> weight_{};
  // |rho| < 0.925: sin(asin(rho)/2 * x) and 1 - sin^2.
  std::array<double, kMaxNodes> sn_{};
  std::array<double, kMaxNodes> one_minus_sn2_{};
  double half_asin_ = 0.0;
  // |rho| >= 0.925: scaled squared nodes and sqrt(1 - xs).
  std::array<double, kMaxNodes> xs_{};
  std::array<double, kMaxNodes> rs_{};
  bool near_singular_ = false;
};

// P(V <= h, U <= k) for a standard bivariate normal with correlation rho.
double bvn_cdf(double h, double k, Correlation rho);

double bvn_pdf(double h, double k, double rho);

}  // namespace limlsel::stats
