#include "limlsel/stats/bivariate_normal.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <span>

namespace limlsel::stats {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Below this the series result is replaced by direct quadrature, which keeps
// relative accuracy where the series only has absolute accuracy.
constexpr double kTailProbability = 1e-7;

// Positive Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 3> kX6 = {0.9324695142031522, 0.6612093864662647,
                                       0.2386191860831970};
constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384,
                                       0.4679139345726904};
constexpr std::array<double, 6> kX12 = {
    0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
    0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
constexpr std::array<double, 6> kW12 = {
    0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
    0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
constexpr std::array<double, 10> kX20 = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
    0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
    0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
    0.07652652113349733};
constexpr std::array<double, 10> kW20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
    0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
    0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
    0.1527533871307259};

}  // namespace

BivariateNormal::BivariateNormal(Correlation rho) : rho_(rho.value()) {
  const double r = std::abs(rho_);
  std::span<const double> x;
  std::span<const double> w;
  if (r < 0.3) {
    x = kX6;
    w = kW6;
  } else if (r < 0.75) {
    x = kX12;
    w = kW12;
  } else {
    x = kX20;
    w = kW20;
  }
  const std::size_t half = x.size();
  node_count_ = 2 * half;
  // Nodes mapped to (0, 2): 1 - x and 1 + x.
  std::array<double, kMaxNodes> node{};
  for (std::size_t i = 0; i < half; ++i) {
    node[i] = 1.0 - x[i];
    node[half + i] = 1.0 + x[i];
    weight_[i] = w[i];
    weight_[half + i] = w[i];
  }

  near_singular_ = r >= 0.925;
  if (!near_singular_) {
    half_asin_ = std::asin(rho_) / 2.0;
    for (std::size_t i = 0; i < node_count_; ++i) {
      sn_[i] = std::sin(half_asin_ * node[i]);
      one_minus_sn2_[i] = 1.0 - sn_[i] * sn_[i];
    }
  } else {
    const double a = std::sqrt(1.0 - rho_ * rho_) / 2.0;
    for (std::size_t i = 0; i < node_count_; ++i) {
      xs_[i] = (a * node[i]) * (a * node[i]);
      rs_[i] = std::sqrt(1.0 - xs_[i]);
    }
  }
}

// P(V > h, U > k).
double BivariateNormal::upper(double h, double k) const {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : norm_cdf(-k);
  if (k == -kInf) return norm_cdf(-h);
  if (rho_ == 0.0) return norm_cdf(-h) * norm_cdf(-k);

  double hk = h * k;
  double bvn = 0.0;
  if (!near_singular_) {
    const double hs = (h * h + k * k) / 2.0;
    for (std::size_t i = 0; i < node_count_; ++i) {
      bvn += weight_[i] * std::exp((sn_[i] * hk - hs) / one_minus_sn2_[i]);
    }
    bvn = bvn * half_asin_ / kTwoPi + norm_cdf(-h) * norm_cdf(-k);
  } else {
    if (rho_ < 0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(rho_) < 1.0) {
      const double as = 1.0 - rho_ * rho_;
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
      }
      if (hk > -100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(kTwoPi) * norm_cdf(-b / a);
        bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      double sum = 0.0;
      for (std::size_t i = 0; i < node_count_; ++i) {
        const double xs = xs_[i];
        asr = -(bs / xs + hk) / 2.0;
        if (asr <= -100.0) continue;
        const double sp = 1.0 + c * xs * (1.0 + d * xs);
        const double rs = rs_[i];
        const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
        sum += weight_[i] * std::exp(asr) * (sp - ep);
      }
      bvn = (a * sum - bvn) / kTwoPi;
    }
    if (rho_ > 0) {
      bvn += norm_cdf(-std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      const double span = h < 0 ? norm_cdf(k) - norm_cdf(h) : norm_cdf(-h) - norm_cdf(-k);
      bvn = span - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

double BivariateNormal::cdf(double h, double k) const {
  const double p = upper(-h, -k);
  if (p >= kTailProbability || !std::isfinite(h) || !std::isfinite(k)) return p;
  return lower_tail(h, k);
}

// P(V <= h, U <= k) as the integral over v <= min(h, k) of the density of V
// times the conditional probability of the other bound.
double BivariateNormal::lower_tail(double h, double k) const {
  if (k < h) std::swap(h, k);
  const double s = std::sqrt(1.0 - rho_ * rho_);
  auto f = [&](double v) { return norm_pdf(v) * norm_cdf((k - rho_ * v) / s); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, -std::numeric_limits<double>::infinity(), h, 15, 1e-12);
}

double BivariateNormal::pdf(double h, double k) const { return bvn_pdf(h, k, rho_); }

double bvn_cdf(double h, double k, Correlation rho) {
  return BivariateNormal(rho).cdf(h, k);
}

double bvn_pdf(double h, double k, double rho) {
  const double one_minus = 1.0 - rho * rho;
  const double q = (h * h - 2.0 * rho * h * k + k * k) / one_minus;
  return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(one_minus));
}

}  // namespace limlsel::stats
