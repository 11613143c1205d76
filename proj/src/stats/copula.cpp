#include "limlsel/stats/copula.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "limlsel/stats/distributions.hpp"

namespace limlsel::stats {
namespace {

// A probability carried together with its complement so that quantiles in
// the upper tail keep full precision.
struct Tails {
  double p;
  double q;
};

struct TailPair {
  Tails first;
  Tails second;
};

TailPair draw_tails(const CopulaSpec& spec, RngStream& rng) {
  switch (spec.family) {
    case CopulaFamily::gaussian: {
      const double z1 = rng.normal();
      const double z2 = spec.param * z1 + std::sqrt(1.0 - spec.param * spec.param) * rng.normal();
      return {{norm_cdf(z1), norm_cdf(-z1)}, {norm_cdf(z2), norm_cdf(-z2)}};
    }
    case CopulaFamily::student_t: {
      const double z1 = rng.normal();
      const double z2 = spec.param * z1 + std::sqrt(1.0 - spec.param * spec.param) * rng.normal();
      const double df = spec.df;
      const double scale = std::sqrt(rng.chi_squared(df) / df);
      const double t1 = z1 / scale;
      const double t2 = z2 / scale;
      return {{student_t_cdf(t1, df), student_t_cdf(-t1, df)},
              {student_t_cdf(t2, df), student_t_cdf(-t2, df)}};
    }
    case CopulaFamily::clayton: {
      // Frailty construction: U_j = (1 + E_j / G)^(-1/theta), G ~ Gamma(1/theta).
      const double theta = spec.param;
      const double g = rng.gamma(1.0 / theta);
      const double a1 = -std::log1p(rng.exponential() / g) / theta;
      const double a2 = -std::log1p(rng.exponential() / g) / theta;
      return {{std::exp(a1), -std::expm1(a1)}, {std::exp(a2), -std::expm1(a2)}};
    }
  }
  throw std::logic_error("unknown copula family");
}

double quantile_from_tails(Margin margin, Tails t) {
  if (margin == Margin::logistic) return std::log(t.p) - std::log(t.q);
  return t.p <= 0.5 ? norm_quantile(t.p) : -norm_quantile(t.q);
}

}  // namespace

CopulaSpec CopulaSpec::gaussian(double rho) {
  CopulaSpec spec{CopulaFamily::gaussian, rho, kDefaultStudentTDf};
  spec.validate();
  return spec;
}

CopulaSpec CopulaSpec::student_t(double rho, int df) {
  CopulaSpec spec{CopulaFamily::student_t, rho, df};
  spec.validate();
  return spec;
}

CopulaSpec CopulaSpec::clayton(double theta) {
  CopulaSpec spec{CopulaFamily::clayton, theta, kDefaultStudentTDf};
  spec.validate();
  return spec;
}

void CopulaSpec::validate() const {
  switch (family) {
    case CopulaFamily::gaussian:
    case CopulaFamily::student_t:
      if (!std::isfinite(param) || std::abs(param) >= 1.0) {
        throw std::invalid_argument("copula correlation must lie in (-1, 1), got " +
                                    std::to_string(param));
      }
      if (family == CopulaFamily::student_t && df < 1) {
        throw std::invalid_argument("t-copula degrees of freedom must be >= 1, got " +
                                    std::to_string(df));
      }
      return;
    case CopulaFamily::clayton:
      if (!std::isfinite(param) || param <= 0.0) {
        throw std::invalid_argument("clayton theta must be > 0, got " + std::to_string(param));
      }
      return;
  }
}

std::string to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::gaussian: return "gaussian";
    case CopulaFamily::student_t: return "student_t";
    case CopulaFamily::clayton: return "clayton";
  }
  return "?";
}

std::string to_string(Margin margin) {
  return margin == Margin::normal ? "normal" : "logistic";
}

CopulaFamily parse_copula_family(const std::string& name) {
  if (name == "gaussian" || name == "normal") return CopulaFamily::gaussian;
  if (name == "student_t" || name == "t") return CopulaFamily::student_t;
  if (name == "clayton") return CopulaFamily::clayton;
  throw std::invalid_argument("unknown copula family '" + name + "'");
}

Margin parse_margin(const std::string& name) {
  if (name == "normal") return Margin::normal;
  if (name == "logistic") return Margin::logistic;
  throw std::invalid_argument("unknown margin '" + name + "'");
}

double margin_cdf(Margin margin, double x) {
  return margin == Margin::normal ? norm_cdf(x) : logistic_cdf(x);
}

double margin_quantile(Margin margin, double u) {
  return margin == Margin::normal ? norm_quantile(u) : logistic_quantile(u);
}

std::pair<double, double> sample_copula_pair(const CopulaSpec& spec, RngStream& rng) {
  const TailPair t = draw_tails(spec, rng);
  return {t.first.p, t.second.p};
}

std::pair<double, double> sample_latent_pair(const CopulaSpec& spec, Margin margin,
                                             RngStream& rng) {
  if (spec.family == CopulaFamily::gaussian && margin == Margin::normal) {
    const double z1 = rng.normal();
    const double z2 = spec.param * z1 + std::sqrt(1.0 - spec.param * spec.param) * rng.normal();
    return {z1, z2};
  }
  const TailPair t = draw_tails(spec, rng);
  return {quantile_from_tails(margin, t.first), quantile_from_tails(margin, t.second)};
}

double clayton_cdf(double u1, double u2, double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("clayton theta must be > 0, got " + std::to_string(theta));
  }
  if (u1 <= 0.0 || u2 <= 0.0) return 0.0;
  const double upper = std::min(u1, u2);
  const double s = std::pow(u1, -theta) + std::pow(u2, -theta) - 1.0;
  const double c = std::pow(s, -1.0 / theta);
  return std::clamp(c, 0.0, upper);
}

double latent_correlation(const CopulaSpec& spec, Margin margin, std::size_t pairs,
                          std::uint64_t seed) {
  RngStream rng(seed, 0);
  double mean_v = 0, mean_u = 0, svv = 0, suu = 0, svu = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto [v, u] = sample_latent_pair(spec, margin, rng);
    // Welford-style running moments.
    const double n = static_cast<double>(i + 1);
    const double dv = v - mean_v;
    const double du = u - mean_u;
    mean_v += dv / n;
    mean_u += du / n;
    svv += dv * (v - mean_v);
    suu += du * (u - mean_u);
    svu += dv * (u - mean_u);
  }
  return svu / std::sqrt(svv * suu);
}

Calibration calibrate_copula_param(CopulaFamily family, double target_corr, Margin margins,
                                   const CalibrationOptions& options) {
  if (!(target_corr > 0.0 && target_corr < 1.0)) {
    throw std::invalid_argument("calibration target must lie in (0, 1), got " +
                                std::to_string(target_corr));
  }
  auto make = [&](double param) {
    switch (family) {
      case CopulaFamily::gaussian: return CopulaSpec::gaussian(param);
      case CopulaFamily::student_t: return CopulaSpec::student_t(param, options.df);
      case CopulaFamily::clayton: return CopulaSpec::clayton(param);
    }
    throw std::logic_error("unknown copula family");
  };
  auto corr_at = [&](double param) {
    return latent_correlation(make(param), margins, options.pairs, options.seed);
  };

  double lo = family == CopulaFamily::clayton ? 1e-6 : 0.0;
  double hi = family == CopulaFamily::clayton ? 40.0 : 0.995;
  double f_lo = family == CopulaFamily::clayton ? corr_at(lo) : 0.0;
  const double f_hi = corr_at(hi);
  if (!(f_lo < target_corr && target_corr < f_hi)) {
    throw CalibrationError("cannot bracket target correlation " + std::to_string(target_corr) +
                           " for " + to_string(family) + " copula with " + to_string(margins) +
                           " margins: attainable range (" + std::to_string(f_lo) + ", " +
                           std::to_string(f_hi) + ")");
  }

  double mid = 0.5 * (lo + hi);
  double f_mid = corr_at(mid);
  for (int it = 0; it < options.max_iterations; ++it) {
    if (std::abs(f_mid - target_corr) < options.tolerance) break;
    if (f_mid < target_corr) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    f_mid = corr_at(mid);
  }
  return {make(mid), f_mid};
}

}  // namespace limlsel::stats
