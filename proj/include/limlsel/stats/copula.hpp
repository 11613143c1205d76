#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "limlsel/stats/rng.hpp"

namespace limlsel::stats {

enum class CopulaFamily { gaussian, student_t, clayton };
enum class Margin { normal, logistic };

inline constexpr int kDefaultStudentTDf = 3;

// Bivariate copula. param is the correlation for gaussian/student_t and the
// dependence parameter theta > 0 for clayton. df is used by student_t only.
struct CopulaSpec {
  CopulaFamily family = CopulaFamily::gaussian;
  double param = 0.0;
  int df = kDefaultStudentTDf;

  static CopulaSpec gaussian(double rho);
  static CopulaSpec student_t(double rho, int df = kDefaultStudentTDf);
  static CopulaSpec clayton(double theta);

  // Throws std::invalid_argument on an out-of-range parameter.
  void validate() const;
};

std::string to_string(CopulaFamily family);
std::string to_string(Margin margin);
// Throw std::invalid_argument on an unknown name.
CopulaFamily parse_copula_family(const std::string& name);
Margin parse_margin(const std::string& name);

double margin_cdf(Margin margin, double x);
double margin_quantile(Margin margin, double u);

// (u1, u2) with uniform margins and the copula's dependence.
std::pair<double, double> sample_copula_pair(const CopulaSpec& spec, RngStream& rng);

// (v, u) with the requested margins. For the gaussian copula with normal
// margins the correlated normals are returned directly.
std::pair<double, double> sample_latent_pair(const CopulaSpec& spec, Margin margin,
                                             RngStream& rng);

// Clayton copula C(u1, u2), clamped to [0, min(u1, u2)]. Throws
// std::invalid_argument when theta <= 0.
double clayton_cdf(double u1, double u2, double theta);

// Pearson correlation of margin-transformed copula draws from a fixed stream.
double latent_correlation(const CopulaSpec& spec, Margin margin, std::size_t pairs,
                          std::uint64_t seed);

struct CalibrationOptions {
  std::size_t pairs = 200000;
  std::uint64_t seed = 0x5EEDC0FFEEULL;
  int df = kDefaultStudentTDf;
  int max_iterations = 60;
  double tolerance = 1e-4;
};

struct Calibration {
  CopulaSpec spec;
  double achieved_correlation = 0.0;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bisection over the copula parameter so that the correlation of the
// margin-transformed pair matches target_corr. Throws std::invalid_argument
// unless 0 < target_corr < 1 and CalibrationError when the target is not
// bracketed.
Calibration calibrate_copula_param(CopulaFamily family, double target_corr, Margin margins,
                                   const CalibrationOptions& options = {});

}  // namespace limlsel::stats
