#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>

#include "limlsel/model/dataset.hpp"
#include "limlsel/stats/copula.hpp"
#include "limlsel/stats/rng.hpp"

namespace limlsel::dgp {

// (1) weak correlation, strong IV, strong treatment; (2) weak IV;
// (3) strong correlation; (4) weak treatment. Unnamed factors stay at the
// scenario (1) level.
enum class ScenarioId { s1, s2, s3, s4 };
enum class Level { weak, strong };

std::string to_string(ScenarioId id);
ScenarioId parse_scenario(const std::string& name);
std::string to_string(Level level);

struct ScenarioConfig {
  model::TreatmentKind treatment_kind = model::TreatmentKind::continuous;
  ScenarioId scenario = ScenarioId::s1;
  stats::CopulaFamily copula = stats::CopulaFamily::gaussian;
  stats::Margin margin = stats::Margin::normal;
  int t_df = stats::kDefaultStudentTDf;
  std::size_t n = 300;
  std::uint64_t seed = 1;

  Level corr_level() const;
  Level iv_strength() const;
  Level effect_size() const;
  // Target correlation of (V, U): 0.3 weak, 0.6 strong.
  double target_correlation() const;

  // Throws std::invalid_argument on n == 0 or a bad df.
  void validate() const;
  std::string describe() const;
};

// Treatment coefficients in the order of the true treatment formula a4
// (1, z, x2, x3).
Eigen::VectorXd true_alpha(const ScenarioConfig& cfg);
// Outcome coefficients in the order of the true outcome formula: b2
// (1, w, x1, x2) for continuous treatment, b5 (1, w, x1, x2, w*x1) for
// dichotomous treatment.
Eigen::VectorXd true_beta(const ScenarioConfig& cfg);
// Coefficient of w in the outcome model.
double true_treatment_coefficient(const ScenarioConfig& cfg);

// Copula of (V, U). Gaussian with normal margins uses the target correlation
// directly; other combinations are calibrated once per process and cached.
stats::CopulaSpec confounder_copula(const ScenarioConfig& cfg);

// Latent errors are kept in Dataset::v and Dataset::u.
model::Dataset gen_continuous(const ScenarioConfig& cfg, stats::RngStream& rng);
model::Dataset gen_dichotomous(const ScenarioConfig& cfg, stats::RngStream& rng);
model::Dataset generate(const ScenarioConfig& cfg, stats::RngStream& rng);

// Recomputes w and y from the stored covariates and latents.
model::Dataset rederive_outcomes(const ScenarioConfig& cfg, const model::Dataset& data);

}  // namespace limlsel::dgp
