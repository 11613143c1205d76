#include "limlsel/effects/effects.hpp"

#include <stdexcept>

#include "limlsel/stats/copula.hpp"
#include "limlsel/stats/distributions.hpp"
#include "limlsel/stats/rng.hpp"

namespace limlsel::effects {

EffectEstimate plug_in_effect(const est::FitResult& fit, const model::Dataset& data) {
  if (!fit.outcome_formula) throw std::invalid_argument("fit carries no outcome formula");
  const model::ModelFormula& f = *fit.outcome_formula;
  if (!f.uses(model::Variable::w)) {
    throw std::invalid_argument("outcome model " + f.label() + " has no treatment term");
  }
  const bool with_residual = fit.method == est::Method::two_sri;
  if (with_residual && fit.residuals.size() != static_cast<Eigen::Index>(data.size())) {
    throw std::invalid_argument("2SRI residuals do not match the dataset");
  }
  const Eigen::VectorXd eta1 = model::design_matrix(f, data, 1.0) * fit.theta.beta;
  const Eigen::VectorXd eta0 = model::design_matrix(f, data, 0.0) * fit.theta.beta;
  double s1 = 0.0, s0 = 0.0;
  for (Eigen::Index i = 0; i < eta1.size(); ++i) {
    const double shift = with_residual ? fit.residual_coef * fit.residuals(i) : 0.0;
    if (fit.linear_outcome) {
      s1 += eta1(i);
      s0 += eta0(i);
    } else {
      s1 += stats::norm_cdf(eta1(i) + shift);
      s0 += stats::norm_cdf(eta0(i) + shift);
    }
  }
  const double n = static_cast<double>(eta1.size());
  EffectEstimate e;
  e.p_y1 = s1 / n;
  e.p_y0 = s0 / n;
  e.ate = e.p_y1 - e.p_y0;
  return e;
}

EffectEstimate true_effect_oracle(const dgp::ScenarioConfig& cfg, std::size_t m,
                                  std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("oracle needs m > 0");
  const Eigen::VectorXd b = dgp::true_beta(cfg);
  const bool interaction = b.size() == 5;
  stats::RngStream rng(seed, 0);
  double s1 = 0.0, s0 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double x1 = rng.normal();
    const double x2 = rng.bernoulli(0.5);
    const double base = b(0) + b(2) * x1 + b(3) * x2;
    const double treated = base + b(1) + (interaction ? b(4) * x1 : 0.0);
    // P(index + U >= 0) = F(index) for a symmetric margin.
    s1 += stats::margin_cdf(cfg.margin, treated);
    s0 += stats::margin_cdf(cfg.margin, base);
  }
  EffectEstimate e;
  e.p_y1 = s1 / static_cast<double>(m);
  e.p_y0 = s0 / static_cast<double>(m);
  e.ate = e.p_y1 - e.p_y0;
  return e;
}

}  // namespace limlsel::effects
