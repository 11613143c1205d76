#pragma once

#include <cstddef>
#include <cstdint>

#include "limlsel/dgp/scenario.hpp"
#include "limlsel/est/fit.hpp"
#include "limlsel/model/dataset.hpp"

namespace limlsel::effects {

struct EffectEstimate {
  double p_y1 = 0.0;
  double p_y0 = 0.0;
  double ate = 0.0;  // p_y1 - p_y0
};

// Average over the rows of Phi(outcome index) with w set to 1 and to 0 in
// every term that uses it. 2SRI fits add the residual term per row;
// least-squares 2SLS fits average the linear index instead.
// Throws std::invalid_argument when the outcome formula lacks w.
EffectEstimate plug_in_effect(const est::FitResult& fit, const model::Dataset& data);

inline constexpr std::uint64_t kOracleSeed = 0x5eed0fc0ffeeULL;
inline constexpr std::size_t kOracleDraws = 1'000'000;

// Population p_y1, p_y0 under the scenario's true outcome model. Covariates
// are simulated; the latent U is integrated out through its margin CDF.
EffectEstimate true_effect_oracle(const dgp::ScenarioConfig& cfg, std::size_t m = kOracleDraws,
                                  std::uint64_t seed = kOracleSeed);

}  // namespace limlsel::effects
