#include "limlsel/dgp/scenario.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace limlsel::dgp {

using model::Dataset;
using model::TreatmentKind;

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::s1: return "s1";
    case ScenarioId::s2: return "s2";
    case ScenarioId::s3: return "s3";
    case ScenarioId::s4: return "s4";
  }
  return "?";
}

ScenarioId parse_scenario(const std::string& name) {
  if (name == "s1" || name == "1") return ScenarioId::s1;
  if (name == "s2" || name == "2") return ScenarioId::s2;
  if (name == "s3" || name == "3") return ScenarioId::s3;
  if (name == "s4" || name == "4") return ScenarioId::s4;
  throw std::invalid_argument("unknown scenario '" + name + "' (expected s1, s2, s3 or s4)");
}

std::string to_string(Level level) { return level == Level::weak ? "weak" : "strong"; }

Level ScenarioConfig::corr_level() const {
  return scenario == ScenarioId::s3 ? Level::strong : Level::weak;
}

Level ScenarioConfig::iv_strength() const {
  return scenario == ScenarioId::s2 ? Level::weak : Level::strong;
}

Level ScenarioConfig::effect_size() const {
  return scenario == ScenarioId::s4 ? Level::weak : Level::strong;
}

double ScenarioConfig::target_correlation() const {
  return corr_level() == Level::strong ? 0.6 : 0.3;
}

void ScenarioConfig::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (copula == stats::CopulaFamily::student_t && t_df < 1) {
    throw std::invalid_argument("t_df must be >= 1");
  }
}

std::string ScenarioConfig::describe() const {
  return model::to_string(treatment_kind) + " " + to_string(scenario) + " (" +
         to_string(corr_level()) + " correlation, " + to_string(iv_strength()) + " IV, " +
         to_string(effect_size()) + " treatment), " + stats::to_string(copula) + " copula, " +
         stats::to_string(margin) + " margins, n=" + std::to_string(n);
}

Eigen::VectorXd true_alpha(const ScenarioConfig& cfg) {
  const bool strong = cfg.iv_strength() == Level::strong;
  Eigen::VectorXd a(4);
  if (cfg.treatment_kind == TreatmentKind::continuous) {
    a << 1.0, strong ? 1.0 : 0.5, 1.0, 1.0;
  } else {
    a << (strong ? -0.2 : 0.05), (strong ? 1.2 : 0.6), 1.0, 1.0;
  }
  return a;
}

double true_treatment_coefficient(const ScenarioConfig& cfg) {
  const bool strong = cfg.effect_size() == Level::strong;
  if (cfg.treatment_kind == TreatmentKind::continuous) return strong ? 0.6 : 0.2;
  return strong ? 1.5 : 0.5;
}

Eigen::VectorXd true_beta(const ScenarioConfig& cfg) {
  const double bw = true_treatment_coefficient(cfg);
  if (cfg.treatment_kind == TreatmentKind::continuous) {
    Eigen::VectorXd b(4);
    b << 0.5, bw, 0.5, 0.5;
    return b;
  }
  Eigen::VectorXd b(5);
  b << -0.2, bw, 0.5, 0.5, -1.0;
  return b;
}

stats::CopulaSpec confounder_copula(const ScenarioConfig& cfg) {
  const double target = cfg.target_correlation();
  if (cfg.copula == stats::CopulaFamily::gaussian && cfg.margin == stats::Margin::normal) {
    return stats::CopulaSpec::gaussian(target);
  }
  using Key = std::tuple<int, double, int, int>;
  static std::mutex mutex;
  static std::map<Key, stats::CopulaSpec> cache;
  const Key key{static_cast<int>(cfg.copula), target, static_cast<int>(cfg.margin), cfg.t_df};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  stats::CalibrationOptions opts;
  opts.df = cfg.t_df;
  const stats::CopulaSpec spec =
      stats::calibrate_copula_param(cfg.copula, target, cfg.margin, opts).spec;
  std::lock_guard lock(mutex);
  cache.emplace(key, spec);
  return spec;
}

namespace {

// Covariates, instrument and latents; the draw order per row is fixed.
Dataset draw_inputs(const ScenarioConfig& cfg, stats::RngStream& rng) {
  cfg.validate();
  const stats::CopulaSpec spec = confounder_copula(cfg);
  Dataset d;
  d.kind = cfg.treatment_kind;
  const std::size_t n = cfg.n;
  for (auto* col : {&d.y, &d.w, &d.x1, &d.x2, &d.x3, &d.z, &d.v, &d.u}) col->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.x1[i] = rng.normal();
    d.x2[i] = rng.bernoulli(0.5);
    d.x3[i] = rng.normal();
    d.z[i] = rng.bernoulli(0.5);
    const auto [v, u] = stats::sample_latent_pair(spec, cfg.margin, rng);
    d.v[i] = v;
    d.u[i] = u;
  }
  return d;
}

void fill_outcomes(const ScenarioConfig& cfg, Dataset& d) {
  const Eigen::VectorXd a = true_alpha(cfg);
  const Eigen::VectorXd b = true_beta(cfg);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double index_w = a(0) + a(1) * d.z[i] + a(2) * d.x2[i] + a(3) * d.x3[i] + d.v[i];
    if (cfg.treatment_kind == TreatmentKind::continuous) {
      d.w[i] = index_w;
      d.y[i] = (b(0) + b(1) * d.w[i] + b(2) * d.x1[i] + b(3) * d.x2[i] + d.u[i] >= 0.0) ? 1.0 : 0.0;
    } else {
      d.w[i] = index_w >= 0.0 ? 1.0 : 0.0;
      d.y[i] = (b(0) + b(1) * d.w[i] + b(2) * d.x1[i] + b(3) * d.x2[i] +
                    b(4) * d.w[i] * d.x1[i] + d.u[i] >=
                0.0)
                   ? 1.0
                   : 0.0;
    }
  }
}

}  // namespace

Dataset gen_continuous(const ScenarioConfig& cfg, stats::RngStream& rng) {
  if (cfg.treatment_kind != TreatmentKind::continuous) {
    throw std::invalid_argument("gen_continuous needs a continuous-treatment scenario");
  }
  Dataset d = draw_inputs(cfg, rng);
  fill_outcomes(cfg, d);
  return d;
}

Dataset gen_dichotomous(const ScenarioConfig& cfg, stats::RngStream& rng) {
  if (cfg.treatment_kind != TreatmentKind::dichotomous) {
    throw std::invalid_argument("gen_dichotomous needs a dichotomous-treatment scenario");
  }
  Dataset d = draw_inputs(cfg, rng);
  fill_outcomes(cfg, d);
  return d;
}

Dataset generate(const ScenarioConfig& cfg, stats::RngStream& rng) {
  return cfg.treatment_kind == TreatmentKind::continuous ? gen_continuous(cfg, rng)
                                                         : gen_dichotomous(cfg, rng);
}

Dataset rederive_outcomes(const ScenarioConfig& cfg, const Dataset& data) {
  if (!data.has_latents()) throw std::invalid_argument("dataset has no latent columns");
  Dataset d = data;
  fill_outcomes(cfg, d);
  return d;
}

}  // namespace limlsel::dgp
