#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles/oracles.hpp"
#include "../support/stat_tests.hpp"
#include "limlsel/dgp/scenario.hpp"

using namespace limlsel;
using dgp::ScenarioConfig;
using dgp::ScenarioId;
using model::TreatmentKind;

namespace {

model::Dataset draw(const ScenarioConfig& cfg, std::uint64_t stream = 0) {
  stats::RngStream rng(cfg.seed, stream);
  return dgp::generate(cfg, rng);
}

ScenarioConfig config(TreatmentKind kind, ScenarioId id, std::size_t n) {
  ScenarioConfig cfg;
  cfg.treatment_kind = kind;
  cfg.scenario = id;
  cfg.n = n;
  return cfg;
}

// corr(W, Z) for the continuous design: W = a0 + az z + x2 + x3 + V with
// z, x2 ~ Ber(1/2) and x3, V ~ N(0, 1).
double continuous_wz(double az) {
  const double var_w = az * az * 0.25 + 0.25 + 2.0;
  return az * 0.25 / (0.5 * std::sqrt(var_w));
}

// corr(W, Z) for the dichotomous design, where x3 + V ~ N(0, 2).
double dichotomous_wz(double a0, double az) {
  double pw[2] = {0, 0};
  for (int z = 0; z < 2; ++z) {
    for (int x2 = 0; x2 < 2; ++x2) {
      pw[z] += 0.5 * oracle::normal_cdf_series((a0 + az * z + x2) / std::sqrt(2.0));
    }
  }
  const double p = 0.5 * (pw[0] + pw[1]);
  const double cov = 0.5 * pw[1] - 0.5 * p;
  return cov / (0.5 * std::sqrt(p * (1 - p)));
}

// corr(Y, W) for dichotomous s1 with Gaussian latents of correlation rho:
// (x3 + V) / sqrt(2) and U are standard bivariate normal with correlation
// rho / sqrt(2); the x1 average is a 1-D quadrature.
double dichotomous_yw(double rho) {
  const double r = rho / std::sqrt(2.0);
  double ew = 0, ey = 0, ewy = 0;
  for (int z = 0; z < 2; ++z) {
    for (int x2 = 0; x2 < 2; ++x2) {
      const double c1 = (-0.2 + 1.2 * z + x2) / std::sqrt(2.0);
      auto joint = [&](double x1) {
        const double c2 = -0.2 + 1.5 + 0.5 * x1 + 0.5 * x2 - x1;
        return oracle::normal_density(x1) * oracle::bivariate_cdf(c1, c2, r);
      };
      auto untreated = [&](double x1) {
        const double c2 = -0.2 + 0.5 * x1 + 0.5 * x2;
        // P(W = 0, Y = 1) = Phi(c2) - P(W = 1, Y = 1 at the untreated index).
        return oracle::normal_density(x1) *
               (oracle::normal_cdf_series(c2) - oracle::bivariate_cdf(c1, c2, r));
      };
      const double p11 = oracle::integrate(joint, -12, 12, 1e-12);
      const double p01 = oracle::integrate(untreated, -12, 12, 1e-12);
      ew += 0.25 * oracle::normal_cdf_series(c1);
      ewy += 0.25 * p11;
      ey += 0.25 * (p11 + p01);
    }
  }
  return (ewy - ew * ey) / std::sqrt(ew * (1 - ew) * ey * (1 - ey));
}

}  // namespace

TEST_CASE("scenario factors") {
  const ScenarioConfig s1 = config(TreatmentKind::continuous, ScenarioId::s1, 10);
  CHECK(s1.corr_level() == dgp::Level::weak);
  CHECK(s1.iv_strength() == dgp::Level::strong);
  CHECK(s1.effect_size() == dgp::Level::strong);
  CHECK(config(TreatmentKind::continuous, ScenarioId::s2, 10).iv_strength() == dgp::Level::weak);
  CHECK(config(TreatmentKind::continuous, ScenarioId::s3, 10).target_correlation() == 0.6);
  CHECK(dgp::true_treatment_coefficient(config(TreatmentKind::continuous, ScenarioId::s4, 10)) ==
        0.2);
  CHECK(dgp::true_beta(config(TreatmentKind::dichotomous, ScenarioId::s1, 10)).size() == 5);
  CHECK(dgp::parse_scenario("3") == ScenarioId::s3);
  CHECK_THROWS_AS(dgp::parse_scenario("s5"), std::invalid_argument);
  ScenarioConfig bad = s1;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(s1.describe().find("strong IV") != std::string::npos);
}

TEST_CASE("continuous design moments") {
  for (ScenarioId id : {ScenarioId::s1, ScenarioId::s2}) {
    const ScenarioConfig cfg = config(TreatmentKind::continuous, id, 100000);
    const model::Dataset d = draw(cfg);
    const double az = dgp::true_alpha(cfg)(1);
    CAPTURE(dgp::to_string(id));
    CHECK(std::abs(testing::pearson(d.w, d.z) - continuous_wz(az)) <= 0.015);
    CHECK(std::abs(testing::pearson(d.v, d.u) - 0.3) <= 0.015);
    const double bound = 3.0 / std::sqrt(100000.0);
    for (const auto* c : {&d.x1, &d.x2, &d.x3}) {
      CHECK(std::abs(testing::pearson(*c, d.z)) <= bound);
      CHECK(std::abs(testing::pearson(*c, d.v)) <= bound);
      CHECK(std::abs(testing::pearson(*c, d.u)) <= bound);
    }
    CHECK(std::abs(testing::pearson(d.z, d.v)) <= bound);
    CHECK(std::abs(testing::mean(d.x2) - 0.5) <= bound);
    CHECK(std::abs(testing::mean(d.z) - 0.5) <= bound);
  }
  const model::Dataset strong = draw(config(TreatmentKind::continuous, ScenarioId::s3, 100000));
  CHECK(std::abs(testing::pearson(strong.v, strong.u) - 0.6) <= 0.015);
}

TEST_CASE("dichotomous design moments") {
  const ScenarioConfig cfg = config(TreatmentKind::dichotomous, ScenarioId::s1, 100000);
  const model::Dataset d = draw(cfg);
  for (double w : d.w) REQUIRE((w == 0.0 || w == 1.0));
  CHECK(std::abs(testing::pearson(d.w, d.z) - dichotomous_wz(-0.2, 1.2)) <= 0.015);
  const double yw = dichotomous_yw(0.3);
  CAPTURE(yw);
  CHECK(std::abs(testing::pearson(d.y, d.w) - yw) <= 0.015);

  const ScenarioConfig weak = config(TreatmentKind::dichotomous, ScenarioId::s2, 100000);
  const model::Dataset dw = draw(weak);
  CHECK(std::abs(testing::pearson(dw.w, dw.z) - dichotomous_wz(0.05, 0.6)) <= 0.015);
}

TEST_CASE("latent margins") {
  for (stats::Margin margin : {stats::Margin::normal, stats::Margin::logistic}) {
    for (stats::CopulaFamily family : {stats::CopulaFamily::gaussian, stats::CopulaFamily::clayton}) {
      ScenarioConfig cfg = config(TreatmentKind::continuous, ScenarioId::s1, 20000);
      cfg.margin = margin;
      cfg.copula = family;
      const model::Dataset d = draw(cfg);
      auto cdf = [&](double x) {
        return margin == stats::Margin::normal ? oracle::normal_cdf_series(x)
                                               : 1.0 / (1.0 + std::exp(-x));
      };
      CAPTURE(stats::to_string(margin));
      CAPTURE(stats::to_string(family));
      CHECK(testing::ks_pvalue(d.v, cdf) > 0.001);
      CHECK(testing::ks_pvalue(d.u, cdf) > 0.001);
      CHECK(std::abs(testing::pearson(d.v, d.u) - 0.3) <= 0.03);
    }
  }
}

TEST_CASE("clayton at the strong level") {
  ScenarioConfig cfg = config(TreatmentKind::dichotomous, ScenarioId::s3, 100000);
  cfg.copula = stats::CopulaFamily::clayton;
  const model::Dataset d = draw(cfg);
  CHECK(std::abs(testing::pearson(d.v, d.u) - 0.6) <= 0.02);
}

TEST_CASE("generation is deterministic and rederivable") {
  for (TreatmentKind kind : {TreatmentKind::continuous, TreatmentKind::dichotomous}) {
    ScenarioConfig cfg = config(kind, ScenarioId::s1, 500);
    cfg.seed = 77;
    const model::Dataset a = draw(cfg, 3);
    const model::Dataset b = draw(cfg, 3);
    const model::Dataset c = draw(cfg, 4);
    CHECK(a.w == b.w);
    CHECK(a.y == b.y);
    CHECK(a.u == b.u);
    CHECK(a.w != c.w);
    const model::Dataset r = dgp::rederive_outcomes(cfg, a);
    CHECK(r.w == a.w);
    CHECK(r.y == a.y);
  }
  model::Dataset no_latents = draw(config(TreatmentKind::continuous, ScenarioId::s1, 5));
  no_latents.v.clear();
  no_latents.u.clear();
  CHECK_THROWS_AS(dgp::rederive_outcomes(ScenarioConfig{}, no_latents), std::invalid_argument);
  ScenarioConfig wrong = config(TreatmentKind::dichotomous, ScenarioId::s1, 5);
  stats::RngStream rng(1, 1);
  CHECK_THROWS_AS(dgp::gen_continuous(wrong, rng), std::invalid_argument);
}

TEST_CASE("outcomes follow the structural equations") {
  const ScenarioConfig cfg = config(TreatmentKind::dichotomous, ScenarioId::s4, 200);
  const model::Dataset d = draw(cfg);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = (-0.2 + 1.2 * d.z[i] + d.x2[i] + d.x3[i] + d.v[i]) >= 0 ? 1.0 : 0.0;
    const double y =
        (-0.2 + 0.5 * w + 0.5 * d.x1[i] + 0.5 * d.x2[i] - w * d.x1[i] + d.u[i]) >= 0 ? 1.0 : 0.0;
    CHECK(d.w[i] == w);
    CHECK(d.y[i] == y);
  }
}
