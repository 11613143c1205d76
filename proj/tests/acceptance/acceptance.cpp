// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Pass criterion numbers to run a subset.

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "../oracles/oracles.hpp"
#include "../support/likelihood_draws.hpp"
#include "../support/stat_tests.hpp"
#include "limlsel/est/likelihood.hpp"
#include "limlsel/mc/study.hpp"
#include "limlsel/stats/bivariate_normal.hpp"
#include "limlsel/stats/copula.hpp"

using namespace limlsel;
using model::TreatmentKind;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records one check; the criterion passes only if every check does.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

bool within(double x, double centre, double tol) { return std::abs(x - centre) <= tol; }

const mc::MethodSummary& method(const mc::StudySummary& s, mc::MethodId m) {
  for (const mc::MethodSummary& ms : s.methods) {
    if (ms.method == m) return ms;
  }
  throw std::logic_error("method missing from summary");
}

const mc::SelectionCounts& counts(const mc::StudyResult& r, mc::MethodId m, const std::string& step) {
  for (const mc::SelectionCounts& c : r.selection) {
    if (c.method == m && c.step == step) return c;
  }
  throw std::logic_error("selection row missing");
}

const mc::StudySummary& summary(const mc::StudyResult& r, mc::Estimand e) {
  for (const mc::StudySummary& s : r.summaries) {
    if (s.estimand == e) return s;
  }
  throw std::logic_error("estimand missing");
}

double pct(int k, std::size_t n) { return 100.0 * k / static_cast<double>(n); }

mc::StudyConfig scenario1(TreatmentKind kind, std::size_t n, std::size_t reps) {
  mc::StudyConfig c;
  c.scenario.treatment_kind = kind;
  c.scenario.scenario = dgp::ScenarioId::s1;
  c.scenario.n = n;
  c.reps = reps;
  return c;
}

// Continuous scenario 1, n=300, R=200; shared by criteria 3 and 4.
const mc::StudyResult& table1_study() {
  static const mc::StudyResult r = mc::run_study(scenario1(TreatmentKind::continuous, 300, 200));
  return r;
}

Outcome criterion1() {
  Outcome o;
  for (TreatmentKind kind : {TreatmentKind::continuous, TreatmentKind::dichotomous}) {
    const auto c = testing::compare_with_oracle(kind, 50, 10, 2024);
    o.check(c.draws == 50 && c.max_abs_diff <= 1e-6,
            model::to_string(kind) + " max |diff| " + fmt(c.max_abs_diff * 1e9, 3) + "e-9 over " +
                std::to_string(c.draws) + " draws");
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  double origin = 0.0;
  for (int i = -9; i <= 9; ++i) {
    const double rho = i / 10.0;
    const double exact = 0.25 + std::asin(rho) / (2.0 * M_PI);
    origin = std::max(origin, std::abs(stats::bvn_cdf(0.0, 0.0, stats::Correlation(rho)) - exact));
  }
  o.check(origin <= 1e-12, "origin max |diff| " + std::to_string(origin));
  double grid = 0.0;
  for (double h : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    for (double k : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        const double ref = oracle::bivariate_cdf_2d(h, k, rho);
        grid = std::max(grid, std::abs(stats::bvn_cdf(h, k, stats::Correlation(rho)) - ref));
      }
    }
  }
  o.check(grid <= 1e-8, "5x5x5 grid max |diff| " + std::to_string(grid));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const mc::StudyResult& r = table1_study();
  const mc::StudySummary& s = summary(r, mc::Estimand::coefficient);
  const mc::EstimateStats& lbic = method(s, mc::MethodId::liml_lbic).all;
  const double sri = method(s, mc::MethodId::two_sri).all.mean;
  const double sls = method(s, mc::MethodId::two_sls).all.mean;
  o.check(within(lbic.bias, 0.026, 0.08), "LBIC bias " + fmt(lbic.bias) + " (0.026 +- 0.08)");
  o.check(lbic.rmse <= 0.27, "LBIC RMSE " + fmt(lbic.rmse) + " (<= 0.27)");
  o.check(within(sri, 0.673, 0.08), "2SRI mean " + fmt(sri) + " (0.673 +- 0.08)");
  o.check(within(sls, 0.396, 0.07), "2SLS mean " + fmt(sls) + " (0.396 +- 0.07)");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const mc::StudyResult& r = table1_study();
  const auto& lbic = counts(r, mc::MethodId::liml_lbic, "pair");
  const auto& laic = counts(r, mc::MethodId::liml_laic, "pair");
  const auto& first = counts(r, mc::MethodId::two_sri, "1st");
  const double lbic_true = pct(lbic.true_n, lbic.reps);
  const double laic_incl = pct(laic.including_n, laic.reps);
  const double first_true = pct(first.true_n, first.reps);
  o.check(lbic_true >= 75.0, "LBIC true " + fmt(lbic_true, 1) + "% (>= 75)");
  o.check(laic_incl >= 95.0, "LAIC including " + fmt(laic_incl, 1) + "% (>= 95)");
  o.check(within(first_true, 87.2, 7.0), "2SRI stage-1 true " + fmt(first_true, 1) + "% (87.2 +- 7)");
  return o;
}

Outcome criterion5() {
  Outcome o;
  auto rates = [](std::size_t n) {
    mc::StudyConfig c = scenario1(TreatmentKind::continuous, n, 200);
    c.methods = {mc::MethodId::liml_laic, mc::MethodId::liml_lbic};
    const mc::StudyResult r = mc::run_study(c);
    const auto& lbic = counts(r, mc::MethodId::liml_lbic, "pair");
    const auto& laic = counts(r, mc::MethodId::liml_laic, "pair");
    return std::pair{pct(lbic.true_n, lbic.reps), pct(laic.true_n, laic.reps)};
  };
  const auto [lbic100, laic100] = rates(100);
  const auto [lbic1000, laic1000] = rates(1000);
  o.check(lbic1000 - lbic100 >= 10.0,
          "LBIC true " + fmt(lbic100, 1) + "% -> " + fmt(lbic1000, 1) + "% (gain >= 10 pp)");
  o.check(laic1000 <= 90.0, "LAIC true at n=1000 " + fmt(laic1000, 1) + "% (<= 90; " +
                                fmt(laic100, 1) + "% at n=100)");
  return o;
}

Outcome criterion6() {
  Outcome o;
  dgp::ScenarioConfig cfg;
  cfg.n = 500;
  cfg.seed = 606;
  const auto [cat_t, cat_o] = model::catalog_continuous();
  std::vector<double> lr;
  int failed = 0;
  for (std::size_t rep = 0; rep < 500; ++rep) {
    stats::RngStream rng(cfg.seed, rep);
    const model::Dataset d = dgp::generate(cfg, rng);
    const est::FitResult small = est::fit_liml(d, cat_t.at("a4"), cat_o.at("b2"));
    const est::FitResult big = est::fit_liml(d, cat_t.at("a4"), cat_o.at("b3"));
    if (!small.converged || !big.converged) {
      ++failed;
      continue;
    }
    lr.push_back(std::max(0.0, est::lr_statistic(small, big)));
  }
  const boost::math::chi_squared chi1(1.0);
  const double p = testing::ks_pvalue(lr, [&](double x) { return boost::math::cdf(chi1, x); });
  o.check(failed == 0, std::to_string(lr.size()) + " LR statistics, " + std::to_string(failed) +
                           " nonconverged");
  o.check(p > 0.01, "mean LR " + fmt(testing::mean(lr), 3) + ", KS p-value vs chi2(1) " +
                        fmt(p, 3) + " (> 0.01)");
  return o;
}

// LIMLE-LBIC biases of p_y1 and ate for a dichotomous scenario-1 study.
std::pair<double, double> dichotomous_lbic_bias(stats::CopulaFamily copula, stats::Margin margin) {
  mc::StudyConfig c = scenario1(TreatmentKind::dichotomous, 300, 200);
  c.scenario.copula = copula;
  c.scenario.margin = margin;
  c.methods = {mc::MethodId::liml_lbic};
  const mc::StudyResult r = mc::run_study(c);
  return {method(summary(r, mc::Estimand::p_y1), mc::MethodId::liml_lbic).all.bias,
          method(summary(r, mc::Estimand::ate), mc::MethodId::liml_lbic).all.bias};
}

Outcome criterion7() {
  Outcome o;
  const auto [p_bias, ate_bias] =
      dichotomous_lbic_bias(stats::CopulaFamily::gaussian, stats::Margin::normal);
  o.check(within(p_bias, 0.004, 0.03), "p_y1 bias " + fmt(p_bias) + " (0.004 +- 0.03)");
  o.check(within(ate_bias, 0.003, 0.05), "ate bias " + fmt(ate_bias) + " (0.003 +- 0.05)");
  return o;
}

Outcome criterion8() {
  Outcome o;
  struct Target {
    stats::CopulaFamily family;
    double ate, p_y1;
  };
  for (const Target& t : {Target{stats::CopulaFamily::student_t, 0.001, -0.031},
                          Target{stats::CopulaFamily::clayton, -0.018, -0.034}}) {
    const auto [p_bias, ate_bias] = dichotomous_lbic_bias(t.family, stats::Margin::logistic);
    const std::string name = stats::to_string(t.family);
    o.check(within(ate_bias, t.ate, 0.05),
            name + " ate bias " + fmt(ate_bias) + " (" + fmt(t.ate, 3) + " +- 0.05)");
    o.check(within(p_bias, t.p_y1, 0.03),
            name + " p_y1 bias " + fmt(p_bias) + " (" + fmt(t.p_y1, 3) + " +- 0.03)");
  }
  return o;
}

Outcome criterion9() {
  Outcome o;

  // Determinism of the generator and of whole replications.
  {
    dgp::ScenarioConfig cfg;
    cfg.treatment_kind = TreatmentKind::dichotomous;
    cfg.copula = stats::CopulaFamily::clayton;
    cfg.margin = stats::Margin::logistic;
    stats::RngStream a(5, 3), b(5, 3);
    const model::Dataset da = dgp::generate(cfg, a), db = dgp::generate(cfg, b);
    const bool same_data = da.y == db.y && da.w == db.w && da.x1 == db.x1 && da.z == db.z;
    mc::StudyConfig sc = scenario1(TreatmentKind::continuous, 150, 4);
    sc.oracle_draws = 20000;
    std::ostringstream r1, r2;
    mc::write_records_csv(r1, mc::run_replication(sc, 1));
    mc::write_records_csv(r2, mc::run_replication(sc, 1));
    sc.parallelism = 1;
    std::ostringstream s1, s2;
    mc::write_records_csv(s1, mc::run_study(sc).records);
    sc.parallelism = 3;
    mc::write_records_csv(s2, mc::run_study(sc).records);
    o.check(same_data && r1.str() == r2.str() && s1.str() == s2.str(), "determinism");
  }

  // The four dichotomous cell probabilities sum to one.
  {
    const auto [cat_t, cat_o] = model::catalog_continuous();
    stats::RngStream rng(77, 0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      model::Dataset row = testing::random_rows(TreatmentKind::dichotomous, 1, rng);
      const est::Theta t = testing::random_theta(TreatmentKind::dichotomous, rng);
      double total = 0.0;
      for (double y : {0.0, 1.0}) {
        for (double w : {0.0, 1.0}) {
          row.y[0] = y;
          row.w[0] = w;
          total += std::exp(est::loglik_dichotomous(t, row, cat_t.at("a4"), cat_o.at("b2")));
        }
      }
      worst = std::max(worst, std::abs(total - 1.0));
    }
    o.check(worst <= 1e-10, "cell probabilities sum to 1 (max |diff| " + std::to_string(worst) + ")");
  }

  // Nesting classification against the true formulas.
  {
    using select::Classification;
    const auto [cat_t, cat_o] = model::catalog_continuous();
    const model::CandidateCatalog dich = model::catalog_dichotomous();
    const bool ok =
        select::classify_stage("a4", cat_t) == Classification::true_model &&
        select::classify_stage("a7", cat_t) == Classification::including_true &&
        select::classify_stage("a5", cat_t) == Classification::misspecified &&
        select::classify_stage("a1", cat_t) == Classification::misspecified &&
        select::classify_stage("b2", cat_o) == Classification::true_model &&
        select::classify_stage("b5", cat_o) == Classification::including_true &&
        select::classify_stage("b1", cat_o) == Classification::misspecified &&
        select::classify_stage("b5", dich) == Classification::true_model &&
        select::classify_stage("b7", dich) == Classification::including_true &&
        select::classify("a7", "b2", cat_t, cat_o) == Classification::including_true &&
        select::classify("a4", "b1", cat_t, cat_o) == Classification::misspecified;
    o.check(ok, "nesting classification");
  }

  // Copula draws have uniform margins.
  {
    bool ok = true;
    for (const stats::CopulaSpec& spec :
         {stats::CopulaSpec::gaussian(0.6), stats::CopulaSpec::student_t(0.6),
          stats::CopulaSpec::clayton(2.0)}) {
      stats::RngStream rng(31, 0);
      std::vector<double> u1, u2;
      for (int i = 0; i < 20000; ++i) {
        const auto [a, b] = stats::sample_copula_pair(spec, rng);
        u1.push_back(a);
        u2.push_back(b);
      }
      ok = ok && testing::ks_uniform_passes(u1, 0.01) && testing::ks_uniform_passes(u2, 0.01);
    }
    o.check(ok, "copula margin uniformity");
  }

  // Calibrated parameters reproduce the target on an independent stream.
  {
    double worst = 0.0;
    for (stats::CopulaFamily f : {stats::CopulaFamily::gaussian, stats::CopulaFamily::student_t,
                                  stats::CopulaFamily::clayton}) {
      for (stats::Margin m : {stats::Margin::normal, stats::Margin::logistic}) {
        for (double target : {0.3, 0.6}) {
          stats::CalibrationOptions opts;
          opts.pairs = 100000;
          const stats::Calibration c = stats::calibrate_copula_param(f, target, m, opts);
          const double fresh = stats::latent_correlation(c.spec, m, 100000, 4242);
          worst = std::max({worst, std::abs(c.achieved_correlation - target),
                            std::abs(fresh - target)});
        }
      }
    }
    o.check(worst <= 0.01, "calibration max |corr - target| " + fmt(worst));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << o.detail.str() << "  (" << fmt(secs, 1) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
