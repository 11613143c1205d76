#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "limlsel/dgp/scenario.hpp"
#include "limlsel/select/selection.hpp"

using namespace limlsel;
using select::Classification;
using select::Criterion;

namespace {

model::Dataset simulate(model::TreatmentKind kind, std::size_t n, std::uint64_t seed) {
  dgp::ScenarioConfig cfg;
  cfg.treatment_kind = kind;
  cfg.n = n;
  stats::RngStream rng(seed, 0);
  return dgp::generate(cfg, rng);
}

const auto kCont = model::catalog_continuous();

}  // namespace

TEST_CASE("criterion arithmetic") {
  CHECK(select::criterion_value(Criterion::laic, -100, 5, 100) == 210.0);
  CHECK(select::criterion_value(Criterion::aic, -100, 5, 100) == 210.0);
  CHECK(std::abs(select::criterion_value(Criterion::lbic, -100, 5, 100) - 223.0258509299) <= 1e-9);
  const double d = select::criterion_value(Criterion::lbic, -150, 6, 300) -
                   select::criterion_value(Criterion::lbic, -150, 5, 300);
  CHECK(std::abs(d - 5.7037824747) <= 1e-9);
  CHECK_THROWS_AS(select::criterion_value(Criterion::lbic, NAN, 5, 100), std::invalid_argument);
  CHECK_THROWS_AS(select::criterion_value(Criterion::lbic, -1, 5, 0), std::invalid_argument);
  est::FitResult f;
  f.loglik = -10;
  f.n_params = 3;
  const select::CriterionValue cv = select::criterion(f, Criterion::laic, 50);
  CHECK(cv.value == 26.0);
  CHECK(cv.n_params == 3);
  CHECK(cv.n_obs == 50);
  CHECK(select::parse_criterion("lbic") == Criterion::lbic);
  CHECK_THROWS_AS(select::parse_criterion("bic"), std::invalid_argument);
}

TEST_CASE("classification") {
  const auto& [t, o] = kCont;
  CHECK(select::classify("a4", "b2", t, o) == Classification::true_model);
  CHECK(select::classify("a7", "b5", t, o) == Classification::including_true);
  CHECK(select::classify("a1", "b2", t, o) == Classification::misspecified);
  CHECK(select::classify("a4", "b1", t, o) == Classification::misspecified);
  CHECK(select::classify_stage("a5", t) == Classification::misspecified);
  CHECK(select::classify_stage("b3", o) == Classification::including_true);
  CHECK_THROWS_AS(select::classify("a9", "b2", t, o), std::invalid_argument);
  // Classification against a restricted catalog still knows the true model.
  const model::CandidateCatalog r = t.restricted({"a1", "a7"});
  CHECK(select::classify_stage("a7", r) == Classification::including_true);
  CHECK(select::classify_stage("a1", r) == Classification::misspecified);
  const model::CandidateCatalog dich = model::catalog_dichotomous();
  CHECK(select::classify("a4", "b5", model::catalog_dichotomous_treatment(), dich) ==
        Classification::true_model);
}

TEST_CASE("LBIC picks the true pair at n = 5000") {
  const model::Dataset d = simulate(model::TreatmentKind::continuous, 5000, 3);
  const select::SelectionResult r = select::select_liml(d, kCont.first, kCont.second, Criterion::lbic);
  CHECK(r.chosen_treatment == "a4");
  CHECK(r.chosen_outcome == "b2");
  CHECK(r.classification == Classification::true_model);
  CHECK(r.table.size() == 35);
  CHECK(r.excluded == 0);
  CHECK(r.fit.treatment_label == "a4");
  // The chosen row is the minimum over the converged rows.
  for (const auto& row : r.table) {
    if (row.converged) CHECK(row.value >= r.table[3 * 5 + 1].value);
  }
}

TEST_CASE("selection invariants") {
  const model::Dataset d = simulate(model::TreatmentKind::continuous, 300, 4);
  const select::SelectionResult laic =
      select::select_liml(d, kCont.first, kCont.second, Criterion::laic);
  const select::SelectionResult lbic =
      select::select_liml(d, kCont.first, kCont.second, Criterion::lbic);

  // Rows with equal parameter counts rank the same under both criteria.
  for (std::size_t i = 0; i < laic.table.size(); ++i) {
    for (std::size_t j = 0; j < laic.table.size(); ++j) {
      const auto& a = laic.table[i];
      const auto& b = laic.table[j];
      if (a.n_params != b.n_params || !a.converged || !b.converged) continue;
      CHECK((a.value < b.value) == (lbic.table[i].value < lbic.table[j].value));
    }
  }

  // Parallel fits give the same table and choice.
  select::SelectOptions par;
  par.parallelism = 3;
  const select::SelectionResult p =
      select::select_liml(d, kCont.first, kCont.second, Criterion::lbic, par);
  CHECK(p.chosen_treatment == lbic.chosen_treatment);
  CHECK(p.chosen_outcome == lbic.chosen_outcome);
  for (std::size_t i = 0; i < p.table.size(); ++i) CHECK(p.table[i].loglik == lbic.table[i].loglik);

  // A duplicated candidate does not move the choice.
  model::CandidateCatalog dup = kCont.first;
  dup.candidates.push_back(dup.at(lbic.chosen_treatment));
  dup.candidates.insert(dup.candidates.begin(), dup.at("a7"));
  const select::SelectionResult r = select::select_liml(d, dup, kCont.second, Criterion::lbic);
  CHECK(r.chosen_treatment == lbic.chosen_treatment);
  CHECK(r.chosen_outcome == lbic.chosen_outcome);

  // Singleton catalogs return that pair.
  const select::SelectionResult s = select::select_liml(
      d, kCont.first.restricted({"a2"}), kCont.second.restricted({"b4"}), Criterion::laic);
  CHECK(s.chosen_treatment == "a2");
  CHECK(s.chosen_outcome == "b4");
  CHECK(s.classification == Classification::misspecified);
  const select::SelectionResult s2 =
      select::select_2sri(d, kCont.first.restricted({"a7"}), kCont.second.restricted({"b3"}));
  CHECK(s2.chosen_treatment == "a7");
  CHECK(s2.chosen_outcome == "b3");
  CHECK(s2.classification == Classification::including_true);
}

TEST_CASE("all fits failing raises SelectionError") {
  model::Dataset d = simulate(model::TreatmentKind::continuous, 100, 5);
  std::fill(d.y.begin(), d.y.end(), 0.0);
  CHECK_THROWS_AS(select::select_liml(d, kCont.first.restricted({"a4"}),
                                      kCont.second.restricted({"b1", "b2"}), Criterion::lbic),
                  select::SelectionError);
  CHECK_THROWS_AS(select::select_liml(d, model::CandidateCatalog{}, kCont.second, Criterion::lbic),
                  std::invalid_argument);
}

TEST_CASE("2SRI sequential selection") {
  const model::Dataset d = simulate(model::TreatmentKind::continuous, 5000, 6);
  const select::SelectionResult r = select::select_2sri(d, kCont.first, kCont.second);
  CHECK(r.chosen_treatment == "a4");
  CHECK(r.treatment_class == Classification::true_model);
  CHECK(r.outcome_class != Classification::misspecified);
  CHECK(r.table.size() == 7 + 5);
  CHECK(r.fit.method == est::Method::two_sri);
  // Stage-1 rows carry the profile Gaussian AIC.
  const est::Stage1Fit s = est::fit_stage1(d, kCont.first.at("a4"));
  CHECK(r.table[3].value == select::criterion_value(Criterion::aic, s.loglik, s.n_params, 5000));
  // Stage-2 parameters count the residual coefficient.
  CHECK(r.table[7 + 1].n_params == 5);
}

TEST_CASE("dichotomous outcome selection") {
  const model::Dataset d = simulate(model::TreatmentKind::dichotomous, 3000, 7);
  const select::SelectionResult r = select::select_liml(
      d, model::catalog_dichotomous_treatment(), model::catalog_dichotomous(), Criterion::lbic);
  CHECK(r.table.size() == 7);
  CHECK(r.chosen_treatment == "a4");
  CHECK(r.chosen_outcome == "b5");
}
