#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "limlsel/est/fit.hpp"
#include "limlsel/model/dataset.hpp"
#include "limlsel/model/formula.hpp"

namespace limlsel::select {

enum class Criterion { laic, lbic, aic };

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& name);

struct CriterionValue {
  Criterion criterion = Criterion::lbic;
  double value = 0.0;
  int n_params = 0;
  std::size_t n_obs = 0;
};

// -2 loglik + 2k for laic and aic, -2 loglik + k ln n for lbic.
// Throws std::invalid_argument on a non-finite loglik or n_obs == 0.
double criterion_value(Criterion c, double loglik, int n_params, std::size_t n_obs);
CriterionValue criterion(const est::FitResult& fit, Criterion c, std::size_t n_obs);

enum class Classification { true_model, including_true, misspecified };

std::string to_string(Classification c);

// One stage: equal to the true label, nesting the true formula, or neither.
// Throws std::invalid_argument on an unknown label.
Classification classify_stage(const std::string& label, const model::CandidateCatalog& cat);
// Both stages: true_model iff both labels are true, including_true iff both
// chosen formulas nest their true formulas.
Classification classify(const std::string& treatment_label, const std::string& outcome_label,
                        const model::CandidateCatalog& cat_t,
                        const model::CandidateCatalog& cat_o);

class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CandidateRow {
  // For two-step selection, stage-1 rows leave outcome_label empty.
  std::string treatment_label;
  std::string outcome_label;
  double loglik = 0.0;
  int n_params = 0;
  double value = 0.0;
  bool converged = false;
  std::string note;
};

struct SelectionResult {
  est::Method method = est::Method::liml;
  Criterion criterion = Criterion::lbic;
  std::size_t n_obs = 0;
  std::string chosen_treatment;
  std::string chosen_outcome;
  std::vector<CandidateRow> table;
  Classification classification = Classification::misspecified;
  Classification treatment_class = Classification::misspecified;
  Classification outcome_class = Classification::misspecified;
  // Candidates dropped because the fit failed.
  int excluded = 0;
  est::FitResult fit;
};

struct SelectOptions {
  est::XiMode xi_mode = est::XiMode::estimated;
  est::LimlOptions liml;
  // Worker threads for the candidate fits; the result does not depend on it.
  unsigned parallelism = 1;
};

// LIML fits of every treatment/outcome pair, in treatment-major order. Rows
// hold loglik and parameter counts; their criterion values are left unset.
struct LimlCandidates {
  std::size_t n_obs = 0;
  std::vector<CandidateRow> rows;
  std::vector<est::FitResult> fits;

  // Throws std::invalid_argument on an unknown pair.
  const est::FitResult& fit(const std::string& treatment_label,
                            const std::string& outcome_label) const;
};

LimlCandidates fit_liml_candidates(const model::Dataset& data,
                                   const model::CandidateCatalog& cat_t,
                                   const model::CandidateCatalog& cat_o,
                                   const SelectOptions& opts = {});

// Applies a criterion to precomputed candidate fits.
SelectionResult choose_liml(const LimlCandidates& fits, const model::CandidateCatalog& cat_t,
                            const model::CandidateCatalog& cat_o, Criterion c);

// Fits every treatment/outcome pair by LIML and returns the criterion
// minimizer among converged fits. Ties go to fewer parameters, then to the
// lexicographically smaller (treatment, outcome) labels, then to catalog
// order. Throws SelectionError when no fit converged.
SelectionResult select_liml(const model::Dataset& data, const model::CandidateCatalog& cat_t,
                            const model::CandidateCatalog& cat_o, Criterion c,
                            const SelectOptions& opts = {});

// Stage 1 picks the treatment model by AIC; stage 2 keeps those residuals
// and picks the outcome model by the AIC of the residual-augmented probit.
SelectionResult select_2sri(const model::Dataset& data, const model::CandidateCatalog& cat_t,
                            const model::CandidateCatalog& cat_o);

}  // namespace limlsel::select
