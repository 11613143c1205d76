#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "limlsel/est/likelihood.hpp"
#include "limlsel/est/optimizer.hpp"
#include "limlsel/model/dataset.hpp"
#include "limlsel/model/formula.hpp"

namespace limlsel::est {

enum class Method { liml, two_sri, two_sls };

std::string to_string(Method m);

struct FitResult {
  Method method = Method::liml;
  Theta theta;
  // Maximized log-likelihood (stage 2 for 2SRI). NaN for least-squares 2SLS.
  double loglik = 0.0;
  bool converged = false;
  int n_params = 0;
  int iterations = 0;
  std::string treatment_label;
  std::string outcome_label;
  std::optional<model::ModelFormula> treatment_formula;
  std::optional<model::ModelFormula> outcome_formula;
  // Diagnostic note on failure or fallback.
  std::string note;
  // The outcome model is a linear probability model (least-squares 2SLS).
  bool linear_outcome = false;

  // Two-step fits only.
  double residual_coef = 0.0;
  Eigen::VectorXd residuals;
  double stage1_loglik = 0.0;
  int stage1_n_params = 0;
  bool stage1_converged = true;
};

struct LimlOptions {
  OptimizerOptions optimizer;
  // xi values used when the mode is fixed.
  double fixed_sigma_v = 1.0;
  double fixed_rho = 0.0;
  // Always try the zero start too, not only after a failed warm start.
  bool always_try_zero_start = false;
};

// Maximum-likelihood fit of the treatment/outcome pair. Throws
// RankDeficientError when a design matrix is rank deficient; any other
// failure comes back as converged = false with the best theta found.
FitResult fit_liml(const model::Dataset& data, const model::ModelFormula& f_t,
                   const model::ModelFormula& f_o, XiMode xi_mode = XiMode::estimated,
                   const LimlOptions& opts = {});

enum class SecondStage { least_squares, probit };

std::string to_string(SecondStage s);

// Stage 1 least squares of w, then y on the stage-2 design with w replaced by
// its fitted value, by least squares or probit.
FitResult fit_2sls(const model::Dataset& data, const model::ModelFormula& f_t,
                   const model::ModelFormula& f_o,
                   SecondStage second = SecondStage::least_squares);

// First stage of the two-step estimators. For a continuous treatment the
// log-likelihood is the Gaussian profile likelihood with sigma^2 profiled
// out, and sigma counts as a parameter.
struct Stage1Fit {
  std::string label;
  Eigen::VectorXd coef;
  Eigen::VectorXd fitted;
  // w - fitted for continuous w, w - Phi(fitted index) for binary w.
  Eigen::VectorXd residuals;
  double loglik = 0.0;
  int n_params = 0;
  bool converged = true;
};

Stage1Fit fit_stage1(const model::Dataset& data, const model::ModelFormula& f_t);

// Stage 1 least squares (continuous w) or probit (binary w), then a probit of
// y on the outcome design plus the stage-1 residual.
FitResult fit_2sri(const model::Dataset& data, const model::ModelFormula& f_t,
                   const model::ModelFormula& f_o);
FitResult fit_2sri(const model::Dataset& data, const Stage1Fit& stage1,
                   const model::ModelFormula& f_t, const model::ModelFormula& f_o);

// -2 (loglik_small - loglik_big), floored at 0. Throws std::invalid_argument
// when the pair is not nested or either fit failed.
double lr_statistic(const FitResult& small, const FitResult& big);

}  // namespace limlsel::est
