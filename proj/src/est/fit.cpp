#include "limlsel/est/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "limlsel/est/linalg.hpp"
#include "limlsel/est/probit.hpp"
#include "limlsel/stats/distributions.hpp"

namespace limlsel::est {

using model::Dataset;
using model::ModelFormula;
using model::TreatmentKind;

std::string to_string(Method m) {
  switch (m) {
    case Method::liml: return "liml";
    case Method::two_sri: return "2sri";
    case Method::two_sls: return "2sls";
  }
  return "?";
}

std::string to_string(SecondStage s) {
  return s == SecondStage::least_squares ? "least_squares" : "probit";
}

namespace {

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool is_constant(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

FitResult skeleton(Method method, const ModelFormula& f_t, const ModelFormula& f_o) {
  FitResult r;
  r.method = method;
  r.treatment_label = f_t.label();
  r.outcome_label = f_o.label();
  r.treatment_formula = f_t;
  r.outcome_formula = f_o;
  return r;
}

constexpr double kMaxStartRho = 0.95;

// Start values mapped from the two-step estimates.
Theta warm_start(const Dataset& data, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 XiMode mode, const Theta& fixed) {
  const Eigen::VectorXd w = as_vector(data.w);
  const Eigen::VectorXd y = as_vector(data.y);
  Theta t;
  t.xi_mode = mode;
  if (data.kind == TreatmentKind::continuous) {
    const LeastSquares ls = least_squares(a, w);
    t.alpha = ls.coef;
    t.sigma_v = std::max(std::sqrt(ls.rss / static_cast<double>(w.size())), 1e-3);
    Eigen::MatrixXd aug(b.rows(), b.cols() + 1);
    aug << b, ls.residuals;
    const ProbitFit pr = probit_mle(aug, y);
    const Eigen::VectorXd bcoef = pr.converged ? pr.coef.head(b.cols()).eval()
                                               : Eigen::VectorXd::Zero(b.cols()).eval();
    const double gamma = pr.converged ? pr.coef(b.cols()) : 0.0;
    // Probit index b'x + gamma v equals (beta'x + rho v) / sqrt(1 - rho^2).
    if (mode == XiMode::estimated) {
      t.rho = std::clamp(gamma / std::sqrt(1.0 + gamma * gamma), -kMaxStartRho, kMaxStartRho);
      t.beta = bcoef * std::sqrt(1.0 - t.rho * t.rho);
    } else {
      t.sigma_v = fixed.sigma_v;
      t.rho = fixed.rho;
      t.beta = bcoef * std::sqrt(1.0 - fixed.rho * fixed.rho);
    }
  } else {
    const ProbitFit p1 = probit_mle(a, w);
    const ProbitFit p2 = probit_mle(b, y);
    t.alpha = p1.converged ? p1.coef : Eigen::VectorXd::Zero(a.cols());
    t.beta = p2.converged ? p2.coef : Eigen::VectorXd::Zero(b.cols());
    t.sigma_v = 1.0;
    t.rho = mode == XiMode::estimated ? 0.0 : fixed.rho;
  }
  return t;
}

Theta zero_start(Eigen::Index na, Eigen::Index nb, XiMode mode, const Theta& fixed,
                 TreatmentKind kind) {
  Theta t;
  t.xi_mode = mode;
  t.alpha = Eigen::VectorXd::Zero(na);
  t.beta = Eigen::VectorXd::Zero(nb);
  t.sigma_v = mode == XiMode::fixed && kind == TreatmentKind::continuous ? fixed.sigma_v : 1.0;
  t.rho = mode == XiMode::fixed ? fixed.rho : 0.0;
  return t;
}

bool better(const OptimizerResult& a, const OptimizerResult& b) {
  if (a.converged != b.converged) return a.converged;
  return a.value > b.value;
}

}  // namespace

FitResult fit_liml(const Dataset& data, const ModelFormula& f_t, const ModelFormula& f_o,
                   XiMode xi_mode, const LimlOptions& opts) {
  const Eigen::MatrixXd a = model::design_matrix(f_t, data);
  const Eigen::MatrixXd b = model::design_matrix(f_o, data);
  require_full_rank(a, "treatment");
  require_full_rank(b, "outcome");
  const TreatmentKind kind = data.kind;
  const Eigen::Index na = a.cols(), nb = b.cols();

  FitResult r = skeleton(Method::liml, f_t, f_o);
  r.n_params = free_parameter_count(kind, xi_mode, na, nb);
  Theta fixed;
  fixed.sigma_v = opts.fixed_sigma_v;
  fixed.rho = opts.fixed_rho;
  fixed.xi_mode = XiMode::fixed;
  if (xi_mode == XiMode::fixed) {
    if (!(std::abs(fixed.rho) < 1.0) || !(fixed.sigma_v > 0.0)) {
      throw std::invalid_argument("fixed xi requires sigma_v > 0 and |rho| < 1");
    }
  }

  const Eigen::VectorXd w = as_vector(data.w);
  const Eigen::VectorXd y = as_vector(data.y);
  const RiversVuongLikelihood rv(a, b, w, y);
  const DichotomousLikelihood dich(a, b, w, y);
  auto loglik = [&](const Theta& t, Eigen::VectorXd* g) {
    return kind == TreatmentKind::continuous ? rv.value_and_gradient(t, g)
                                             : dich.value_and_gradient(t, g);
  };

  if (is_constant(data.y) || (kind == TreatmentKind::dichotomous && is_constant(data.w))) {
    r.theta = zero_start(na, nb, xi_mode, fixed, kind);
    r.loglik = loglik(r.theta, nullptr);
    r.converged = false;
    r.note = is_constant(data.y) ? "outcome is constant" : "treatment is constant";
    return r;
  }

  const Objective objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
    return loglik(unpack(p, kind, xi_mode, na, fixed), g);
  };

  const Eigen::VectorXd warm = pack(warm_start(data, a, b, xi_mode, fixed), kind);
  OptimizerResult best = maximize_bfgs(objective, warm, opts.optimizer);
  int iterations = best.iterations;
  if (!best.converged || opts.always_try_zero_start) {
    const Eigen::VectorXd zero = pack(zero_start(na, nb, xi_mode, fixed, kind), kind);
    OptimizerResult alt = maximize_bfgs(objective, zero, opts.optimizer);
    iterations += alt.iterations;
    if (better(alt, best)) {
      best = std::move(alt);
      r.note = "zero start";
    }
  }
  r.theta = unpack(best.x, kind, xi_mode, na, fixed);
  r.loglik = best.value;
  r.converged = best.converged && best.value > kDivergentLoglik;
  r.iterations = iterations;
  if (!r.converged) r.note = best.message;
  return r;
}

FitResult fit_2sls(const Dataset& data, const ModelFormula& f_t, const ModelFormula& f_o,
                   SecondStage second) {
  const Eigen::MatrixXd a = model::design_matrix(f_t, data);
  const LeastSquares first = least_squares(a, as_vector(data.w));

  Dataset predicted = data;
  predicted.w.assign(first.fitted.data(), first.fitted.data() + first.fitted.size());
  const Eigen::MatrixXd b = model::design_matrix(f_o, predicted);
  const Eigen::VectorXd y = as_vector(data.y);

  FitResult r = skeleton(Method::two_sls, f_t, f_o);
  r.theta.alpha = first.coef;
  r.theta.xi_mode = XiMode::fixed;
  r.n_params = static_cast<int>(b.cols());
  const double n = static_cast<double>(data.size());
  r.stage1_loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * first.rss / n) + 1.0);
  r.stage1_n_params = static_cast<int>(a.cols()) + 1;
  r.residuals = first.residuals;
  if (second == SecondStage::least_squares) {
    const LeastSquares ls = least_squares(b, y);
    r.theta.beta = ls.coef;
    r.loglik = std::numeric_limits<double>::quiet_NaN();
    r.converged = true;
    r.linear_outcome = true;
  } else {
    require_full_rank(b, "2SLS second-stage");
    const ProbitFit pr = probit_mle(b, y);
    r.theta.beta = pr.coef;
    r.loglik = pr.loglik;
    r.converged = pr.converged;
    r.iterations = pr.iterations;
    if (!pr.converged) r.note = "second-stage probit did not converge";
  }
  return r;
}

Stage1Fit fit_stage1(const Dataset& data, const ModelFormula& f_t) {
  const Eigen::MatrixXd a = model::design_matrix(f_t, data);
  const Eigen::VectorXd w = as_vector(data.w);
  Stage1Fit s;
  s.label = f_t.label();
  if (data.kind == TreatmentKind::continuous) {
    const LeastSquares ls = least_squares(a, w);
    const double n = static_cast<double>(w.size());
    s.coef = ls.coef;
    s.fitted = ls.fitted;
    s.residuals = ls.residuals;
    s.loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * ls.rss / n) + 1.0);
    s.n_params = static_cast<int>(a.cols()) + 1;
    s.converged = std::isfinite(s.loglik);
  } else {
    require_full_rank(a, "treatment");
    const ProbitFit pr = probit_mle(a, w);
    s.coef = pr.coef;
    s.fitted = a * pr.coef;
    s.residuals.resize(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) s.residuals(i) = w(i) - stats::norm_cdf(s.fitted(i));
    s.loglik = pr.loglik;
    s.n_params = static_cast<int>(a.cols());
    s.converged = pr.converged;
  }
  return s;
}

FitResult fit_2sri(const Dataset& data, const Stage1Fit& stage1, const ModelFormula& f_t,
                   const ModelFormula& f_o) {
  if (stage1.label != f_t.label()) {
    throw std::invalid_argument("stage-1 fit is for " + stage1.label + ", not " + f_t.label());
  }
  const Eigen::MatrixXd b = model::design_matrix(f_o, data);
  Eigen::MatrixXd aug(b.rows(), b.cols() + 1);
  aug << b, stage1.residuals;
  require_full_rank(aug, "2SRI second-stage");
  const ProbitFit pr = probit_mle(aug, as_vector(data.y));

  FitResult r = skeleton(Method::two_sri, f_t, f_o);
  r.theta.alpha = stage1.coef;
  r.theta.beta = pr.coef.head(b.cols());
  r.theta.xi_mode = XiMode::fixed;
  r.residual_coef = pr.coef(b.cols());
  r.residuals = stage1.residuals;
  r.loglik = pr.loglik;
  r.n_params = static_cast<int>(aug.cols());
  r.iterations = pr.iterations;
  r.stage1_loglik = stage1.loglik;
  r.stage1_n_params = stage1.n_params;
  r.stage1_converged = stage1.converged;
  r.converged = pr.converged && stage1.converged;
  if (!stage1.converged) {
    r.note = "first-stage probit did not converge";
  } else if (!pr.converged) {
    r.note = "second-stage probit did not converge";
  }
  return r;
}

FitResult fit_2sri(const Dataset& data, const ModelFormula& f_t, const ModelFormula& f_o) {
  return fit_2sri(data, fit_stage1(data, f_t), f_t, f_o);
}

double lr_statistic(const FitResult& small, const FitResult& big) {
  if (!small.converged || !big.converged) {
    throw std::invalid_argument("likelihood ratio needs two converged fits");
  }
  if (small.method != big.method) {
    throw std::invalid_argument("likelihood ratio needs fits from the same method");
  }
  if (!small.treatment_formula || !small.outcome_formula || !big.treatment_formula ||
      !big.outcome_formula) {
    throw std::invalid_argument("likelihood ratio needs fits that carry their formulas");
  }
  if (!model::nests(*big.treatment_formula, *small.treatment_formula) ||
      !model::nests(*big.outcome_formula, *small.outcome_formula)) {
    throw std::invalid_argument("(" + small.treatment_label + ", " + small.outcome_label +
                                ") is not nested in (" + big.treatment_label + ", " +
                                big.outcome_label + ")");
  }
  return std::max(0.0, -2.0 * (small.loglik - big.loglik));
}

}  // namespace limlsel::est
