#include "limlsel/est/probit.hpp"

#include <cmath>

#include "limlsel/stats/distributions.hpp"

namespace limlsel::est {

using stats::inverse_mills;
using stats::log_norm_cdf;

double probit_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& coef) {
  const Eigen::VectorXd eta = x * coef;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += log_norm_cdf(y(i) > 0.5 ? eta(i) : -eta(i));
  }
  return ll;
}

ProbitFit probit_mle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const ProbitOptions& opts) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  ProbitFit fit;
  fit.coef = Eigen::VectorXd::Zero(p);
  fit.loglik = probit_loglik(x, y, fit.coef);

  const double ones = y.sum();
  if (n == 0 || ones == 0.0 || ones == static_cast<double>(n)) return fit;

  Eigen::VectorXd grad(p);
  Eigen::MatrixXd info(p, p);
  for (int it = 0; it < opts.max_iterations; ++it) {
    fit.iterations = it + 1;
    const Eigen::VectorXd eta = x * fit.coef;
    Eigen::VectorXd score(n), weight(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double q = y(i) > 0.5 ? 1.0 : -1.0;
      const double lam = q * inverse_mills(q * eta(i));
      score(i) = lam;
      weight(i) = lam * (lam + eta(i));
    }
    grad.noalias() = x.transpose() * score;
    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
      fit.converged = true;
      return fit;
    }
    info.noalias() = x.transpose() * weight.asDiagonal() * x;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return fit;
    const Eigen::VectorXd step = ldlt.solve(grad);

    double t = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd trial = fit.coef + t * step;
      const double ll = probit_loglik(x, y, trial);
      if (std::isfinite(ll) && ll >= fit.loglik - 1e-12 * std::abs(fit.loglik)) {
        fit.coef = trial;
        fit.loglik = ll;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) return fit;
  }
  return fit;
}

}  // namespace limlsel::est
