#pragma once

#include <Eigen/Dense>

namespace limlsel::est {

struct ProbitFit {
  Eigen::VectorXd coef;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct ProbitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-9;
};

double probit_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& coef);

// Newton-Raphson with step halving, started at zero. A constant outcome has
// no finite maximizer and is reported as not converged.
ProbitFit probit_mle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const ProbitOptions& opts = {});

}  // namespace limlsel::est
