#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace limlsel::est {

enum class GradientMode { analytic, central_difference };

struct OptimizerOptions {
  int max_iterations = 1000;
  // Converged when the gradient max-norm and the relative change of the
  // objective over the last step are both below these.
  double gradient_tolerance = 1e-6;
  double relative_tolerance = 1e-10;
  GradientMode gradient = GradientMode::analytic;
  // Central-difference step is fd_step * (1 + |x_j|).
  double fd_step = 1e-6;
  // Cap on the max-norm of a single trial step.
  double max_step = 5.0;
};

struct OptimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  std::string message;
};

// Objective returning f(x) and, when grad is non-null, writing its gradient.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                            double step);

// BFGS ascent with Armijo backtracking. With GradientMode::central_difference
// the objective's own gradient is never requested.
OptimizerResult maximize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                              const OptimizerOptions& opts = {});

}  // namespace limlsel::est
