#include "limlsel/est/optimizer.hpp"

#include <cmath>

namespace limlsel::est {

Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                            double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step * (1.0 + std::abs(x(j)));
    xp(j) = x(j) + h;
    const double fp = f(xp, nullptr);
    xp(j) = x(j) - h;
    const double fm = f(xp, nullptr);
    xp(j) = x(j);
    g(j) = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace {

struct Evaluator {
  const Objective& f;
  const OptimizerOptions& opts;
  int count = 0;

  double value(const Eigen::VectorXd& x) {
    ++count;
    return f(x, nullptr);
  }

  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    ++count;
    if (opts.gradient == GradientMode::analytic) return f(x, &g);
    g = central_difference_gradient(f, x, opts.fd_step);
    count += 2 * static_cast<int>(x.size());
    return f(x, nullptr);
  }
};

}  // namespace

// Works on F = -f internally so the textbook minimization formulas apply.
OptimizerResult maximize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                              const OptimizerOptions& opts) {
  Evaluator eval{f, opts};
  const Eigen::Index p = x0.size();
  OptimizerResult res;
  res.x = x0;
  Eigen::VectorXd g(p);
  double fx = eval.value_and_gradient(res.x, g);
  res.value = fx;
  res.gradient = g;
  if (!std::isfinite(fx)) {
    res.message = "objective not finite at the starting point";
    res.evaluations = eval.count;
    return res;
  }
  if (p == 0) {
    res.converged = true;
    res.message = "no free parameters";
    res.evaluations = eval.count;
    return res;
  }

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(p, p);
  bool scaled = false;
  double last_rel_change = std::numeric_limits<double>::infinity();
  int resets = 0;

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it;
    const double gmax = g.lpNorm<Eigen::Infinity>();
    if (gmax < opts.gradient_tolerance &&
        (it == 0 || last_rel_change < opts.relative_tolerance)) {
      res.converged = true;
      res.message = "gradient and relative change below tolerance";
      break;
    }

    // Ascent direction for f is hinv * g (descent for F).
    Eigen::VectorXd d = hinv * g;
    double slope = g.dot(d);
    if (!(slope > 0.0) || !d.allFinite()) {
      hinv.setIdentity();
      scaled = false;
      d = g;
      slope = g.dot(d);
    }
    double t = 1.0;
    const double dmax = d.lpNorm<Eigen::Infinity>();
    if (dmax * t > opts.max_step) t = opts.max_step / dmax;

    constexpr double c1 = 1e-4;
    const double slack = 1e-13 * std::abs(fx);
    Eigen::VectorXd xn;
    double fn = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = res.x + t * d;
      fn = eval.value(xn);
      if (std::isfinite(fn) && fn >= fx + c1 * t * slope - slack) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (resets++ < 2) {
        hinv.setIdentity();
        scaled = false;
        continue;
      }
      res.message = "line search failed";
      break;
    }

    Eigen::VectorXd gn(p);
    fn = eval.value_and_gradient(xn, gn);
    const Eigen::VectorXd s = xn - res.x;
    // y for F is -(gn - g).
    const Eigen::VectorXd yv = g - gn;
    last_rel_change = std::abs(fn - fx) / std::max(1.0, std::abs(fx));
    res.x = xn;
    fx = fn;
    g = gn;

    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (!scaled) {
        hinv *= sy / yv.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = hinv * yv;
      const double yhy = yv.dot(hy);
      hinv += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }
    res.iterations = it + 1;
  }
  if (!res.converged && res.message.empty()) res.message = "iteration limit reached";
  if (!res.converged && g.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance &&
      last_rel_change < opts.relative_tolerance) {
    res.converged = true;
    res.message = "gradient and relative change below tolerance";
  }
  res.value = fx;
  res.gradient = g;
  res.evaluations = eval.count;
  return res;
}

}  // namespace limlsel::est
