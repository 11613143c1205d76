#pragma once

#include <Eigen/Dense>

#include "limlsel/model/dataset.hpp"
#include "limlsel/model/formula.hpp"

namespace limlsel::est {

enum class XiMode { fixed, estimated };

std::string to_string(XiMode mode);
XiMode parse_xi_mode(const std::string& name);

// Returned in place of a non-finite log-likelihood.
inline constexpr double kDivergentLoglik = -1e15;

// LIML parameters. For a dichotomous treatment sigma_v is identified to 1.
struct Theta {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  double sigma_v = 1.0;
  double rho = 0.0;
  XiMode xi_mode = XiMode::estimated;
};

// Number of free parameters for the given shapes.
int free_parameter_count(model::TreatmentKind kind, XiMode mode, Eigen::Index n_alpha,
                         Eigen::Index n_beta);

// Unconstrained vector: alpha, beta, then log(sigma_v) (continuous only) and
// atanh(rho) when xi is estimated.
Eigen::VectorXd pack(const Theta& theta, model::TreatmentKind kind);
// Fixed xi values are taken from `fixed` when mode is fixed.
Theta unpack(const Eigen::VectorXd& p, model::TreatmentKind kind, XiMode mode,
             Eigen::Index n_alpha, const Theta& fixed = {});

// Rivers-Vuong log-likelihood on precomputed design matrices.
class RiversVuongLikelihood {
 public:
  RiversVuongLikelihood(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::VectorXd w,
                        Eigen::VectorXd y);

  double value(const Theta& theta) const;
  // Log-likelihood and gradient with respect to the packed vector.
  double value_and_gradient(const Theta& theta, Eigen::VectorXd* grad) const;

  Eigen::Index n_alpha() const { return a_.cols(); }
  Eigen::Index n_beta() const { return b_.cols(); }

 private:
  Eigen::MatrixXd a_, b_;
  Eigen::VectorXd w_, y_;
};

// Bivariate probit log-likelihood for a binary treatment.
class DichotomousLikelihood {
 public:
  DichotomousLikelihood(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::VectorXd w,
                        Eigen::VectorXd y);

  double value(const Theta& theta) const;
  double value_and_gradient(const Theta& theta, Eigen::VectorXd* grad) const;

  // n x 4 matrix of P(W=w, Y=y) with columns (w,y) = (0,0), (0,1), (1,0), (1,1).
  Eigen::MatrixXd cell_probabilities(const Theta& theta) const;

  Eigen::Index n_alpha() const { return a_.cols(); }
  Eigen::Index n_beta() const { return b_.cols(); }

 private:
  Eigen::MatrixXd a_, b_;
  Eigen::VectorXd w_, y_;
};

double loglik_rivers_vuong(const Theta& theta, const model::Dataset& data,
                           const model::ModelFormula& f_t, const model::ModelFormula& f_o);
double loglik_dichotomous(const Theta& theta, const model::Dataset& data,
                          const model::ModelFormula& f_t, const model::ModelFormula& f_o);

}  // namespace limlsel::est
