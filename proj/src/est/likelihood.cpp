#include "limlsel/est/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "limlsel/stats/bivariate_normal.hpp"
#include "limlsel/stats/distributions.hpp"

namespace limlsel::est {

using model::TreatmentKind;
using stats::kProbabilityFloor;
using stats::norm_cdf;
using stats::norm_pdf;

std::string to_string(XiMode mode) { return mode == XiMode::fixed ? "fixed" : "estimated"; }

XiMode parse_xi_mode(const std::string& name) {
  if (name == "fixed") return XiMode::fixed;
  if (name == "estimated") return XiMode::estimated;
  throw std::invalid_argument("unknown xi mode '" + name + "' (expected fixed or estimated)");
}

int free_parameter_count(TreatmentKind kind, XiMode mode, Eigen::Index n_alpha,
                         Eigen::Index n_beta) {
  int extra = 0;
  if (mode == XiMode::estimated) extra = kind == TreatmentKind::continuous ? 2 : 1;
  return static_cast<int>(n_alpha + n_beta) + extra;
}

Eigen::VectorXd pack(const Theta& theta, TreatmentKind kind) {
  const Eigen::Index na = theta.alpha.size(), nb = theta.beta.size();
  Eigen::VectorXd p(free_parameter_count(kind, theta.xi_mode, na, nb));
  p.head(na) = theta.alpha;
  p.segment(na, nb) = theta.beta;
  if (theta.xi_mode == XiMode::estimated) {
    Eigen::Index k = na + nb;
    if (kind == TreatmentKind::continuous) p(k++) = std::log(theta.sigma_v);
    p(k) = std::atanh(theta.rho);
  }
  return p;
}

Theta unpack(const Eigen::VectorXd& p, TreatmentKind kind, XiMode mode, Eigen::Index n_alpha,
             const Theta& fixed) {
  Theta t;
  t.xi_mode = mode;
  const Eigen::Index extra = mode == XiMode::fixed ? 0 : (kind == TreatmentKind::continuous ? 2 : 1);
  const Eigen::Index nb = p.size() - n_alpha - extra;
  if (nb < 0) throw std::invalid_argument("parameter vector too short");
  t.alpha = p.head(n_alpha);
  t.beta = p.segment(n_alpha, nb);
  if (mode == XiMode::fixed) {
    t.sigma_v = kind == TreatmentKind::continuous ? fixed.sigma_v : 1.0;
    t.rho = fixed.rho;
  } else {
    Eigen::Index k = n_alpha + nb;
    t.sigma_v = kind == TreatmentKind::continuous ? std::exp(p(k++)) : 1.0;
    t.rho = std::tanh(p(k));
  }
  return t;
}

namespace {

void check_shapes(const Theta& theta, Eigen::Index na, Eigen::Index nb) {
  if (theta.alpha.size() != na || theta.beta.size() != nb) {
    throw std::invalid_argument("theta has " + std::to_string(theta.alpha.size()) + "+" +
                                std::to_string(theta.beta.size()) +
                                " coefficients, formulas need " + std::to_string(na) + "+" +
                                std::to_string(nb));
  }
}

double finite_or_divergent(double ll) { return std::isfinite(ll) ? ll : kDivergentLoglik; }

}  // namespace

RiversVuongLikelihood::RiversVuongLikelihood(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                             Eigen::VectorXd w, Eigen::VectorXd y)
    : a_(std::move(a)), b_(std::move(b)), w_(std::move(w)), y_(std::move(y)) {}

double RiversVuongLikelihood::value(const Theta& theta) const {
  return value_and_gradient(theta, nullptr);
}

double RiversVuongLikelihood::value_and_gradient(const Theta& theta, Eigen::VectorXd* grad) const {
  check_shapes(theta, a_.cols(), b_.cols());
  const double rho = theta.rho;
  const double sigma = theta.sigma_v;
  if (!(std::abs(rho) < 1.0) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    if (grad) grad->setZero(free_parameter_count(TreatmentKind::continuous, theta.xi_mode,
                                                 a_.cols(), b_.cols()));
    return kDivergentLoglik;
  }
  const double s = std::sqrt(1.0 - rho * rho);
  const double s2 = sigma * sigma;
  const double log_norm_const = std::log(sigma) + 0.5 * std::log(2.0 * std::numbers::pi);

  const Eigen::VectorXd v = w_ - a_ * theta.alpha;
  const Eigen::VectorXd phi2 = b_ * theta.beta;
  const Eigen::Index n = y_.size();

  double ll = 0.0;
  Eigen::VectorXd dl_deta;
  if (grad) dl_deta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = (phi2(i) + rho * v(i)) / s;
    const double q = y_(i) > 0.5 ? 1.0 : -1.0;
    const double p = norm_cdf(q * eta);
    if (p < kProbabilityFloor) {
      ll += std::log(kProbabilityFloor);
      if (grad) dl_deta(i) = 0.0;
    } else {
      ll += std::log(p);
      if (grad) dl_deta(i) = q * norm_pdf(eta) / p;
    }
    ll -= v(i) * v(i) / (2.0 * s2) + log_norm_const;
  }
  if (!std::isfinite(ll)) {
    if (grad) grad->setZero(free_parameter_count(TreatmentKind::continuous, theta.xi_mode,
                                                 a_.cols(), b_.cols()));
    return kDivergentLoglik;
  }
  if (grad) {
    const Eigen::Index na = a_.cols(), nb = b_.cols();
    grad->resize(free_parameter_count(TreatmentKind::continuous, theta.xi_mode, na, nb));
    // d eta / d alpha = -rho A / s; the normal part contributes v A / sigma^2.
    const Eigen::VectorXd alpha_weight = dl_deta * (-rho / s) + v / s2;
    grad->head(na) = a_.transpose() * alpha_weight;
    grad->segment(na, nb) = b_.transpose() * dl_deta / s;
    if (theta.xi_mode == XiMode::estimated) {
      double d_log_sigma = 0.0;
      double d_tau = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double eta = (phi2(i) + rho * v(i)) / s;
        d_log_sigma += v(i) * v(i) / s2 - 1.0;
        // d eta / d atanh(rho) = v s + rho eta.
        d_tau += dl_deta(i) * (v(i) * s + rho * eta);
      }
      (*grad)(na + nb) = d_log_sigma;
      (*grad)(na + nb + 1) = d_tau;
    }
  }
  return ll;
}

DichotomousLikelihood::DichotomousLikelihood(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                             Eigen::VectorXd w, Eigen::VectorXd y)
    : a_(std::move(a)), b_(std::move(b)), w_(std::move(w)), y_(std::move(y)) {}

double DichotomousLikelihood::value(const Theta& theta) const {
  return value_and_gradient(theta, nullptr);
}

// Each cell is P(qw V <= qw phi1, qy U <= qy phi2), a bivariate normal CDF
// with correlation qw qy rho.
double DichotomousLikelihood::value_and_gradient(const Theta& theta, Eigen::VectorXd* grad) const {
  check_shapes(theta, a_.cols(), b_.cols());
  const Eigen::Index na = a_.cols(), nb = b_.cols();
  const int np = free_parameter_count(TreatmentKind::dichotomous, theta.xi_mode, na, nb);
  const double rho = theta.rho;
  if (!(std::abs(rho) < 1.0)) {
    if (grad) grad->setZero(np);
    return kDivergentLoglik;
  }
  const stats::BivariateNormal same{stats::Correlation(rho)};
  const stats::BivariateNormal flipped{stats::Correlation(-rho)};
  const double sr = std::sqrt(1.0 - rho * rho);

  const Eigen::VectorXd phi1 = a_ * theta.alpha;
  const Eigen::VectorXd phi2 = b_ * theta.beta;
  const Eigen::Index n = y_.size();

  double ll = 0.0;
  Eigen::VectorXd da, db;
  double drho = 0.0;
  if (grad) {
    da.resize(n);
    db.resize(n);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double qw = w_(i) > 0.5 ? 1.0 : -1.0;
    const double qy = y_(i) > 0.5 ? 1.0 : -1.0;
    const double h = qw * phi1(i);
    const double k = qy * phi2(i);
    const double r = qw * qy * rho;
    const stats::BivariateNormal& bvn = qw * qy > 0 ? same : flipped;
    const double p = bvn.cdf(h, k);
    if (p < kProbabilityFloor) {
      ll += std::log(kProbabilityFloor);
      if (grad) {
        da(i) = 0.0;
        db(i) = 0.0;
      }
      continue;
    }
    ll += std::log(p);
    if (grad) {
      const double dp_dh = norm_pdf(h) * norm_cdf((k - r * h) / sr);
      const double dp_dk = norm_pdf(k) * norm_cdf((h - r * k) / sr);
      da(i) = qw * dp_dh / p;
      db(i) = qy * dp_dk / p;
      drho += qw * qy * bvn.pdf(h, k) / p;
    }
  }
  if (!std::isfinite(ll)) {
    if (grad) grad->setZero(np);
    return kDivergentLoglik;
  }
  if (grad) {
    grad->resize(np);
    grad->head(na) = a_.transpose() * da;
    grad->segment(na, nb) = b_.transpose() * db;
    if (theta.xi_mode == XiMode::estimated) (*grad)(na + nb) = drho * (1.0 - rho * rho);
  }
  return ll;
}

Eigen::MatrixXd DichotomousLikelihood::cell_probabilities(const Theta& theta) const {
  check_shapes(theta, a_.cols(), b_.cols());
  const stats::BivariateNormal same{stats::Correlation(theta.rho)};
  const stats::BivariateNormal flipped{stats::Correlation(-theta.rho)};
  const Eigen::VectorXd phi1 = a_ * theta.alpha;
  const Eigen::VectorXd phi2 = b_ * theta.beta;
  Eigen::MatrixXd cells(y_.size(), 4);
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    int col = 0;
    for (double qw : {-1.0, 1.0}) {
      for (double qy : {-1.0, 1.0}) {
        const stats::BivariateNormal& bvn = qw * qy > 0 ? same : flipped;
        cells(i, col++) = bvn.cdf(qw * phi1(i), qy * phi2(i));
      }
    }
  }
  return cells;
}

namespace {

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double loglik_rivers_vuong(const Theta& theta, const model::Dataset& data,
                           const model::ModelFormula& f_t, const model::ModelFormula& f_o) {
  const RiversVuongLikelihood lik(model::design_matrix(f_t, data), model::design_matrix(f_o, data),
                                  as_vector(data.w), as_vector(data.y));
  return finite_or_divergent(lik.value(theta));
}

double loglik_dichotomous(const Theta& theta, const model::Dataset& data,
                          const model::ModelFormula& f_t, const model::ModelFormula& f_o) {
  const DichotomousLikelihood lik(model::design_matrix(f_t, data), model::design_matrix(f_o, data),
                                  as_vector(data.w), as_vector(data.y));
  return finite_or_divergent(lik.value(theta));
}

}  // namespace limlsel::est
