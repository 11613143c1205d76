#include "limlsel/est/linalg.hpp"

#include <string>

namespace limlsel::est {

namespace {

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& x, const char* what) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(kRankTolerance);
  if (x.rows() < x.cols() || qr.rank() < x.cols()) {
    throw RankDeficientError(std::string(what) + " design is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(x.cols()) +
                             " columns, " + std::to_string(x.rows()) + " rows)");
  }
  return qr;
}

}  // namespace

void require_full_rank(const Eigen::MatrixXd& x, const char* what) { decompose(x, what); }

LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto qr = decompose(x, "least-squares");
  LeastSquares out;
  out.coef = qr.solve(y);
  out.fitted = x * out.coef;
  out.residuals = y - out.fitted;
  out.rss = out.residuals.squaredNorm();
  return out;
}

}  // namespace limlsel::est
