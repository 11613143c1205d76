#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace limlsel::est {

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LeastSquares {
  Eigen::VectorXd coef;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  double rss = 0.0;
};

// Relative pivot threshold for the column-pivoted QR rank decision.
inline constexpr double kRankTolerance = 1e-10;

// Ordinary least squares via column-pivoted QR. Throws RankDeficientError
// when x does not have full column rank.
LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Throws RankDeficientError naming `what` unless x has full column rank.
void require_full_rank(const Eigen::MatrixXd& x, const char* what);

}  // namespace limlsel::est
