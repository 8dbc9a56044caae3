#ifndef GDID_NUMERICS_HPP_
#define GDID_NUMERICS_HPP_

#include <Eigen/Dense>

namespace gdid {

struct LogisticOptions {
  double tolerance = 1e-8;      // sup-norm of the score X'(y - p)
  int max_iterations = 100;
  double separation_cap = 50.0; // |beta|_inf above this is reported as separation
  int max_step_halvings = 30;
};

struct LogisticFit {
  Eigen::VectorXd coefficients;  // intercept first when X carries one
  bool converged = false;
  int iterations = 0;
  double max_abs_score = 0.0;
};

/// Logistic regression of binary y on X by Newton/IRLS. Each Newton step is
/// the weighted least-squares solution of sqrt(W) X s = (y - p) / sqrt(W),
/// computed by a rank-revealing QR; a step that lowers the log-likelihood is
/// halved until it does not.
///
/// Throws OneClass, Separation, RankDeficient. Hitting the iteration cap is not
/// an error here: the fit comes back with converged = false.
LogisticFit fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const LogisticOptions& options = {});

/// 1 / (1 + exp(-x)) without overflow, clamped into the open interval (0, 1).
double sigmoid(double x);

Eigen::VectorXd predict_prob(const LogisticFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& X);

double log_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& beta);

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::Index rank = 0;
  double residual_sum_squares = 0.0;
};

/// Least squares via column-pivoted Householder QR. Throws RankDeficient when
/// the numerical rank is below the column count.
OlsFit fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& X,
               const Eigen::Ref<const Eigen::VectorXd>& y);

/// Columns 1, x, x^2, ..., x^degree.
Eigen::MatrixXd polynomial_basis(const Eigen::Ref<const Eigen::VectorXd>& x, int degree);

/// Column of ones followed by the columns of Z.
Eigen::MatrixXd with_intercept(const Eigen::Ref<const Eigen::MatrixXd>& Z);

}  // namespace gdid

#endif  // GDID_NUMERICS_HPP_
