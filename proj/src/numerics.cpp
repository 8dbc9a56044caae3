#include "gdid/numerics.hpp"

#include <cmath>
#include <limits>

#include "gdid/error.hpp"

namespace gdid {

namespace {

constexpr double kUpper = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kLower = std::numeric_limits<double>::min();

void require_rows(const Eigen::Ref<const Eigen::MatrixXd>& X, Eigen::Index n) {
  if (X.rows() != n) {
    throw Error(ErrorCode::ArityMismatch, "design matrix rows do not match response length");
  }
}

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& A) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < A.cols()) {
    throw Error(ErrorCode::RankDeficient,
                "design matrix has rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(A.cols()) + " columns");
  }
  return qr;
}

}  // namespace

double sigmoid(double x) {
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  if (p > kUpper) return kUpper;
  if (p < kLower) return kLower;
  return p;
}

double log_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& beta) {
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + exp(eta)) computed stably
    const double e = eta[i];
    const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += y[i] * e - softplus;
  }
  return ll;
}

LogisticFit fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const LogisticOptions& options) {
  require_rows(X, y.size());
  if (!((y.array() == 0.0) || (y.array() == 1.0)).all()) {
    throw Error(ErrorCode::InvalidArgument, "logistic response must be 0/1");
  }
  const double ones = y.sum();
  if (ones == 0.0 || ones == static_cast<double>(y.size())) {
    throw Error(ErrorCode::OneClass, "logistic response has a single class");
  }
  factorize(X);

  LogisticFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(X.cols());
  double ll = log_likelihood(X, y, fit.coefficients);
  Eigen::VectorXd p(y.size());

  auto probabilities = [&](const Eigen::VectorXd& eta) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = sigmoid(eta[i]);
  };
  auto newton_step = [&](const Eigen::VectorXd& residual) {
    const Eigen::VectorXd sqrt_w = (p.array() * (1.0 - p.array())).sqrt();
    const Eigen::MatrixXd weighted = sqrt_w.asDiagonal() * X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
    if (qr.rank() < X.cols()) {
      // Weights collapse to zero only when fitted probabilities saturate.
      throw Error(ErrorCode::Separation, "IRLS weights degenerate; data appear separated");
    }
    return Eigen::VectorXd(qr.solve((residual.array() / sqrt_w.array()).matrix()));
  };

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd eta = X * fit.coefficients;
    // A coefficient vector that classifies every unit strictly correctly
    // certifies complete separation: no finite maximizer exists.
    if (((2.0 * y.array() - 1.0) * eta.array() > 0.0).all()) {
      throw Error(ErrorCode::Separation, "classes are completely separated by the covariates");
    }
    probabilities(eta);
    const Eigen::VectorXd residual = y - p;
    fit.max_abs_score = (X.transpose() * residual).cwiseAbs().maxCoeff();
    fit.iterations = iter;
    if (fit.max_abs_score <= options.tolerance) {
      fit.converged = true;
      // One more full step: quadratic convergence takes the score to rounding level.
      const Eigen::VectorXd polished = fit.coefficients + newton_step(residual);
      probabilities(X * polished);
      const double score = (X.transpose() * (y - p)).cwiseAbs().maxCoeff();
      if (score <= fit.max_abs_score) {
        fit.coefficients = polished;
        fit.max_abs_score = score;
      }
      return fit;
    }
    if (iter >= options.max_iterations) return fit;

    const Eigen::VectorXd step = newton_step(residual);
    // Near the optimum the log-likelihood is flat to rounding; only a real
    // decrease triggers step halving.
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    double scale = 1.0;
    Eigen::VectorXd candidate = fit.coefficients + step;
    double candidate_ll = log_likelihood(X, y, candidate);
    for (int h = 0; h < options.max_step_halvings && !(candidate_ll >= ll - slack); ++h) {
      scale *= 0.5;
      candidate = fit.coefficients + scale * step;
      candidate_ll = log_likelihood(X, y, candidate);
    }
    if (candidate.cwiseAbs().maxCoeff() > options.separation_cap) {
      throw Error(ErrorCode::Separation,
                  "coefficients exceed |beta| cap " + std::to_string(options.separation_cap) +
                      "; data appear separated");
    }
    fit.coefficients = candidate;
    ll = candidate_ll;
  }
}

Eigen::VectorXd predict_prob(const LogisticFit& fit, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.cols() != fit.coefficients.size()) {
    throw Error(ErrorCode::ArityMismatch, "design matrix columns do not match coefficients");
  }
  if (!fit.converged) {
    throw Error(ErrorCode::NoConvergence, "logistic fit did not converge");
  }
  const Eigen::VectorXd eta = X * fit.coefficients;
  return eta.unaryExpr([](double e) { return sigmoid(e); });
}

OlsFit fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& X,
               const Eigen::Ref<const Eigen::VectorXd>& y) {
  require_rows(X, y.size());
  if (X.rows() < X.cols()) {
    throw Error(ErrorCode::RankDeficient, "fewer rows than columns");
  }
  const auto qr = factorize(X);
  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.rank = qr.rank();
  fit.residual_sum_squares = (y - X * fit.coefficients).squaredNorm();
  return fit;
}

Eigen::MatrixXd polynomial_basis(const Eigen::Ref<const Eigen::VectorXd>& x, int degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 0");
  Eigen::MatrixXd B(x.size(), degree + 1);
  B.col(0).setOnes();
  for (int d = 1; d <= degree; ++d) B.col(d) = B.col(d - 1).cwiseProduct(x);
  return B;
}

Eigen::MatrixXd with_intercept(const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  Eigen::MatrixXd X(Z.rows(), Z.cols() + 1);
  X.col(0).setOnes();
  X.rightCols(Z.cols()) = Z;
  return X;
}

}  // namespace gdid
