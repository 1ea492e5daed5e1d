#pragma once

#include <Eigen/Core>

#include "tetralogit/errors.hpp"

namespace tetralogit {

// Weighted binary logit data. Rows of x may be differenced covariates alone
// (p = k) or covariates plus threshold loadings (p = k + M - 1).
struct LogitProblem {
  Eigen::MatrixXd x;  // n x p
  Eigen::VectorXd y;  // in {0, 1}
  Eigen::VectorXd w;  // positive weights

  Eigen::Index size() const { return y.size(); }
  Eigen::Index dim() const { return x.cols(); }
  void validate() const;
};

struct FitOptions {
  double tol = 1e-8;             // sup-norm of the score
  int max_iter = 100;
  int max_halvings = 30;
  // Iterates beyond this sup-norm with a non-vanishing score are treated as
  // separation; a converged solution beyond it is saturated and treated the
  // same way.
  double divergence_bound = 15.0;
};

struct FitResult {
  Eigen::VectorXd theta;      // beta, then lambda_2..lambda_M when present
  double objective = 0.0;     // log-likelihood at theta
  double gradient_norm = 0.0; // sup-norm of the score at theta
  int iterations = 0;
  bool converged = false;
  Eigen::MatrixXd hessian;    // of the log-likelihood, at theta
};

// Negative weighted log-likelihood, computed through softplus so it stays
// finite for any finite linear predictor.
double nll(const LogitProblem& prob, const Eigen::VectorXd& theta);

// Score and Hessian of the weighted log-likelihood:
//   score   =  sum_i w_i (y_i - L(x_i'theta)) x_i
//   hessian = -sum_i w_i L(x_i'theta)(1 - L(x_i'theta)) x_i x_i'
Eigen::VectorXd score(const LogitProblem& prob, const Eigen::VectorXd& theta);
Eigen::MatrixXd hessian(const LogitProblem& prob, const Eigen::VectorXd& theta);

// Damped Newton ascent with step halving. The objective is concave, so the
// result does not depend on init; callers pass zeros for reproducibility.
// Throws SeparationError when the likelihood has no finite maximizer and
// RankDeficiencyError when the Hessian is singular.
FitResult fit(const LogitProblem& prob, const Eigen::VectorXd& init,
              const FitOptions& options = {});

}  // namespace tetralogit
