#include "tetralogit/clogit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "tetralogit/util.hpp"

namespace tetralogit {

void LogitProblem::validate() const {
  if (y.size() != x.rows() || w.size() != x.rows()) {
    throw Error(ErrorCategory::Config, "logit problem dimensions disagree");
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      throw Error(ErrorCategory::Config, "logit weights must be finite and positive");
    }
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw Error(ErrorCategory::Config, "logit outcomes must be 0 or 1");
    }
  }
}

double nll(const LogitProblem& prob, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = prob.x * theta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    total += prob.w[i] * (softplus(eta[i]) - prob.y[i] * eta[i]);
  }
  return total;
}

Eigen::VectorXd score(const LogitProblem& prob, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = prob.x * theta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    resid[i] = prob.w[i] * (prob.y[i] - logistic(eta[i]));
  }
  return prob.x.transpose() * resid;
}

Eigen::MatrixXd hessian(const LogitProblem& prob, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = prob.x * theta;
  Eigen::VectorXd curv(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double p = logistic(eta[i]);
    curv[i] = prob.w[i] * p * (1.0 - p);
  }
  return -(prob.x.transpose() * curv.asDiagonal() * prob.x);
}

namespace {

std::string format_direction(const Eigen::VectorXd& d) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (i) os << ", ";
    os << d[i];
  }
  os << "]";
  return os.str();
}

[[noreturn]] void throw_separation(const Eigen::VectorXd& theta) {
  Eigen::Index worst;
  theta.cwiseAbs().maxCoeff(&worst);
  Eigen::VectorXd direction = theta / theta.cwiseAbs().maxCoeff();
  std::ostringstream msg;
  msg << "separation: likelihood keeps improving along direction "
      << format_direction(direction) << " (component " << worst
      << " diverging); too few informative tetrads to pin the coefficient down";
  throw SeparationError(msg.str(), std::move(direction));
}

[[noreturn]] void throw_rank_deficiency(const Eigen::MatrixXd& neg_hessian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(neg_hessian);
  Eigen::VectorXd null_dir = eig.eigenvectors().col(0);
  throw RankDeficiencyError(
      "singular Hessian: design has no curvature along " + format_direction(null_dir),
      std::move(null_dir));
}

}  // namespace

FitResult fit(const LogitProblem& prob, const Eigen::VectorXd& init,
              const FitOptions& options) {
  prob.validate();
  if (prob.size() == 0) {
    throw Error(ErrorCategory::Config, "cannot fit an empty logit problem");
  }
  if (init.size() != prob.dim()) {
    throw Error(ErrorCategory::Config, "init has wrong dimension");
  }
  if (prob.x.cwiseAbs().maxCoeff() == 0.0) {
    throw_rank_deficiency(Eigen::MatrixXd::Zero(prob.dim(), prob.dim()));
  }

  Eigen::VectorXd theta = init;
  double current = nll(prob, theta);
  FitResult result;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    result.iterations = iter;
    Eigen::VectorXd s = score(prob, theta);
    double g = s.lpNorm<Eigen::Infinity>();
    if (g <= options.tol) {
      if (theta.lpNorm<Eigen::Infinity>() > options.divergence_bound) {
        throw_separation(theta);  // converged only by saturating the link
      }
      result.converged = true;
      result.gradient_norm = g;
      break;
    }
    if (theta.lpNorm<Eigen::Infinity>() > options.divergence_bound) {
      throw_separation(theta);
    }

    Eigen::MatrixXd neg_h = -hessian(prob, theta);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_h);
    double d_max = neg_h.diagonal().maxCoeff();
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= 1e-12 * std::max(1.0, d_max)) {
      throw_rank_deficiency(neg_h);
    }
    Eigen::VectorXd direction = ldlt.solve(s);

    // Concavity guarantees descent in nll along the Newton direction once the
    // step is short enough.
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      Eigen::VectorXd candidate = theta + step * direction;
      double value = nll(prob, candidate);
      if (value <= current) {
        theta = std::move(candidate);
        current = value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.gradient_norm = g;
      break;  // stuck at numerical precision; report non-convergence
    }
  }

  if (!result.converged) {
    result.gradient_norm = score(prob, theta).lpNorm<Eigen::Infinity>();
    if (result.gradient_norm <= options.tol) {
      if (theta.lpNorm<Eigen::Infinity>() > options.divergence_bound) {
        throw_separation(theta);
      }
      result.converged = true;
    }
  }
  result.theta = std::move(theta);
  result.objective = -current;
  result.hessian = hessian(prob, result.theta);
  if (result.converged) {
    // Converged fits promise a negative definite Hessian.
    Eigen::MatrixXd neg_h = -result.hessian;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_h);
    double d_max = std::max(1.0, neg_h.diagonal().maxCoeff());
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-12 * d_max) {
      throw_rank_deficiency(neg_h);
    }
  }
  return result;
}

}  // namespace tetralogit
