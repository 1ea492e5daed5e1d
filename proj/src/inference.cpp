#include "tetralogit/inference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "tetralogit/util.hpp"

namespace tetralogit {

Eigen::MatrixXd upsilon_matrix(const InformativeSet& set,
                               const std::vector<std::size_t>& observation_index,
                               const LogitProblem& problem,
                               const Eigen::VectorXd& theta,
                               std::int64_t* n_dyads_contributing) {
  const Eigen::Index p = problem.dim();
  if (theta.size() != p ||
      problem.size() != static_cast<Eigen::Index>(observation_index.size())) {
    throw Error(ErrorCategory::Config,
                "informative set, problem, and theta dimensions disagree");
  }

  // One pass over observations, scattering each score to its four owning
  // dyads. Dyads never touched stay zero and cannot contribute.
  std::unordered_map<std::int64_t, Eigen::VectorXd> dyad_scores;
  dyad_scores.reserve(observation_index.size());
  const Eigen::VectorXd eta = problem.x * theta;
  for (Eigen::Index row = 0; row < problem.size(); ++row) {
    double resid = problem.w[row] * (problem.y[row] - logistic(eta[row]));
    Eigen::VectorXd s = resid * problem.x.row(row).transpose();
    Tetrad t = set.tetrad(observation_index[row]);
    const std::pair<int, int> dyads[4] = {
        {t.i1, t.j1}, {t.i1, t.j2}, {t.i2, t.j1}, {t.i2, t.j2}};
    for (auto [i, j] : dyads) {
      std::int64_t key = static_cast<std::int64_t>(i) * 0x10000 + j;
      auto [it, inserted] = dyad_scores.try_emplace(key, Eigen::VectorXd::Zero(p));
      it->second += s;
    }
  }

  Eigen::MatrixXd upsilon = Eigen::MatrixXd::Zero(p, p);
  for (const auto& [key, v] : dyad_scores) {
    upsilon.noalias() += v * v.transpose();
  }
  if (n_dyads_contributing) {
    *n_dyads_contributing = static_cast<std::int64_t>(dyad_scores.size());
  }
  return upsilon;
}

namespace {

Eigen::MatrixXd invert_negative_definite(const Eigen::MatrixXd& hessian) {
  Eigen::MatrixXd neg_h = -hessian;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_h);
  double d_max = std::max(1.0, neg_h.diagonal().maxCoeff());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-12 * d_max) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(neg_h);
    throw RankDeficiencyError("Hessian is singular; variance is undefined",
                              eig.eigenvectors().col(0));
  }
  return ldlt.solve(Eigen::MatrixXd::Identity(hessian.rows(), hessian.cols()));
}

}  // namespace

RobustVcov robust_vcov(const EstimateReport& report) {
  if (!report.informative || !report.problem) {
    throw Error(ErrorCategory::Config, "report does not retain its informative set");
  }
  RobustVcov v;
  v.upsilon = upsilon_matrix(*report.informative, report.observation_index,
                             *report.problem, report.fit.theta,
                             &v.n_dyads_contributing);
  v.hessian_inv = invert_negative_definite(report.fit.hessian);
  // (-H)^{-1} U (-H)^{-1} = H^{-1} U H^{-1}
  v.omega = v.hessian_inv * v.upsilon * v.hessian_inv;
  v.omega = ((v.omega + v.omega.transpose()) / 2.0).eval();
  return v;
}

Eigen::MatrixXd naive_vcov(const Eigen::MatrixXd& hessian_at_fit) {
  return invert_negative_definite(hessian_at_fit);
}

WaldTable wald_table(const EstimateReport& report, const RobustVcov& vcov) {
  const Eigen::Index p = report.fit.theta.size();
  if (vcov.omega.rows() != p) {
    throw Error(ErrorCategory::Config, "vcov dimension does not match estimates");
  }
  const Eigen::MatrixXd naive = naive_vcov(report.fit.hessian);
  constexpr double z90 = 1.6448536269514722;
  constexpr double z95 = 1.959963984540054;

  WaldTable table;
  for (Eigen::Index c = 0; c < p; ++c) {
    WaldRow row;
    row.name = c < static_cast<Eigen::Index>(report.coefficient_names.size())
                   ? report.coefficient_names[c]
                   : "theta_" + std::to_string(c);
    row.estimate = report.fit.theta[c];
    row.se_robust = std::sqrt(std::max(0.0, vcov.omega(c, c)));
    row.se_naive = std::sqrt(std::max(0.0, naive(c, c)));
    if (row.se_robust > 0.0) {
      row.z = row.estimate / row.se_robust;
      row.p = 2.0 * (1.0 - norm_cdf(std::abs(row.z)));
    } else if (row.estimate != 0.0) {
      row.infinite_z = true;
      row.z = std::numeric_limits<double>::infinity() * (row.estimate > 0 ? 1 : -1);
      row.p = 0.0;
    } else {
      row.z = 0.0;
      row.p = 1.0;
    }
    row.ci90_lo = row.estimate - z90 * row.se_robust;
    row.ci90_hi = row.estimate + z90 * row.se_robust;
    row.ci95_lo = row.estimate - z95 * row.se_robust;
    row.ci95_hi = row.estimate + z95 * row.se_robust;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace tetralogit
