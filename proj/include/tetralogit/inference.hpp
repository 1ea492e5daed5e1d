#pragma once

#include <Eigen/Core>

#include "tetralogit/estimators.hpp"

namespace tetralogit {

// Sandwich variance H^{-1} Upsilon H^{-1} where Upsilon sums outer products
// of dyad-level score sums. Tetrads sharing a dyad are dependent; grouping
// scores by dyad is what makes the standard errors honest.
struct RobustVcov {
  Eigen::MatrixXd omega;        // sandwich variance
  Eigen::MatrixXd hessian_inv;  // (-H)^{-1} at the fit
  Eigen::MatrixXd upsilon;      // sum of dyad score outer products
  std::int64_t n_dyads_contributing = 0;
};

// Upsilon_N(theta): each observation's score w (y* - L(x'theta)) x is
// scattered to the four dyads of its tetrad; dyad sums are then accumulated
// as outer products. Rows of `problem` must correspond to
// `observation_index` entries of `set` (as produced by estimate()).
Eigen::MatrixXd upsilon_matrix(const InformativeSet& set,
                               const std::vector<std::size_t>& observation_index,
                               const LogitProblem& problem,
                               const Eigen::VectorXd& theta,
                               std::int64_t* n_dyads_contributing = nullptr);

RobustVcov robust_vcov(const EstimateReport& report);

// Variance a routine assuming independent observations would report: (-H)^{-1}.
Eigen::MatrixXd naive_vcov(const Eigen::MatrixXd& hessian_at_fit);

struct WaldRow {
  std::string name;
  double estimate = 0.0;
  double se_robust = 0.0;
  double se_naive = 0.0;
  double z = 0.0;
  double p = 1.0;
  double ci90_lo = 0.0, ci90_hi = 0.0;
  double ci95_lo = 0.0, ci95_hi = 0.0;
  bool infinite_z = false;  // zero SE with a nonzero estimate
};

struct WaldTable {
  std::vector<WaldRow> rows;
};

WaldTable wald_table(const EstimateReport& report, const RobustVcov& vcov);

}  // namespace tetralogit
