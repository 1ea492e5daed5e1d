#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tetralogit/estimators.hpp"
#include "tetralogit/net_model.hpp"

namespace tetralogit {

// All nodes share the same base thresholds lambda_1..lambda_M.
struct HomogeneousThresholds {
  std::vector<double> lambda;
};

// How the two node types' thresholds combine into a dyad threshold.
//   SumOfTypes:  t_m = lambda_{m,type(i)} + lambda_{m,type(j)}
//   BasePlusGap: t_m = lambda_{m,0} + (lambda_{m,1} - lambda_{m,0}) *
//                      (#type-1 endpoints)
// The two rules disagree once both endpoints are type 1; both are supported.
enum class CompositionRule { SumOfTypes, BasePlusGap };

struct TypeHeterogeneousThresholds {
  std::vector<double> lambda_type0;
  std::vector<double> lambda_type1;
  CompositionRule rule = CompositionRule::SumOfTypes;
};

// Base thresholds plus node-and-category specific noise: cumulative uniform
// increments scaled by the jitter magnitudes, so thresholds stay ordered.
// sender_jitter > 0 makes sender thresholds vary freely across categories;
// receiver_jitter > 0 does the same on the receiver side.
struct JitterThresholds {
  std::vector<double> lambda;
  double sender_jitter = 0.0;
  double receiver_jitter = 0.0;
};

using ThresholdScheme =
    std::variant<HomogeneousThresholds, TypeHeterogeneousThresholds, JitterThresholds>;

struct DgpConfig {
  int n_nodes = 25;
  int n_categories = 2;
  Eigen::VectorXd beta0 = Eigen::VectorXd::Ones(1);
  double sparsity = 0.0;  // C_N
  ThresholdScheme scheme = HomogeneousThresholds{{0.0, 1.0}};
  std::uint64_t seed = 1;
};

// "0" | "loglogN" | "logsqrtN" | "logN" | literal number.
double resolve_sparsity(const std::string& label, int n_nodes);

// Draws one network: node types W_i ~ Bernoulli(1/2), regressor
// X_ij = (W_i - W_j)^2, node threshold shifts (N-i)/(N-1) * C_N, and outcomes
// generated from a single uniform per dyad run against the ordered threshold
// sequence, which makes Y >= m' imply Y >= m for m <= m' on every draw.
// Identical (cfg, rep_index) always produce the identical network.
OrderedNetwork draw_network(const DgpConfig& cfg, std::uint64_t rep_index);

struct EstimatorMcSummary {
  std::string estimator;
  std::vector<std::string> coefficient_names;
  std::vector<double> mean, median, std_dev, iqr;  // per coefficient
  int n_success = 0;
  int n_failed = 0;
  std::map<std::string, int> failure_categories;
  Eigen::MatrixXd estimates;  // n_success x p, in replication order
};

struct McSummary {
  int n_replications = 0;
  std::vector<EstimatorMcSummary> estimators;
};

struct McOptions {
  int threads = 0;
  FitOptions fit;
};

// Replication loop: draw, estimate each spec, summarize. Failed replications
// (separation, no information, non-convergence) are recorded per estimator
// and excluded from the summary statistics, never fatal.
McSummary run_mc(const DgpConfig& cfg, const std::vector<EstimatorSpec>& specs,
                 int n_reps, const McOptions& options = {});

struct CoverageFlavor {
  double mean_se = 0.0;
  double se_over_std = 0.0;
  double coverage90 = 0.0;
  double coverage95 = 0.0;
};

struct CoverageSummary {
  int n_replications = 0;
  int n_success = 0;
  int n_failed = 0;
  double mean_estimate = 0.0;
  double mc_std = 0.0;
  CoverageFlavor robust;
  CoverageFlavor naive;
};

// PTLE per replication with robust and naive standard errors for the first
// coefficient; reports se/std ratios and coverage of beta0.
CoverageSummary run_coverage(const DgpConfig& cfg, int n_reps,
                             const McOptions& options = {});

// Field-wise averages over replications of the per-replication degree
// summaries, one row per cutoff.
std::vector<DegreeSummary> mc_degree_table(const DgpConfig& cfg, int n_reps,
                                           int threads = 0);

struct SweepRow {
  double lambda_top = 0.0;
  std::vector<double> mean_degree;  // per cutoff 1..M
  double ptle_mean = 0.0, ptle_median = 0.0;
  double etle_mean = 0.0, etle_median = 0.0;
  int ptle_failures = 0, etle_failures = 0;
};

// Varies the top threshold (lambda_M, or lambda_{M,1} for type-heterogeneous
// schemes) over the grid and reports mean degrees and mean PTLE/ETLE
// estimates per grid point. Grid values must lie in (0, 3]; beyond that the
// top category starves and estimates are numerically meaningless.
std::vector<SweepRow> threshold_sweep(const DgpConfig& base,
                                      const std::vector<double>& lambda_grid,
                                      int n_reps, const McOptions& options = {});

}  // namespace tetralogit
