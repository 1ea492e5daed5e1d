#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tetralogit/clogit.hpp"
#include "tetralogit/tetrad_engine.hpp"

namespace tetralogit {

// Which tetrad conditional likelihood to maximize and how to weight it.
//   Ptle           pooled, unweighted over all informative tetrad-cutoff pairs
//   Etle           each cutoff's average likelihood weighted equally (1/q*_m)
//   Binary         single-cutoff binary model
//   AdditivePooled additive fixed effects + common thresholds, pooled over
//                  cutoff vectors; estimates (beta, lambda_2..lambda_M)
//   SenderHet      sender-specific category thresholds, receiver effects
//                  constant; pools Z(m;m') pairs
struct EstimatorSpec {
  enum class Kind { Ptle, Etle, Binary, AdditivePooled, SenderHet };

  Kind kind = Kind::Ptle;
  int binary_cutoff = 0;
  std::vector<int> cutoffs;  // PTLE/ETLE; empty means {1..M}
  std::vector<std::pair<int, int>> sender_pairs;      // empty means {1..M}^2
  std::vector<std::array<int, 4>> cutoff_vectors;     // empty means {1..M}^4

  static EstimatorSpec ptle(std::vector<int> cutoffs = {}) {
    EstimatorSpec s;
    s.kind = Kind::Ptle;
    s.cutoffs = std::move(cutoffs);
    return s;
  }
  static EstimatorSpec etle(std::vector<int> cutoffs = {}) {
    EstimatorSpec s;
    s.kind = Kind::Etle;
    s.cutoffs = std::move(cutoffs);
    return s;
  }
  static EstimatorSpec binary(int cutoff) {
    EstimatorSpec s;
    s.kind = Kind::Binary;
    s.binary_cutoff = cutoff;
    return s;
  }
  static EstimatorSpec additive_pooled(std::vector<std::array<int, 4>> vectors = {}) {
    EstimatorSpec s;
    s.kind = Kind::AdditivePooled;
    s.cutoff_vectors = std::move(vectors);
    return s;
  }
  static EstimatorSpec sender_het(std::vector<std::pair<int, int>> pairs = {}) {
    EstimatorSpec s;
    s.kind = Kind::SenderHet;
    s.sender_pairs = std::move(pairs);
    return s;
  }

  SpecFamily family() const {
    switch (kind) {
      case Kind::AdditivePooled: return SpecFamily::Additive;
      case Kind::SenderHet: return SpecFamily::SenderHet;
      default: return SpecFamily::Main;
    }
  }
  std::string name() const;
};

struct EstimateOptions {
  int threads = 0;
  FitOptions fit;
};

struct EstimateReport {
  EstimatorSpec spec;
  FitResult fit;
  std::vector<std::string> coefficient_names;
  std::map<CutoffSpec, std::int64_t> counts_per_cutoff;
  std::map<CutoffSpec, double> informative_share_per_cutoff;
  std::int64_t n_observations = 0;
  std::int64_t q_total = 0;
  std::vector<CutoffSpec> dropped_cutoffs;
  std::vector<double> threshold_estimates;  // lambda_2..lambda_M, additive only
  std::vector<std::string> warnings;
  // Retained for downstream variance estimation and diagnostics.
  std::shared_ptr<const InformativeSet> informative;
  std::shared_ptr<const LogitProblem> problem;
  // Rows of `problem` as indices into `informative`.
  std::vector<std::size_t> observation_index;
};

EstimateReport estimate(const OrderedNetwork& net, const EstimatorSpec& spec,
                        const EstimateOptions& options = {});

// Same, reusing a previously extracted informative set. The set must have
// been extracted for the spec's family and must contain every cutoff the
// estimator asks for; Monte Carlo loops use this to share one enumeration
// across PTLE, ETLE, and the binary models.
EstimateReport estimate_from_set(std::shared_ptr<const InformativeSet> set,
                                 const std::vector<std::string>& covariate_names,
                                 const EstimatorSpec& spec,
                                 const EstimateOptions& options = {});

struct DiagnosticsRow {
  CutoffSpec cutoff;
  std::int64_t count;
  double share;
  int rank;
  bool flagged;  // rank-deficient on its own
};

struct IdentificationDiagnostics {
  std::vector<DiagnosticsRow> rows;
  int k = 0;
  int pooled_rank = 0;
  bool pooled_full_rank = false;
};

// Per-cutoff informative counts, shares, and design ranks; flags cutoffs that
// cannot identify beta on their own (the ETLE hazard) even when the pooled
// design can.
IdentificationDiagnostics identification_diagnostics(const EstimateReport& report);

}  // namespace tetralogit
