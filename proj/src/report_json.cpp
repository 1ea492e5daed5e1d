#include "tetralogit/report_json.hpp"

namespace tetralogit {

namespace {

std::string label_of(const CutoffSpec& spec, const CutoffLabeler& labeler) {
  return labeler ? labeler(spec) : spec.label();
}

}  // namespace

nlohmann::json report_to_json(const EstimateReport& report, const RobustVcov* vcov,
                              const WaldTable* wald, const CutoffLabeler& labeler) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["estimator"] = report.spec.name();

  nlohmann::json coefs = nlohmann::json::array();
  for (Eigen::Index c = 0; c < report.fit.theta.size(); ++c) {
    nlohmann::json row;
    row["name"] = c < static_cast<Eigen::Index>(report.coefficient_names.size())
                       ? report.coefficient_names[c]
                       : "theta_" + std::to_string(c);
    row["beta"] = report.fit.theta[c];
    if (wald && c < static_cast<Eigen::Index>(wald->rows.size())) {
      const WaldRow& w = wald->rows[c];
      row["se_robust"] = w.se_robust;
      row["se_naive"] = w.se_naive;
      row["z"] = w.infinite_z ? nlohmann::json("inf") : nlohmann::json(w.z);
      row["p"] = w.p;
      row["ci90"] = {w.ci90_lo, w.ci90_hi};
      row["ci95"] = {w.ci95_lo, w.ci95_hi};
      if (w.infinite_z) row["infinite_z"] = true;
    }
    coefs.push_back(std::move(row));
  }
  j["coefficients"] = std::move(coefs);

  nlohmann::json counts;
  counts["q_total"] = report.q_total;
  counts["n_observations"] = report.n_observations;
  nlohmann::json per_cutoff, shares;
  for (const auto& [cut, n] : report.counts_per_cutoff) {
    per_cutoff[label_of(cut, labeler)] = n;
    shares[label_of(cut, labeler)] = report.informative_share_per_cutoff.at(cut);
  }
  counts["per_cutoff"] = std::move(per_cutoff);
  counts["shares"] = std::move(shares);
  j["counts"] = std::move(counts);

  nlohmann::json conv;
  conv["converged"] = report.fit.converged;
  conv["iterations"] = report.fit.iterations;
  conv["gradient_norm"] = report.fit.gradient_norm;
  conv["objective"] = report.fit.objective;
  j["convergence"] = std::move(conv);

  if (!report.threshold_estimates.empty()) {
    nlohmann::json thresholds;
    for (std::size_t m = 0; m < report.threshold_estimates.size(); ++m) {
      thresholds["lambda_" + std::to_string(m + 2)] = report.threshold_estimates[m];
    }
    j["thresholds"] = std::move(thresholds);
  }

  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& cut : report.dropped_cutoffs) dropped.push_back(label_of(cut, labeler));
  j["dropped_cutoffs"] = std::move(dropped);
  j["warnings"] = report.warnings;

  if (vcov) {
    j["n_dyads_contributing"] = vcov->n_dyads_contributing;
  }
  return j;
}

nlohmann::json diagnostics_to_json(const IdentificationDiagnostics& diag,
                                   const CutoffLabeler& labeler) {
  nlohmann::json j;
  j["k"] = diag.k;
  j["pooled_rank"] = diag.pooled_rank;
  j["pooled_full_rank"] = diag.pooled_full_rank;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : diag.rows) {
    rows.push_back({{"cutoff", label_of(r.cutoff, labeler)},
                    {"count", r.count},
                    {"share", r.share},
                    {"rank", r.rank},
                    {"flagged", r.flagged}});
  }
  j["per_cutoff"] = std::move(rows);
  return j;
}

nlohmann::json degree_to_json(const DegreeSummary& s) {
  return {{"cutoff", s.cutoff}, {"mean", s.mean},   {"q25", s.q25}, {"median", s.median},
          {"q75", s.q75},       {"min", s.min},     {"max", s.max}};
}

nlohmann::json mc_to_json(const McSummary& summary) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n_replications"] = summary.n_replications;
  nlohmann::json est = nlohmann::json::array();
  for (const auto& e : summary.estimators) {
    nlohmann::json row;
    row["estimator"] = e.estimator;
    row["n_success"] = e.n_success;
    row["n_failed"] = e.n_failed;
    row["failure_categories"] = e.failure_categories;
    nlohmann::json stats = nlohmann::json::array();
    for (std::size_t c = 0; c < e.mean.size(); ++c) {
      stats.push_back({{"mean", e.mean[c]},
                       {"median", e.median[c]},
                       {"std", e.std_dev[c]},
                       {"iqr", e.iqr[c]}});
    }
    row["coefficients"] = std::move(stats);
    est.push_back(std::move(row));
  }
  j["estimators"] = std::move(est);
  return j;
}

nlohmann::json coverage_to_json(const CoverageSummary& s) {
  auto flavor = [](const CoverageFlavor& f) {
    return nlohmann::json{{"mean_se", f.mean_se},
                          {"se_over_std", f.se_over_std},
                          {"coverage90", f.coverage90},
                          {"coverage95", f.coverage95}};
  };
  return {{"schema_version", 1},
          {"n_replications", s.n_replications},
          {"n_success", s.n_success},
          {"n_failed", s.n_failed},
          {"mean_estimate", s.mean_estimate},
          {"mc_std", s.mc_std},
          {"robust", flavor(s.robust)},
          {"naive", flavor(s.naive)}};
}

nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"lambda_top", r.lambda_top},
                   {"mean_degree", r.mean_degree},
                   {"ptle_mean", r.ptle_mean},
                   {"ptle_median", r.ptle_median},
                   {"ptle_failures", r.ptle_failures},
                   {"etle_mean", r.etle_mean},
                   {"etle_median", r.etle_median},
                   {"etle_failures", r.etle_failures}});
  }
  return {{"schema_version", 1}, {"rows", arr}};
}

nlohmann::json error_to_json(const Error& err) {
  return {{"error", {{"category", to_string(err.category())}, {"message", err.what()}}}};
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Ingestion: return 2;
    case ErrorCategory::Config:
    case ErrorCategory::InvalidCutoff:
    case ErrorCategory::TooFewNodes:
    case ErrorCategory::Dgp: return 3;
    case ErrorCategory::EmptyNetwork:
    case ErrorCategory::NoInformation: return 4;
    case ErrorCategory::Separation: return 5;
    case ErrorCategory::RankDeficiency: return 6;
  }
  return 1;
}

}  // namespace tetralogit
