#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "tetralogit/estimators.hpp"
#include "tetralogit/inference.hpp"
#include "tetralogit/simlab.hpp"

namespace tetralogit {

// Labels a cutoff spec for report keys; defaults to CutoffSpec::label().
// Ingested datasets substitute raw outcome levels here.
using CutoffLabeler = std::function<std::string(const CutoffSpec&)>;

nlohmann::json report_to_json(const EstimateReport& report, const RobustVcov* vcov,
                              const WaldTable* wald,
                              const CutoffLabeler& labeler = {});

nlohmann::json diagnostics_to_json(const IdentificationDiagnostics& diag,
                                   const CutoffLabeler& labeler = {});

nlohmann::json degree_to_json(const DegreeSummary& summary);
nlohmann::json mc_to_json(const McSummary& summary);
nlohmann::json coverage_to_json(const CoverageSummary& summary);
nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows);
nlohmann::json error_to_json(const Error& err);

// Exit code for a failure category (0 is success).
int exit_code_for(ErrorCategory category);

}  // namespace tetralogit
