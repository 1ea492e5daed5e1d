#include "tetralogit/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace tetralogit {

std::string EstimatorSpec::name() const {
  switch (kind) {
    case Kind::Ptle: return "ptle";
    case Kind::Etle: return "etle";
    case Kind::Binary: return "binary:" + std::to_string(binary_cutoff);
    case Kind::AdditivePooled: return "additive";
    case Kind::SenderHet: return "senderhet";
  }
  return "?";
}

namespace {

std::vector<int> default_cutoffs(int n_categories) {
  std::vector<int> ms(n_categories);
  std::iota(ms.begin(), ms.end(), 1);
  return ms;
}

std::vector<CutoffSpec> specs_for(const EstimatorSpec& spec, int n_categories) {
  switch (spec.kind) {
    case EstimatorSpec::Kind::Ptle:
    case EstimatorSpec::Kind::Etle:
      return uniform_cutoffs(spec.cutoffs.empty() ? default_cutoffs(n_categories)
                                                  : spec.cutoffs);
    case EstimatorSpec::Kind::Binary:
      return {CutoffSpec::uniform(spec.binary_cutoff)};
    case EstimatorSpec::Kind::SenderHet: {
      if (spec.sender_pairs.empty()) return sender_pair_grid(n_categories);
      std::vector<CutoffSpec> out;
      out.reserve(spec.sender_pairs.size());
      for (auto [m, mp] : spec.sender_pairs) out.push_back(CutoffSpec::sender_pair(m, mp));
      return out;
    }
    case EstimatorSpec::Kind::AdditivePooled: {
      if (spec.cutoff_vectors.empty()) return vector_grid(n_categories);
      std::vector<CutoffSpec> out;
      out.reserve(spec.cutoff_vectors.size());
      for (const auto& v : spec.cutoff_vectors) {
        out.push_back(CutoffSpec::vector(v[0], v[1], v[2], v[3]));
      }
      return out;
    }
  }
  throw Error(ErrorCategory::Config, "unknown estimator kind");
}

int find_spec_index(const InformativeSet& set, const CutoffSpec& spec) {
  const auto& specs = set.specs();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i] == spec) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

EstimateReport estimate_from_set(std::shared_ptr<const InformativeSet> set,
                                 const std::vector<std::string>& covariate_names,
                                 const EstimatorSpec& spec,
                                 const EstimateOptions& options) {
  const InformativeSet& inf = *set;
  const int k = inf.n_covariates();
  const int n_load = inf.n_loading_cols();
  const bool additive = spec.kind == EstimatorSpec::Kind::AdditivePooled;
  if (additive && n_load == 0) {
    throw Error(ErrorCategory::Config,
                "informative set was not extracted for the additive family");
  }

  // Which cutoff specs of the set this estimator uses, in set order.
  std::vector<CutoffSpec> wanted;
  switch (spec.kind) {
    case EstimatorSpec::Kind::Ptle:
    case EstimatorSpec::Kind::Etle: {
      std::vector<int> ms = spec.cutoffs;
      if (ms.empty()) {
        for (const auto& s : inf.specs()) {
          if (s.kind() == CutoffSpec::Kind::Uniform) ms.push_back(s.uniform_cutoff());
        }
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
      }
      wanted = uniform_cutoffs(ms);
      break;
    }
    case EstimatorSpec::Kind::Binary:
      wanted = {CutoffSpec::uniform(spec.binary_cutoff)};
      break;
    default:
      wanted = inf.specs();
      break;
  }

  std::vector<int> spec_index_of_wanted;
  spec_index_of_wanted.reserve(wanted.size());
  for (const auto& w : wanted) {
    int idx = find_spec_index(inf, w);
    if (idx < 0) {
      throw Error(ErrorCategory::Config,
                  "informative set does not cover cutoff " + w.label());
    }
    spec_index_of_wanted.push_back(idx);
  }

  std::vector<std::int64_t> count_by_set_spec(inf.specs().size(), 0);
  for (std::size_t i = 0; i < inf.size(); ++i) ++count_by_set_spec[inf.spec_index(i)];

  EstimateReport report;
  report.spec = spec;
  report.informative = set;
  report.q_total = inf.q_total();

  // ETLE gives each cutoff's average likelihood equal weight via observation
  // weights proportional to 1/q*_m; weights are normalized so the first
  // populated cutoff gets weight one, which keeps the estimator identical to
  // PTLE bit for bit whenever all counts coincide.
  std::vector<double> weight_by_set_spec(inf.specs().size(), 1.0);
  if (spec.kind == EstimatorSpec::Kind::Etle) {
    std::int64_t ref = 0;
    for (int idx : spec_index_of_wanted) {
      if (count_by_set_spec[idx] > 0) {
        ref = count_by_set_spec[idx];
        break;
      }
    }
    for (std::size_t w = 0; w < wanted.size(); ++w) {
      int idx = spec_index_of_wanted[w];
      if (count_by_set_spec[idx] == 0) {
        report.dropped_cutoffs.push_back(wanted[w]);
        report.warnings.push_back("cutoff " + wanted[w].label() +
                                  " has no informative tetrads and was dropped");
      } else {
        weight_by_set_spec[idx] =
            static_cast<double>(ref) / static_cast<double>(count_by_set_spec[idx]);
      }
    }
  }

  std::vector<char> use_spec(inf.specs().size(), 0);
  for (std::size_t w = 0; w < wanted.size(); ++w) {
    int idx = spec_index_of_wanted[w];
    if (spec.kind == EstimatorSpec::Kind::Etle && count_by_set_spec[idx] == 0) continue;
    use_spec[idx] = 1;
  }

  report.observation_index.reserve(inf.size());
  for (std::size_t i = 0; i < inf.size(); ++i) {
    if (use_spec[inf.spec_index(i)]) report.observation_index.push_back(i);
  }
  const std::size_t n_obs = report.observation_index.size();
  report.n_observations = static_cast<std::int64_t>(n_obs);

  for (std::size_t w = 0; w < wanted.size(); ++w) {
    std::int64_t c = count_by_set_spec[spec_index_of_wanted[w]];
    report.counts_per_cutoff[wanted[w]] = c;
    report.informative_share_per_cutoff[wanted[w]] =
        inf.q_total() > 0 ? static_cast<double>(c) / static_cast<double>(inf.q_total())
                          : 0.0;
  }

  if (n_obs == 0) {
    throw Error(ErrorCategory::NoInformation,
                "no informative tetrad-cutoff pairs; the network carries no "
                "identifying variation for " + spec.name());
  }

  const int p = k + (additive ? n_load : 0);
  auto problem = std::make_shared<LogitProblem>();
  problem->x.resize(static_cast<Eigen::Index>(n_obs), p);
  problem->y.resize(static_cast<Eigen::Index>(n_obs));
  problem->w.resize(static_cast<Eigen::Index>(n_obs));
  for (std::size_t row = 0; row < n_obs; ++row) {
    std::size_t i = report.observation_index[row];
    auto r = inf.r(i);
    for (int c = 0; c < k; ++c) problem->x(row, c) = r[c];
    if (additive) {
      auto load = inf.threshold_loadings(i);
      for (int c = 0; c < n_load; ++c) {
        problem->x(row, k + c) = static_cast<double>(load[c]);
      }
    }
    problem->y[row] = inf.y_star(i) ? 1.0 : 0.0;
    problem->w[row] = weight_by_set_spec[inf.spec_index(i)];
  }

  report.coefficient_names = covariate_names;
  if (static_cast<int>(report.coefficient_names.size()) != k) {
    report.coefficient_names.resize(k);
    for (int c = 0; c < k; ++c) {
      if (report.coefficient_names[c].empty()) {
        report.coefficient_names[c] = "x" + std::to_string(c + 1);
      }
    }
  }
  if (additive) {
    for (int m = 2; m <= n_load + 1; ++m) {
      report.coefficient_names.push_back("lambda_" + std::to_string(m));
    }
  }

  report.fit = fit(*problem, Eigen::VectorXd::Zero(p), options.fit);
  report.problem = std::move(problem);
  if (additive) {
    report.threshold_estimates.assign(report.fit.theta.data() + k,
                                      report.fit.theta.data() + p);
  }
  return report;
}

EstimateReport estimate(const OrderedNetwork& net, const EstimatorSpec& spec,
                        const EstimateOptions& options) {
  auto specs = specs_for(spec, net.n_categories());
  auto set = std::make_shared<InformativeSet>(
      extract_informative(net, spec.family(), specs, {options.threads}));
  return estimate_from_set(std::move(set), net.covariate_names(), spec, options);
}

IdentificationDiagnostics identification_diagnostics(const EstimateReport& report) {
  const InformativeSet& inf = *report.informative;
  const int k = inf.n_covariates();
  IdentificationDiagnostics diag;
  diag.k = k;

  auto rank_of = [&](const Eigen::MatrixXd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    double scale = std::max(1e-300, eig.eigenvalues().cwiseAbs().maxCoeff());
    int rank = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      if (eig.eigenvalues()[i] > 1e-10 * scale) ++rank;
    }
    return rank;
  };

  std::map<CutoffSpec, Eigen::MatrixXd> grams;
  for (const auto& [cut, count] : report.counts_per_cutoff) {
    grams.emplace(cut, Eigen::MatrixXd::Zero(k, k));
  }
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd r(k);
  for (std::size_t idx : report.observation_index) {
    auto rv = inf.r(idx);
    for (int c = 0; c < k; ++c) r[c] = rv[c];
    Eigen::MatrixXd outer = r * r.transpose();
    pooled += outer;
    auto it = grams.find(inf.cutoff(idx));
    if (it != grams.end()) it->second += outer;
  }
  diag.pooled_rank = rank_of(pooled);
  diag.pooled_full_rank = diag.pooled_rank == k;

  for (const auto& [cut, count] : report.counts_per_cutoff) {
    int rank = rank_of(grams.at(cut));
    diag.rows.push_back({cut, count, report.informative_share_per_cutoff.at(cut),
                         rank, rank < k});
  }
  return diag;
}

}  // namespace tetralogit
