#include "tetralogit/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "tetralogit/inference.hpp"
#include "tetralogit/util.hpp"

namespace tetralogit {

double resolve_sparsity(const std::string& label, int n_nodes) {
  double n = static_cast<double>(n_nodes);
  if (label == "0" || label == "dense") return 0.0;
  if (label == "loglogN") return std::log(std::log(n));
  if (label == "logsqrtN") return std::log(std::sqrt(n));
  if (label == "logN") return std::log(n);
  try {
    std::size_t pos = 0;
    double v = std::stod(label, &pos);
    if (pos == label.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCategory::Dgp, "unknown sparsity '" + label +
                                      "' (use 0, loglogN, logsqrtN, logN, or a number)");
}

namespace {

void validate_config(const DgpConfig& cfg) {
  if (cfg.n_nodes < 4) {
    throw Error(ErrorCategory::Dgp, "simulation needs at least 4 nodes");
  }
  if (cfg.n_categories < 1) {
    throw Error(ErrorCategory::Dgp, "n_categories must be >= 1");
  }
  if (cfg.beta0.size() != 1) {
    throw Error(ErrorCategory::Dgp,
                "this design has the single regressor (W_i - W_j)^2; beta0 must be scalar");
  }
  auto check_lambda = [&](const std::vector<double>& l, const char* what) {
    if (static_cast<int>(l.size()) != cfg.n_categories) {
      throw Error(ErrorCategory::Dgp, std::string(what) + " must have one threshold per category");
    }
    if (!std::is_sorted(l.begin(), l.end())) {
      throw Error(ErrorCategory::Dgp, std::string(what) + " thresholds must be nondecreasing");
    }
  };
  if (const auto* h = std::get_if<HomogeneousThresholds>(&cfg.scheme)) {
    check_lambda(h->lambda, "lambda");
  } else if (const auto* t = std::get_if<TypeHeterogeneousThresholds>(&cfg.scheme)) {
    check_lambda(t->lambda_type0, "lambda_type0");
    check_lambda(t->lambda_type1, "lambda_type1");
  } else {
    const auto& j = std::get<JitterThresholds>(cfg.scheme);
    check_lambda(j.lambda, "lambda");
    if (j.sender_jitter < 0 || j.receiver_jitter < 0) {
      throw Error(ErrorCategory::Dgp, "jitter magnitudes must be nonnegative");
    }
  }
}

}  // namespace

OrderedNetwork draw_network(const DgpConfig& cfg, std::uint64_t rep_index) {
  validate_config(cfg);
  const int n = cfg.n_nodes;
  const int m_cat = cfg.n_categories;
  const double beta = cfg.beta0[0];

  std::vector<int> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = rng::uniform(cfg.seed, rep_index, i, 0, rng::kNodeType) < 0.5 ? 0 : 1;
  }
  // Node-specific threshold shift (1-based node index in the formula).
  std::vector<double> shift(n);
  for (int i = 0; i < n; ++i) {
    shift[i] = cfg.sparsity * static_cast<double>(n - (i + 1)) /
               static_cast<double>(n - 1);
  }

  // Cumulative category jitter keeps per-node thresholds ordered.
  std::vector<double> sender_jit, receiver_jit;
  const auto* jitter = std::get_if<JitterThresholds>(&cfg.scheme);
  if (jitter) {
    sender_jit.assign(static_cast<std::size_t>(n) * m_cat, 0.0);
    receiver_jit.assign(static_cast<std::size_t>(n) * m_cat, 0.0);
    for (int i = 0; i < n; ++i) {
      double cs = 0.0, cr = 0.0;
      for (int m = 0; m < m_cat; ++m) {
        cs += rng::uniform(cfg.seed, rep_index, i, m + 1, rng::kSenderJitter);
        cr += rng::uniform(cfg.seed, rep_index, i, m + 1, rng::kReceiverJitter);
        sender_jit[static_cast<std::size_t>(i) * m_cat + m] = jitter->sender_jitter * cs;
        receiver_jit[static_cast<std::size_t>(i) * m_cat + m] = jitter->receiver_jitter * cr;
      }
    }
  }

  OrderedNetwork net(n, m_cat, {"x"});
  std::vector<double> t(m_cat);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double x = static_cast<double>((w[i] - w[j]) * (w[i] - w[j]));
      for (int m = 0; m < m_cat; ++m) {
        double base;
        if (const auto* h = std::get_if<HomogeneousThresholds>(&cfg.scheme)) {
          base = h->lambda[m];
        } else if (const auto* ty = std::get_if<TypeHeterogeneousThresholds>(&cfg.scheme)) {
          if (ty->rule == CompositionRule::SumOfTypes) {
            base = (w[i] ? ty->lambda_type1[m] : ty->lambda_type0[m]) +
                   (w[j] ? ty->lambda_type1[m] : ty->lambda_type0[m]);
          } else {
            base = ty->lambda_type0[m] +
                   (ty->lambda_type1[m] - ty->lambda_type0[m]) * (w[i] + w[j]);
          }
        } else {
          base = jitter->lambda[m] +
                 sender_jit[static_cast<std::size_t>(i) * m_cat + m] +
                 receiver_jit[static_cast<std::size_t>(j) * m_cat + m];
        }
        t[m] = base + shift[i] + shift[j];
      }
      if (!std::is_sorted(t.begin(), t.end())) {
        throw Error(ErrorCategory::Dgp, "composed dyad thresholds are not ordered");
      }
      // One uniform drives all cutoffs jointly: P(Y >= m) = L(x'b - t_m).
      double u = rng::uniform(cfg.seed, rep_index, i, j, rng::kDyadUniform);
      int y = 0;
      for (int m = 0; m < m_cat; ++m) {
        if (u < logistic(x * beta - t[m])) {
          y = m + 1;
        } else {
          break;
        }
      }
      net.set_dyad(i, j, y, {&x, 1});
    }
  }
  return net;
}

namespace {

struct RepOutcome {
  std::optional<Eigen::VectorXd> theta;
  bool converged = false;
  std::string failure;  // error category when failed
};

std::vector<double> column_stats(const Eigen::MatrixXd& est, int col,
                                 double* med_out, double* iqr_out) {
  std::vector<double> v(est.rows());
  for (Eigen::Index r = 0; r < est.rows(); ++r) v[r] = est(r, col);
  std::sort(v.begin(), v.end());
  *med_out = quantile_sorted(v, 0.5);
  *iqr_out = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
  return v;
}

double sample_std(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace

McSummary run_mc(const DgpConfig& cfg, const std::vector<EstimatorSpec>& specs,
                 int n_reps, const McOptions& options) {
  if (n_reps < 1) throw Error(ErrorCategory::Config, "n_reps must be >= 1");
  validate_config(cfg);

  bool needs_main = false;
  std::vector<int> main_cutoffs;
  for (const auto& s : specs) {
    if (s.family() == SpecFamily::Main) {
      needs_main = true;
      if (s.kind == EstimatorSpec::Kind::Binary) {
        main_cutoffs.push_back(s.binary_cutoff);
      } else if (s.cutoffs.empty()) {
        for (int m = 1; m <= cfg.n_categories; ++m) main_cutoffs.push_back(m);
      } else {
        main_cutoffs.insert(main_cutoffs.end(), s.cutoffs.begin(), s.cutoffs.end());
      }
    }
  }
  std::sort(main_cutoffs.begin(), main_cutoffs.end());
  main_cutoffs.erase(std::unique(main_cutoffs.begin(), main_cutoffs.end()),
                     main_cutoffs.end());

  // outcomes[rep][spec]
  std::vector<std::vector<RepOutcome>> outcomes(
      n_reps, std::vector<RepOutcome>(specs.size()));

  parallel_blocks(static_cast<std::size_t>(n_reps), options.threads,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      OrderedNetwork net = draw_network(cfg, rep);
      std::shared_ptr<const InformativeSet> main_set;
      if (needs_main) {
        try {
          main_set = std::make_shared<InformativeSet>(extract_informative(
              net, SpecFamily::Main, uniform_cutoffs(main_cutoffs), {1}));
        } catch (const Error& e) {
          for (std::size_t s = 0; s < specs.size(); ++s) {
            if (specs[s].family() == SpecFamily::Main) {
              outcomes[rep][s].failure = to_string(e.category());
            }
          }
        }
      }
      for (std::size_t s = 0; s < specs.size(); ++s) {
        RepOutcome& out = outcomes[rep][s];
        if (!out.failure.empty()) continue;
        try {
          EstimateOptions eopt;
          eopt.threads = 1;  // replications are already parallel
          eopt.fit = options.fit;
          EstimateReport report =
              (specs[s].family() == SpecFamily::Main && main_set)
                  ? estimate_from_set(main_set, net.covariate_names(), specs[s], eopt)
                  : estimate(net, specs[s], eopt);
          if (!report.fit.converged) {
            out.failure = "non-converged";
          } else {
            out.theta = report.fit.theta;
            out.converged = true;
          }
        } catch (const Error& e) {
          out.failure = to_string(e.category());
        }
      }
    }
  });

  McSummary summary;
  summary.n_replications = n_reps;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    EstimatorMcSummary es;
    es.estimator = specs[s].name();
    int p = 0;
    for (int rep = 0; rep < n_reps; ++rep) {
      if (outcomes[rep][s].theta) {
        p = static_cast<int>(outcomes[rep][s].theta->size());
        ++es.n_success;
      } else {
        ++es.n_failed;
        ++es.failure_categories[outcomes[rep][s].failure];
      }
    }
    es.estimates.resize(es.n_success, p);
    int row = 0;
    for (int rep = 0; rep < n_reps; ++rep) {
      if (outcomes[rep][s].theta) es.estimates.row(row++) = outcomes[rep][s].theta->transpose();
    }
    for (int c = 0; c < p; ++c) {
      double med = 0.0, iqr = 0.0;
      column_stats(es.estimates, c, &med, &iqr);
      es.mean.push_back(es.n_success ? es.estimates.col(c).mean() : 0.0);
      es.median.push_back(med);
      es.std_dev.push_back(sample_std(es.estimates.col(c)));
      es.iqr.push_back(iqr);
    }
    summary.estimators.push_back(std::move(es));
  }
  return summary;
}

CoverageSummary run_coverage(const DgpConfig& cfg, int n_reps, const McOptions& options) {
  if (n_reps < 1) throw Error(ErrorCategory::Config, "n_reps must be >= 1");
  validate_config(cfg);

  struct Rep {
    bool ok = false;
    double beta = 0.0, se_robust = 0.0, se_naive = 0.0;
  };
  std::vector<Rep> reps(n_reps);

  parallel_blocks(static_cast<std::size_t>(n_reps), options.threads,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      try {
        OrderedNetwork net = draw_network(cfg, rep);
        EstimateOptions eopt;
        eopt.threads = 1;
        eopt.fit = options.fit;
        EstimateReport report = estimate(net, EstimatorSpec::ptle(), eopt);
        if (!report.fit.converged) continue;
        RobustVcov rv = robust_vcov(report);
        Eigen::MatrixXd nv = naive_vcov(report.fit.hessian);
        reps[rep].ok = true;
        reps[rep].beta = report.fit.theta[0];
        reps[rep].se_robust = std::sqrt(std::max(0.0, rv.omega(0, 0)));
        reps[rep].se_naive = std::sqrt(std::max(0.0, nv(0, 0)));
      } catch (const Error&) {
        // failure recorded by ok = false
      }
    }
  });

  CoverageSummary cs;
  cs.n_replications = n_reps;
  std::vector<double> betas, ses_r, ses_n;
  for (const auto& r : reps) {
    if (!r.ok) continue;
    betas.push_back(r.beta);
    ses_r.push_back(r.se_robust);
    ses_n.push_back(r.se_naive);
  }
  cs.n_success = static_cast<int>(betas.size());
  cs.n_failed = n_reps - cs.n_success;
  if (betas.empty()) return cs;

  Eigen::Map<Eigen::VectorXd> b(betas.data(), static_cast<Eigen::Index>(betas.size()));
  cs.mean_estimate = b.mean();
  cs.mc_std = sample_std(b);
  const double beta0 = cfg.beta0[0];
  constexpr double z90 = 1.6448536269514722;
  constexpr double z95 = 1.959963984540054;
  auto flavor = [&](const std::vector<double>& ses) {
    CoverageFlavor f;
    double sum = 0.0;
    int c90 = 0, c95 = 0;
    for (std::size_t i = 0; i < ses.size(); ++i) {
      sum += ses[i];
      double dev = std::abs(betas[i] - beta0);
      c90 += dev <= z90 * ses[i];
      c95 += dev <= z95 * ses[i];
    }
    f.mean_se = sum / static_cast<double>(ses.size());
    f.se_over_std = cs.mc_std > 0 ? f.mean_se / cs.mc_std : 0.0;
    f.coverage90 = static_cast<double>(c90) / static_cast<double>(ses.size());
    f.coverage95 = static_cast<double>(c95) / static_cast<double>(ses.size());
    return f;
  };
  cs.robust = flavor(ses_r);
  cs.naive = flavor(ses_n);
  return cs;
}

std::vector<DegreeSummary> mc_degree_table(const DgpConfig& cfg, int n_reps, int threads) {
  if (n_reps < 1) throw Error(ErrorCategory::Config, "n_reps must be >= 1");
  validate_config(cfg);
  const int m_cat = cfg.n_categories;
  std::vector<std::vector<DegreeSummary>> per_rep(n_reps);

  parallel_blocks(static_cast<std::size_t>(n_reps), threads,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      OrderedNetwork net = draw_network(cfg, rep);
      for (int m = 1; m <= m_cat; ++m) {
        per_rep[rep].push_back(degree_summary(binarize(net, m)));
      }
    }
  });

  std::vector<DegreeSummary> avg(m_cat);
  for (int m = 0; m < m_cat; ++m) {
    avg[m].cutoff = m + 1;
    for (int rep = 0; rep < n_reps; ++rep) {
      const DegreeSummary& d = per_rep[rep][m];
      avg[m].mean += d.mean;
      avg[m].q25 += d.q25;
      avg[m].median += d.median;
      avg[m].q75 += d.q75;
      avg[m].min += d.min;
      avg[m].max += d.max;
    }
    double inv = 1.0 / static_cast<double>(n_reps);
    avg[m].mean *= inv;
    avg[m].q25 *= inv;
    avg[m].median *= inv;
    avg[m].q75 *= inv;
    avg[m].min *= inv;
    avg[m].max *= inv;
  }
  return avg;
}

std::vector<SweepRow> threshold_sweep(const DgpConfig& base,
                                      const std::vector<double>& lambda_grid,
                                      int n_reps, const McOptions& options) {
  for (double v : lambda_grid) {
    if (!(v > 0.0) || v > 3.0) {
      throw Error(ErrorCategory::Dgp,
                  "sweep grid values must lie in (0, 3]; beyond that the top "
                  "category starves");
    }
  }
  std::vector<SweepRow> rows;
  for (double top : lambda_grid) {
    DgpConfig cfg = base;
    if (auto* h = std::get_if<HomogeneousThresholds>(&cfg.scheme)) {
      h->lambda.back() = top;
    } else if (auto* t = std::get_if<TypeHeterogeneousThresholds>(&cfg.scheme)) {
      t->lambda_type1.back() = top;
    } else {
      std::get<JitterThresholds>(cfg.scheme).lambda.back() = top;
    }

    SweepRow row;
    row.lambda_top = top;
    auto degrees = mc_degree_table(cfg, n_reps, options.threads);
    for (const auto& d : degrees) row.mean_degree.push_back(d.mean);
    McSummary mc = run_mc(cfg, {EstimatorSpec::ptle(), EstimatorSpec::etle()}, n_reps,
                          options);
    row.ptle_mean = mc.estimators[0].mean.empty() ? 0.0 : mc.estimators[0].mean[0];
    row.ptle_median = mc.estimators[0].median.empty() ? 0.0 : mc.estimators[0].median[0];
    row.ptle_failures = mc.estimators[0].n_failed;
    row.etle_mean = mc.estimators[1].mean.empty() ? 0.0 : mc.estimators[1].mean[0];
    row.etle_median = mc.estimators[1].median.empty() ? 0.0 : mc.estimators[1].median[0];
    row.etle_failures = mc.estimators[1].n_failed;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tetralogit
