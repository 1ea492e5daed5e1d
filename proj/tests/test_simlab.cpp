#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "tetralogit/simlab.hpp"
#include "tetralogit/util.hpp"

using namespace tetralogit;

TEST_CASE("sparsity labels") {
  CHECK(resolve_sparsity("0", 25) == 0.0);
  CHECK(resolve_sparsity("loglogN", 25) == doctest::Approx(std::log(std::log(25.0))));
  CHECK(resolve_sparsity("logsqrtN", 25) == doctest::Approx(0.5 * std::log(25.0)));
  CHECK(resolve_sparsity("logN", 25) == doctest::Approx(std::log(25.0)));
  CHECK(resolve_sparsity("1.75", 25) == doctest::Approx(1.75));
  CHECK_THROWS_AS(resolve_sparsity("bogus", 25), Error);
}

TEST_CASE("draw_network reproducibility and layer coherence") {
  DgpConfig cfg;
  cfg.n_nodes = 12;
  cfg.n_categories = 3;
  cfg.scheme = HomogeneousThresholds{{0.0, 0.8, 1.6}};
  cfg.sparsity = 1.1;
  cfg.seed = 2024;

  OrderedNetwork a = draw_network(cfg, 5);
  OrderedNetwork b = draw_network(cfg, 5);
  OrderedNetwork c = draw_network(cfg, 6);
  int diff_ab = 0, diff_ac = 0;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      if (i == j) continue;
      diff_ab += a.outcome(i, j) != b.outcome(i, j);
      diff_ac += a.outcome(i, j) != c.outcome(i, j);
    }
  CHECK(diff_ab == 0);
  CHECK(diff_ac > 0);

  // outcome coherence comes from the single-uniform construction
  for (int m = 2; m <= 3; ++m) {
    BinaryLayer lo = binarize(a, m - 1);
    BinaryLayer hi = binarize(a, m);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        if (hi.links.get(i, j)) CHECK(lo.links.get(i, j));
  }
}

TEST_CASE("P(Y >= m) is one half when x and thresholds vanish") {
  DgpConfig cfg;
  cfg.n_nodes = 40;
  cfg.n_categories = 1;
  cfg.scheme = HomogeneousThresholds{{0.0}};
  cfg.beta0 = Eigen::VectorXd::Zero(1);
  cfg.seed = 7;
  int links = 0, total = 0;
  for (int rep = 0; rep < 30; ++rep) {
    OrderedNetwork net = draw_network(cfg, rep);
    BinaryLayer l = binarize(net, 1);
    links += static_cast<int>(l.links.count());
    total += static_cast<int>(l.observed.count());
  }
  CHECK(static_cast<double>(links) / total == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("type-heterogeneous composition rules") {
  // SumOfTypes: mixed dyad at m=2 gets 1.0 + 0.5; BasePlusGap: 0.5 + 0.5.
  // With beta=0 and C_N=0 the link shares identify the rule.
  DgpConfig cfg;
  cfg.n_nodes = 50;
  cfg.n_categories = 2;
  cfg.beta0 = Eigen::VectorXd::Zero(1);
  cfg.seed = 11;

  auto mean2 = [&](CompositionRule rule) {
    cfg.scheme = TypeHeterogeneousThresholds{{0.0, 0.5}, {0.0, 1.0}, rule};
    double acc = 0.0;
    int reps = 60;
    for (int rep = 0; rep < reps; ++rep) {
      acc += degree_summary(binarize(draw_network(cfg, rep), 2)).mean;
    }
    return acc / reps;
  };

  // E over type pairs of L(-t2): types equally likely
  double sum_types = 0.25 * (logistic(-1.0) + 2 * logistic(-1.5) + logistic(-2.0));
  double base_gap = 0.25 * (logistic(-0.5) + 2 * logistic(-1.0) + logistic(-1.5));
  CHECK(mean2(CompositionRule::SumOfTypes) == doctest::Approx(sum_types).epsilon(0.05));
  CHECK(mean2(CompositionRule::BasePlusGap) == doctest::Approx(base_gap).epsilon(0.05));
}

TEST_CASE("jitter thresholds stay ordered and vary by node and category") {
  DgpConfig cfg;
  cfg.n_nodes = 15;
  cfg.n_categories = 3;
  cfg.scheme = JitterThresholds{{0.0, 0.5, 1.0}, 0.8, 0.8};
  cfg.seed = 13;
  OrderedNetwork net = draw_network(cfg, 0);  // would throw on unordered thresholds
  CHECK(net.n_categories() == 3);
}

TEST_CASE("invalid configs raise dgp errors") {
  DgpConfig cfg;
  cfg.n_nodes = 3;
  CHECK_THROWS_AS(draw_network(cfg, 0), Error);
  cfg.n_nodes = 10;
  cfg.scheme = HomogeneousThresholds{{1.0, 0.0}};  // decreasing
  CHECK_THROWS_AS(draw_network(cfg, 0), Error);
  cfg.scheme = HomogeneousThresholds{{0.0}};  // wrong length
  cfg.n_categories = 2;
  CHECK_THROWS_AS(draw_network(cfg, 0), Error);
}

TEST_CASE("run_mc summarizes and never aborts on failures") {
  DgpConfig cfg;
  cfg.n_nodes = 10;
  cfg.n_categories = 2;
  cfg.scheme = HomogeneousThresholds{{0.0, 1.0}};
  cfg.seed = 17;
  McSummary mc = run_mc(cfg, {EstimatorSpec::ptle(), EstimatorSpec::binary(2)}, 12,
                        {.threads = 2});
  CHECK(mc.n_replications == 12);
  REQUIRE(mc.estimators.size() == 2);
  for (const auto& e : mc.estimators) {
    CHECK(e.n_success + e.n_failed == 12);
    if (e.n_success > 0) {
      CHECK(e.estimates.rows() == e.n_success);
      CHECK(std::isfinite(e.mean[0]));
      CHECK(e.iqr[0] >= 0.0);
    }
  }
}

TEST_CASE("run_mc with a null effect centers near zero") {
  DgpConfig cfg;
  cfg.n_nodes = 20;
  cfg.n_categories = 2;
  cfg.beta0 = Eigen::VectorXd::Zero(1);
  cfg.scheme = HomogeneousThresholds{{0.0, 0.7}};
  cfg.seed = 19;
  McSummary mc = run_mc(cfg, {EstimatorSpec::ptle()}, 40, {.threads = 2});
  REQUIRE(mc.estimators[0].n_success > 30);
  CHECK(std::abs(mc.estimators[0].mean[0]) < 0.1);
}

TEST_CASE("run_mc is thread-count invariant") {
  DgpConfig cfg;
  cfg.n_nodes = 12;
  cfg.n_categories = 2;
  cfg.scheme = HomogeneousThresholds{{0.0, 1.0}};
  cfg.seed = 23;
  McSummary one = run_mc(cfg, {EstimatorSpec::ptle()}, 10, {.threads = 1});
  McSummary four = run_mc(cfg, {EstimatorSpec::ptle()}, 10, {.threads = 4});
  REQUIRE(one.estimators[0].n_success == four.estimators[0].n_success);
  CHECK((one.estimators[0].estimates - four.estimators[0].estimates).norm() == 0.0);
}

TEST_CASE("coverage with oracle standard errors is near nominal") {
  // Feed the true MC std back as the SE: coverage must sit at the nominal
  // level by construction. This calibrates the coverage bookkeeping itself.
  DgpConfig cfg;
  cfg.n_nodes = 16;
  cfg.n_categories = 2;
  cfg.scheme = HomogeneousThresholds{{0.0, 1.0}};
  cfg.seed = 29;
  McSummary mc = run_mc(cfg, {EstimatorSpec::ptle()}, 60, {.threads = 2});
  const auto& est = mc.estimators[0];
  REQUIRE(est.n_success > 50);
  double sd = est.std_dev[0];
  int c95 = 0;
  for (int r = 0; r < est.estimates.rows(); ++r) {
    c95 += std::abs(est.estimates(r, 0) - 1.0) <= 1.959963984540054 * sd;
  }
  double cov = static_cast<double>(c95) / est.estimates.rows();
  CHECK(cov > 0.85);
  CHECK(cov <= 1.0);
}

TEST_CASE("mc degree table averages the per-rep summaries") {
  DgpConfig cfg;
  cfg.n_nodes = 25;
  cfg.n_categories = 2;
  cfg.scheme = HomogeneousThresholds{{0.0, 1.0}};
  cfg.seed = 31;
  auto table = mc_degree_table(cfg, 50, 2);
  REQUIRE(table.size() == 2);
  CHECK(table[0].cutoff == 1);
  CHECK(table[1].cutoff == 2);
  CHECK(table[0].mean > table[1].mean);
  CHECK(table[0].q25 <= table[0].median);
  CHECK(table[0].median <= table[0].q75);
}

TEST_CASE("threshold sweep emits one row per grid point and guards the range") {
  DgpConfig cfg;
  cfg.n_nodes = 12;
  cfg.n_categories = 2;
  cfg.scheme = HomogeneousThresholds{{0.0, 1.0}};
  cfg.seed = 37;
  auto rows = threshold_sweep(cfg, {0.5, 1.5}, 6, {.threads = 2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].lambda_top == 0.5);
  CHECK(rows[1].lambda_top == 1.5);
  CHECK(rows[0].mean_degree.size() == 2);
  // higher top threshold, sparser top layer
  CHECK(rows[0].mean_degree[1] > rows[1].mean_degree[1]);
  CHECK_THROWS_AS(threshold_sweep(cfg, {3.5}, 4, {}), Error);
  CHECK_THROWS_AS(threshold_sweep(cfg, {0.0}, 4, {}), Error);
}

TEST_CASE("sufficiency of the tetrad conditional law under adversarial effects") {
  // Under heavy node-and-category specific thresholds, informative tetrads
  // must still follow P(y*=1 | informative) = L(r'beta0). Pool draws, bin by
  // r, and compare empirical frequencies within binomial noise.
  DgpConfig cfg;
  cfg.n_nodes = 30;
  cfg.n_categories = 2;
  cfg.scheme = JitterThresholds{{0.0, 0.8}, 1.5, 1.5};
  cfg.sparsity = resolve_sparsity("loglogN", 30);
  cfg.seed = 41;

  std::map<int, std::pair<std::int64_t, std::int64_t>> bins;  // r -> (n, successes)
  for (int rep = 0; rep < 40; ++rep) {
    OrderedNetwork net = draw_network(cfg, rep);
    InformativeSet set =
        extract_informative(net, SpecFamily::Main, uniform_cutoffs({1, 2}));
    for (std::size_t i = 0; i < set.size(); ++i) {
      int r = static_cast<int>(std::lround(set.r(i)[0]));
      bins[r].first += 1;
      bins[r].second += set.y_star(i);
    }
  }
  std::int64_t total = 0;
  for (const auto& [r, counts] : bins) total += counts.first;
  REQUIRE(total > 5000);
  for (const auto& [r, counts] : bins) {
    if (counts.first < 200) continue;
    double expected = logistic(static_cast<double>(r));
    double freq = static_cast<double>(counts.second) / counts.first;
    double se = std::sqrt(expected * (1.0 - expected) / counts.first);
    CHECK(std::abs(freq - expected) <= 4.0 * se);
  }
}

TEST_CASE("sender-heterogeneous draws obey the paired-cutoff law") {
  // With sender thresholds varying freely by category but receiver effects
  // constant, the Z(m;m') statistics stay conditionally logistic in r.
  DgpConfig cfg;
  cfg.n_nodes = 30;
  cfg.n_categories = 2;
  cfg.scheme = JitterThresholds{{0.0, 0.8}, 1.5, 0.0};
  cfg.seed = 43;

  std::map<int, std::pair<std::int64_t, std::int64_t>> bins;
  for (int rep = 0; rep < 30; ++rep) {
    OrderedNetwork net = draw_network(cfg, rep);
    InformativeSet set =
        extract_informative(net, SpecFamily::SenderHet, sender_pair_grid(2));
    for (std::size_t i = 0; i < set.size(); ++i) {
      int r = static_cast<int>(std::lround(set.r(i)[0]));
      bins[r].first += 1;
      bins[r].second += set.y_star(i);
    }
  }
  for (const auto& [r, counts] : bins) {
    if (counts.first < 300) continue;
    double expected = logistic(static_cast<double>(r));
    double freq = static_cast<double>(counts.second) / counts.first;
    double se = std::sqrt(expected * (1.0 - expected) / counts.first);
    CHECK(std::abs(freq - expected) <= 4.0 * se);
  }
}
