#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "test_util.hpp"
#include "tetralogit/tetrad_engine.hpp"
#include "tetralogit/util.hpp"

using namespace tetralogit;

TEST_CASE("tetrad statistic patterns") {
  CHECK(tetrad_statistic(true, false, false, true) == 1.0);
  CHECK(tetrad_statistic(false, true, true, false) == -1.0);
  CHECK(tetrad_statistic(true, true, false, false) == 0.0);
  CHECK(tetrad_statistic(true, false, false, false) == 0.5);
  CHECK(tetrad_statistic(false, false, true, false) == -0.5);
}

TEST_CASE("tetrad statistic skips unobserved dyads") {
  OrderedNetwork net(4, 1, {"x"});
  double x = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && !(i == 0 && j == 2)) net.set_dyad(i, j, 1, {&x, 1});
  std::vector<BinaryLayer> layers = {binarize(net, 1)};
  Tetrad t{0, 1, 2, 3};
  CHECK_FALSE(tetrad_statistic(layers, t, CutoffSpec::uniform(1)).has_value());
  Tetrad ok{2, 3, 0, 1};
  CHECK(tetrad_statistic(layers, ok, CutoffSpec::uniform(1)).has_value());
}

TEST_CASE("differenced covariates") {
  OrderedNetwork net(4, 1, {"x"});
  Tetrad t{0, 1, 2, 3};

  SUBCASE("identical covariates cancel") {
    double x = 3.7;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) net.set_dyad(i, j, 0, {&x, 1});
    auto r = differenced_covariates(net, t);
    REQUIRE(r.has_value());
    CHECK((*r)[0] == 0.0);
  }

  SUBCASE("single nonzero entry") {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        double x = (i == 0 && j == 2) ? 1.0 : 0.0;  // X_{i1,j1}
        net.set_dyad(i, j, 0, {&x, 1});
      }
    auto r = differenced_covariates(net, t);
    REQUIRE(r.has_value());
    CHECK((*r)[0] == 1.0);
  }

  SUBCASE("squared type difference evaluates to -2") {
    // W = 1 for nodes {0,2}, 0 for nodes {1,3}; X_ij = (W_i - W_j)^2
    int w[4] = {1, 0, 1, 0};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        double x = static_cast<double>((w[i] - w[j]) * (w[i] - w[j]));
        net.set_dyad(i, j, 0, {&x, 1});
      }
    auto r = differenced_covariates(net, t);
    REQUIRE(r.has_value());
    CHECK((*r)[0] == -2.0);
  }
}

TEST_CASE("count_tetrads matches brute force enumeration") {
  const std::int64_t expected[] = {6, 30, 90, 210, 420};
  for (int n = 4; n <= 8; ++n) {
    CHECK(count_tetrads(n) == expected[n - 4]);
    CHECK(count_tetrads(n) ==
          static_cast<std::int64_t>(testutil::all_canonical_tetrads(n).size()));
  }
  CHECK(count_tetrads(25) == 34500);
  CHECK_THROWS_AS(count_tetrads(3), Error);
}

TEST_CASE("four-node fixture has exactly one informative tetrad") {
  // links {(1,3),(2,4)} in 1-based labels -> {(0,2),(1,3)} here
  OrderedNetwork net(4, 1, {"x"});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      double x = 0.0;
      int y = ((i == 0 && j == 2) || (i == 1 && j == 3)) ? 1 : 0;
      net.set_dyad(i, j, y, {&x, 1});
    }
  InformativeSet set = extract_informative(net, SpecFamily::Main, {CutoffSpec::uniform(1)});
  CHECK(set.q_total() == 6);
  REQUIRE(set.size() == 1);
  CHECK(set.y_star(0));
  Tetrad t = set.tetrad(0);
  CHECK(t.i1 == 0);
  CHECK(t.i2 == 1);
  CHECK(t.j1 == 2);
  CHECK(t.j2 == 3);
}

TEST_CASE("extractor agrees with the definition-level scan") {
  auto rng = testutil::make_rng(31);
  auto compare = [&](const OrderedNetwork& net, SpecFamily family,
                     const std::vector<CutoffSpec>& specs) {
    InformativeSet fast = extract_informative(net, family, specs);
    auto slow = testutil::brute_force_informative(net, specs);
    REQUIRE(fast.size() == slow.size());
    // order: fast enumerates by sender pair then spec then receivers; the
    // oracle by tetrad then spec. Compare as sorted multisets of keys.
    auto key = [](const Tetrad& t, const CutoffSpec& c, bool y, double r0) {
      std::ostringstream os;
      os << t.i1 << ' ' << t.i2 << ' ' << t.j1 << ' ' << t.j2 << ' ' << c.label()
         << ' ' << y << ' ' << r0;
      return os.str();
    };
    std::multiset<std::string> a, b;
    for (std::size_t i = 0; i < fast.size(); ++i) {
      a.insert(key(fast.tetrad(i), fast.cutoff(i), fast.y_star(i), fast.r(i)[0]));
    }
    for (const auto& o : slow) {
      b.insert(key(o.tetrad, o.cutoff, o.y_star, o.r[0]));
    }
    CHECK(a == b);
  };

  for (int trial = 0; trial < 6; ++trial) {
    OrderedNetwork net = testutil::random_network(rng, 8, 2, 1, trial % 2 ? 0.2 : 0.0);
    compare(net, SpecFamily::Main, uniform_cutoffs({1, 2}));
    compare(net, SpecFamily::SenderHet, sender_pair_grid(2));
    compare(net, SpecFamily::Additive, vector_grid(2));
  }
}

TEST_CASE("extraction is independent of thread count") {
  auto rng = testutil::make_rng(47);
  OrderedNetwork net = testutil::random_network(rng, 12, 2, 2, 0.1);
  InformativeSet one = extract_informative(net, SpecFamily::Main, uniform_cutoffs({1, 2}),
                                           {.threads = 1});
  InformativeSet four = extract_informative(net, SpecFamily::Main, uniform_cutoffs({1, 2}),
                                            {.threads = 4});
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one.y_star(i) == four.y_star(i));
    CHECK(one.spec_index(i) == four.spec_index(i));
    Tetrad a = one.tetrad(i), b = four.tetrad(i);
    CHECK(a.i1 == b.i1);
    CHECK(a.i2 == b.i2);
    CHECK(a.j1 == b.j1);
    CHECK(a.j2 == b.j2);
    CHECK(one.r(i)[0] == four.r(i)[0]);
    CHECK(one.r(i)[1] == four.r(i)[1]);
  }
}

TEST_CASE("counts bookkeeping") {
  auto rng = testutil::make_rng(53);
  OrderedNetwork net = testutil::random_network(rng, 9, 3, 1, 0.25);
  InformativeSet set =
      extract_informative(net, SpecFamily::Main, uniform_cutoffs({1, 2, 3}));
  CHECK(set.q_total() == count_tetrads(9));
  auto counts = set.counts_per_cutoff();
  std::int64_t total = 0;
  for (const auto& [cut, c] : counts) {
    total += c;
    CHECK(c <= set.q_total());
  }
  CHECK(total == static_cast<std::int64_t>(set.size()));
}

TEST_CASE("vector cutoffs on the diagonal carry zero loadings") {
  auto rng = testutil::make_rng(61);
  OrderedNetwork net = testutil::random_network(rng, 7, 3, 1, 0.0);
  std::vector<CutoffSpec> diag;
  for (int m = 1; m <= 3; ++m) diag.push_back(CutoffSpec::vector(m, m, m, m));
  InformativeSet set = extract_informative(net, SpecFamily::Additive, diag);
  REQUIRE(set.size() > 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (int l : set.threshold_loadings(i)) CHECK(l == 0);
  }
}

TEST_CASE("threshold loadings realize the cutoff-vector gaps") {
  // With lambda = (0, l2, l3), the predictor shift of a vector spec must be
  // -((l_m11 - l_m12) - (l_m21 - l_m22)) = loadings' (l2, l3).
  auto rng = testutil::make_rng(67);
  OrderedNetwork net = testutil::random_network(rng, 7, 3, 1, 0.0);
  InformativeSet set = extract_informative(net, SpecFamily::Additive, vector_grid(3));
  REQUIRE(set.size() > 0);
  std::vector<double> lambda = {0.0, 0.7, 1.9};  // lambda_1..lambda_3
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& m = set.cutoff(i).components();
    double gap = (lambda[m[0] - 1] - lambda[m[1] - 1]) -
                 (lambda[m[2] - 1] - lambda[m[3] - 1]);
    auto load = set.threshold_loadings(i);
    double via_loadings = load[0] * lambda[1] + load[1] * lambda[2];
    CHECK(via_loadings == doctest::Approx(-gap).epsilon(1e-12));
    for (int l : load) {
      CHECK(l >= -2);
      CHECK(l <= 2);
    }
  }
}

TEST_CASE("family and cutoff validation") {
  auto rng = testutil::make_rng(71);
  OrderedNetwork net = testutil::random_network(rng, 6, 2, 1, 0.0);
  CHECK_THROWS_AS(extract_informative(net, SpecFamily::Main, {CutoffSpec::uniform(3)}),
                  Error);
  CHECK_THROWS_AS(
      extract_informative(net, SpecFamily::Main, {CutoffSpec::sender_pair(1, 2)}), Error);
  CHECK_THROWS_AS(extract_informative(net, SpecFamily::Additive, uniform_cutoffs({1})),
                  Error);
  CHECK_THROWS_AS(extract_informative(net, SpecFamily::Main, {}), Error);
}

TEST_CASE("informative CSV dump shape") {
  auto rng = testutil::make_rng(73);
  OrderedNetwork net = testutil::random_network(rng, 6, 2, 1, 0.0);
  InformativeSet set = extract_informative(net, SpecFamily::Main, uniform_cutoffs({1}));
  std::ostringstream os;
  write_informative_csv(set, net.covariate_names(), os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "y_star,r_x1,cutoff,i1,i2,j1,j2");
  std::size_t lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == set.size());
}
