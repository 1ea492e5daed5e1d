#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here recomputes quantities from definitions, never through the library's
// own fast paths.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "tetralogit/net_model.hpp"
#include "tetralogit/tetrad_engine.hpp"

namespace testutil {

using namespace tetralogit;

// Deterministic RNG for fixtures.
inline std::mt19937_64 make_rng(std::uint64_t seed = 0x5eed5eedULL) {
  return std::mt19937_64{seed};
}

// Random network with independent outcomes, optional missingness, k covariates.
inline OrderedNetwork random_network(std::mt19937_64& rng, int n, int m_cat, int k,
                                     double missing_prob = 0.0) {
  std::vector<std::string> names;
  for (int c = 0; c < k; ++c) names.push_back("x" + std::to_string(c + 1));
  OrderedNetwork net(n, m_cat, names);
  std::uniform_int_distribution<int> outcome(0, m_cat);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int c = 0; c < k; ++c) x[c] = gauss(rng);
      int y = unif(rng) < missing_prob ? OrderedNetwork::kMissing : outcome(rng);
      net.set_dyad(i, j, y, x);
    }
  }
  return net;
}

// Brute-force enumeration of canonical tetrads (i1<i2, j1<j2, all distinct).
inline std::vector<Tetrad> all_canonical_tetrads(int n) {
  std::vector<Tetrad> out;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = i1 + 1; i2 < n; ++i2)
      for (int j1 = 0; j1 < n; ++j1) {
        if (j1 == i1 || j1 == i2) continue;
        for (int j2 = j1 + 1; j2 < n; ++j2) {
          if (j2 == i1 || j2 == i2) continue;
          out.push_back({i1, i2, j1, j2});
        }
      }
  return out;
}

// Definition-level informative scan: evaluates Z for every canonical tetrad
// and cutoff spec directly from layers, independent of the engine.
struct OracleObservation {
  Tetrad tetrad;
  CutoffSpec cutoff;
  bool y_star;
  std::vector<double> r;
};

inline std::vector<OracleObservation> brute_force_informative(
    const OrderedNetwork& net, const std::vector<CutoffSpec>& specs) {
  std::vector<BinaryLayer> layers;
  for (int m = 1; m <= net.n_categories(); ++m) layers.push_back(binarize(net, m));
  std::vector<OracleObservation> out;
  for (const Tetrad& t : all_canonical_tetrads(net.n_nodes())) {
    for (const CutoffSpec& spec : specs) {
      auto z = tetrad_statistic(layers, t, spec);
      if (!z || (*z != 1.0 && *z != -1.0)) continue;
      auto r = differenced_covariates(net, t);
      if (!r) continue;
      out.push_back({t, spec, *z == 1.0, *r});
    }
  }
  return out;
}

}  // namespace testutil
