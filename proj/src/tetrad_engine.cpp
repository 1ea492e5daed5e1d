#include "tetralogit/tetrad_engine.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

#include "tetralogit/util.hpp"

namespace tetralogit {

std::string CutoffSpec::label() const {
  switch (kind_) {
    case Kind::Uniform:
      return "u" + std::to_string(m_[0]);
    case Kind::SenderPair:
      return "s" + std::to_string(m_[0]) + "," + std::to_string(m_[2]);
    case Kind::Vector:
      return "v" + std::to_string(m_[0]) + "," + std::to_string(m_[1]) + "," +
             std::to_string(m_[2]) + "," + std::to_string(m_[3]);
  }
  return "?";
}

void InformativeSet::push(bool y_star, std::span<const double> r,
                          std::span<const std::int8_t> loadings, int spec_index,
                          Tetrad t) {
  y_.push_back(y_star ? 1 : 0);
  r_flat_.insert(r_flat_.end(), r.begin(), r.end());
  loadings_.insert(loadings_.end(), loadings.begin(), loadings.end());
  spec_index_.push_back(spec_index);
  nodes_.push_back({static_cast<std::uint16_t>(t.i1), static_cast<std::uint16_t>(t.i2),
                    static_cast<std::uint16_t>(t.j1), static_cast<std::uint16_t>(t.j2)});
}

void InformativeSet::reserve(std::size_t n) {
  y_.reserve(n);
  r_flat_.reserve(n * k_);
  loadings_.reserve(n * n_loading_cols_);
  spec_index_.reserve(n);
  nodes_.reserve(n);
}

std::map<CutoffSpec, std::int64_t> InformativeSet::counts_per_cutoff() const {
  std::vector<std::int64_t> by_index(specs_.size(), 0);
  for (auto s : spec_index_) ++by_index[s];
  std::map<CutoffSpec, std::int64_t> counts;
  for (std::size_t s = 0; s < specs_.size(); ++s) counts[specs_[s]] = by_index[s];
  return counts;
}

std::int64_t InformativeSet::count_for(const CutoffSpec& spec) const {
  std::int64_t c = 0;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i] == spec) {
      for (auto s : spec_index_) c += (s == static_cast<std::int32_t>(i));
      return c;
    }
  }
  return 0;
}

std::int64_t count_tetrads(int n_nodes) {
  if (n_nodes < 4) {
    throw Error(ErrorCategory::TooFewNodes,
                "tetrads need at least 4 nodes, got " + std::to_string(n_nodes));
  }
  std::int64_t n = n_nodes;
  return (n * (n - 1) / 2) * ((n - 2) * (n - 3) / 2);
}

std::optional<double> tetrad_statistic(const std::vector<BinaryLayer>& layers,
                                       const Tetrad& t, const CutoffSpec& spec) {
  const auto& m = spec.components();
  const std::array<std::pair<int, int>, 4> dyads = {
      {{t.i1, t.j1}, {t.i1, t.j2}, {t.i2, t.j1}, {t.i2, t.j2}}};
  bool d[4];
  for (int q = 0; q < 4; ++q) {
    const BinaryLayer& layer = layers.at(m[q] - 1);
    auto [i, j] = dyads[q];
    if (!layer.observed.get(i, j)) return std::nullopt;
    d[q] = layer.links.get(i, j);
  }
  return tetrad_statistic(d[0], d[1], d[2], d[3]);
}

std::optional<std::vector<double>> differenced_covariates(const OrderedNetwork& net,
                                                          const Tetrad& t) {
  if (!net.has_covariates(t.i1, t.j1) || !net.has_covariates(t.i1, t.j2) ||
      !net.has_covariates(t.i2, t.j1) || !net.has_covariates(t.i2, t.j2)) {
    return std::nullopt;
  }
  const int k = net.n_covariates();
  const double* x11 = net.covariates(t.i1, t.j1);
  const double* x12 = net.covariates(t.i1, t.j2);
  const double* x21 = net.covariates(t.i2, t.j1);
  const double* x22 = net.covariates(t.i2, t.j2);
  std::vector<double> r(k);
  for (int c = 0; c < k; ++c) r[c] = (x11[c] - x12[c]) - (x21[c] - x22[c]);
  return r;
}

std::vector<CutoffSpec> uniform_cutoffs(const std::vector<int>& ms) {
  std::vector<CutoffSpec> specs;
  specs.reserve(ms.size());
  for (int m : ms) specs.push_back(CutoffSpec::uniform(m));
  return specs;
}

std::vector<CutoffSpec> sender_pair_grid(int n_categories) {
  std::vector<CutoffSpec> specs;
  for (int m = 1; m <= n_categories; ++m) {
    for (int mp = 1; mp <= n_categories; ++mp) {
      specs.push_back(CutoffSpec::sender_pair(m, mp));
    }
  }
  return specs;
}

std::vector<CutoffSpec> vector_grid(int n_categories) {
  std::vector<CutoffSpec> specs;
  for (int a = 1; a <= n_categories; ++a)
    for (int b = 1; b <= n_categories; ++b)
      for (int c = 1; c <= n_categories; ++c)
        for (int d = 1; d <= n_categories; ++d)
          specs.push_back(CutoffSpec::vector(a, b, c, d));
  return specs;
}

namespace {

void validate_specs(const OrderedNetwork& net, SpecFamily family,
                    const std::vector<CutoffSpec>& cutoff_set) {
  if (cutoff_set.empty()) {
    throw Error(ErrorCategory::Config, "cutoff set is empty");
  }
  for (const auto& spec : cutoff_set) {
    for (int m : spec.components()) {
      if (m < 1 || m > net.n_categories()) {
        throw Error(ErrorCategory::InvalidCutoff,
                    "cutoff " + std::to_string(m) + " outside {1.." +
                        std::to_string(net.n_categories()) + "}");
      }
    }
    bool ok = (family == SpecFamily::Main && spec.kind() == CutoffSpec::Kind::Uniform) ||
              (family == SpecFamily::SenderHet &&
               spec.kind() == CutoffSpec::Kind::SenderPair) ||
              (family == SpecFamily::Additive && spec.kind() == CutoffSpec::Kind::Vector);
    if (!ok) {
      throw Error(ErrorCategory::Config,
                  "cutoff spec " + spec.label() + " does not match the requested family");
    }
  }
}

// Loadings realizing lambda0(m) = (l_{m11} - l_{m12}) - (l_{m21} - l_{m22})
// as coefficients on (lambda_2..lambda_M), with lambda_1 = 0: the linear
// predictor is r'beta + loadings'(lambda_2..lambda_M).
std::vector<std::int8_t> loadings_for(const CutoffSpec& spec, int n_categories) {
  std::vector<std::int8_t> load(static_cast<std::size_t>(n_categories - 1), 0);
  if (spec.kind() != CutoffSpec::Kind::Vector) return load;
  const auto& m = spec.components();
  for (int level = 2; level <= n_categories; ++level) {
    int c = -((m[0] == level) - (m[1] == level) - (m[2] == level) + (m[3] == level));
    load[level - 2] = static_cast<std::int8_t>(c);
  }
  return load;
}

struct Shard {
  InformativeSet set;
};

}  // namespace

InformativeSet extract_informative(const OrderedNetwork& net, SpecFamily family,
                                   const std::vector<CutoffSpec>& cutoff_set,
                                   const ExtractOptions& options) {
  validate_specs(net, family, cutoff_set);
  const int n = net.n_nodes();
  if (n < 4) {
    throw Error(ErrorCategory::TooFewNodes,
                "tetrads need at least 4 nodes, got " + std::to_string(n));
  }
  const int n_cat = net.n_categories();
  const int k = net.n_covariates();
  const int n_load = (family == SpecFamily::Additive) ? n_cat - 1 : 0;

  // Binarized layers shared read-only by all partitions.
  std::vector<BinaryLayer> layers;
  layers.reserve(n_cat);
  for (int m = 1; m <= n_cat; ++m) layers.push_back(binarize(net, m));
  const BitMatrix& observed = layers.front().observed;
  const int words = observed.words_per_row();

  std::vector<std::vector<std::int8_t>> loadings;
  loadings.reserve(cutoff_set.size());
  for (const auto& spec : cutoff_set) loadings.push_back(loadings_for(spec, n_cat));

  // Partition work by sender pairs (i1 < i2); shards merge in pair order.
  std::vector<std::pair<int, int>> sender_pairs;
  sender_pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = i1 + 1; i2 < n; ++i2) sender_pairs.emplace_back(i1, i2);

  const std::size_t n_blocks = plan_blocks(sender_pairs.size(), options.threads);
  std::vector<Shard> shards;
  shards.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    shards.push_back(Shard{InformativeSet(k, n_load, cutoff_set)});
  }

  parallel_blocks(sender_pairs.size(), options.threads,
                  [&](std::size_t block, std::size_t begin, std::size_t end) {
    InformativeSet& out = shards[block].set;
    std::vector<std::uint64_t> obs_pair(words), cand1(words), cand2(words);
    std::vector<int> js1, js2;
    std::vector<double> r(k);
    for (std::size_t p = begin; p < end; ++p) {
      auto [i1, i2] = sender_pairs[p];
      // Receivers must be observed from both senders and distinct from them.
      const std::uint64_t* o1 = observed.row(i1);
      const std::uint64_t* o2 = observed.row(i2);
      bool any = false;
      for (int w = 0; w < words; ++w) {
        obs_pair[w] = o1[w] & o2[w];
        any |= obs_pair[w] != 0;
      }
      if (!any) continue;
      obs_pair[i1 >> 6] &= ~(1ULL << (i1 & 63));
      obs_pair[i2 >> 6] &= ~(1ULL << (i2 & 63));

      for (std::size_t s = 0; s < cutoff_set.size(); ++s) {
        const auto& m = cutoff_set[s].components();
        // j1 candidates: D(i1,j;m11) != D(i2,j;m21); j2: D(i1,j;m12) != D(i2,j;m22).
        const std::uint64_t* u = layers[m[0] - 1].links.row(i1);
        const std::uint64_t* v = layers[m[1] - 1].links.row(i1);
        const std::uint64_t* sj = layers[m[2] - 1].links.row(i2);
        const std::uint64_t* tj = layers[m[3] - 1].links.row(i2);
        js1.clear();
        js2.clear();
        for (int w = 0; w < words; ++w) {
          cand1[w] = (u[w] ^ sj[w]) & obs_pair[w];
          cand2[w] = (v[w] ^ tj[w]) & obs_pair[w];
        }
        for (int w = 0; w < words; ++w) {
          for (std::uint64_t bits = cand1[w]; bits; bits &= bits - 1) {
            js1.push_back((w << 6) + std::countr_zero(bits));
          }
          for (std::uint64_t bits = cand2[w]; bits; bits &= bits - 1) {
            js2.push_back((w << 6) + std::countr_zero(bits));
          }
        }
        if (js1.empty() || js2.empty()) continue;
        for (int j1 : js1) {
          bool a1 = (u[j1 >> 6] >> (j1 & 63)) & 1ULL;
          for (int j2 : js2) {
            if (j2 <= j1) continue;
            bool a2 = (v[j2 >> 6] >> (j2 & 63)) & 1ULL;
            if (a1 == a2) continue;  // differences cancel, |Z| < 1
            Tetrad t{i1, i2, j1, j2};
            const double* x11 = net.covariates(i1, j1);
            const double* x12 = net.covariates(i1, j2);
            const double* x21 = net.covariates(i2, j1);
            const double* x22 = net.covariates(i2, j2);
            for (int c = 0; c < k; ++c) {
              r[c] = (x11[c] - x12[c]) - (x21[c] - x22[c]);
            }
            out.push(a1, r, {loadings[s].data(), static_cast<std::size_t>(n_load)},
                     static_cast<int>(s), t);
          }
        }
      }
    }
  });

  InformativeSet result(k, n_load, cutoff_set);
  std::size_t total = 0;
  for (const auto& shard : shards) total += shard.set.size();
  result.reserve(total);
  for (const auto& shard : shards) {
    const InformativeSet& s = shard.set;
    for (std::size_t i = 0; i < s.size(); ++i) {
      result.push(s.y_star(i), s.r(i), s.threshold_loadings(i), s.spec_index(i),
                  s.tetrad(i));
    }
  }
  result.set_q_total(count_tetrads(n));
  return result;
}

void write_informative_csv(const InformativeSet& set,
                           const std::vector<std::string>& covariate_names,
                           std::ostream& out) {
  out << "y_star";
  for (int c = 0; c < set.n_covariates(); ++c) {
    if (c < static_cast<int>(covariate_names.size())) {
      out << ",r_" << covariate_names[c];
    } else {
      out << ",r_" << (c + 1);
    }
  }
  out << ",cutoff";
  for (int l = 0; l < set.n_loading_cols(); ++l) out << ",loading_" << (l + 2);
  out << ",i1,i2,j1,j2\n";
  out.precision(17);
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << (set.y_star(i) ? 1 : 0);
    for (double v : set.r(i)) out << ',' << v;
    out << ',' << set.cutoff(i).label();
    for (int v : set.threshold_loadings(i)) out << ',' << v;
    Tetrad t = set.tetrad(i);
    out << ',' << t.i1 << ',' << t.i2 << ',' << t.j1 << ',' << t.j2 << '\n';
  }
}

}  // namespace tetralogit
