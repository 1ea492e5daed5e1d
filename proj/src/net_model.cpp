#include "tetralogit/net_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "tetralogit/util.hpp"

namespace tetralogit {

const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::InvalidCutoff: return "invalid-cutoff";
    case ErrorCategory::TooFewNodes: return "too-few-nodes";
    case ErrorCategory::EmptyNetwork: return "empty-network";
    case ErrorCategory::NoInformation: return "no-information";
    case ErrorCategory::Separation: return "separation";
    case ErrorCategory::RankDeficiency: return "rank-deficiency";
    case ErrorCategory::Ingestion: return "ingestion";
    case ErrorCategory::Dgp: return "dgp";
  }
  return "unknown";
}

std::int64_t BitMatrix::count_row(int i) const {
  std::int64_t c = 0;
  const std::uint64_t* r = row(i);
  for (int w = 0; w < words_per_row_; ++w) c += std::popcount(r[w]);
  return c;
}

std::int64_t BitMatrix::count() const {
  std::int64_t c = 0;
  for (int i = 0; i < rows_; ++i) c += count_row(i);
  return c;
}

OrderedNetwork::OrderedNetwork(int n_nodes, int n_categories,
                               std::vector<std::string> covariate_names)
    : n_nodes_(n_nodes),
      n_categories_(n_categories),
      k_(static_cast<int>(covariate_names.size())),
      covariate_names_(std::move(covariate_names)),
      outcomes_(static_cast<std::size_t>(n_nodes) * n_nodes, kMissing),
      covariate_set_(static_cast<std::size_t>(n_nodes) * n_nodes, 0),
      covariates_(static_cast<std::size_t>(n_nodes) * n_nodes * k_, 0.0) {
  if (n_nodes < 2) {
    throw Error(ErrorCategory::Config, "network needs at least two nodes");
  }
  if (n_categories < 1) {
    throw Error(ErrorCategory::Config,
                "n_categories must be at least 1 (outcomes live in {0..M})");
  }
}

void OrderedNetwork::set_dyad(int i, int j, int outcome, std::span<const double> x) {
  if (i < 0 || i >= n_nodes_ || j < 0 || j >= n_nodes_) {
    throw Error(ErrorCategory::Config, "dyad node id out of range");
  }
  if (i == j) {
    throw Error(ErrorCategory::Config, "self-loop dyads are not allowed");
  }
  if (outcome != kMissing && (outcome < 0 || outcome > n_categories_)) {
    throw Error(ErrorCategory::Config,
                "outcome " + std::to_string(outcome) + " outside {0.." +
                    std::to_string(n_categories_) + "}");
  }
  if (static_cast<int>(x.size()) != k_) {
    throw Error(ErrorCategory::Config,
                "covariate vector has length " + std::to_string(x.size()) +
                    ", expected " + std::to_string(k_));
  }
  outcomes_[idx(i, j)] = static_cast<std::int16_t>(outcome);
  covariate_set_[idx(i, j)] = 1;
  std::copy(x.begin(), x.end(), covariates_.begin() + idx(i, j) * k_);
}

std::int64_t OrderedNetwork::n_observed_dyads() const {
  std::int64_t c = 0;
  for (auto o : outcomes_) c += (o >= 0);
  return c;
}

OrderedNetwork OrderedNetwork::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_nodes_) {
    throw Error(ErrorCategory::Config, "permutation size mismatch");
  }
  OrderedNetwork out(n_nodes_, n_categories_, covariate_names_);
  for (int i = 0; i < n_nodes_; ++i) {
    for (int j = 0; j < n_nodes_; ++j) {
      if (i == j) continue;
      int pi = perm[i], pj = perm[j];
      if (covariate_set_[idx(pi, pj)] || outcomes_[idx(pi, pj)] >= 0) {
        out.set_dyad(i, j, outcomes_[idx(pi, pj)],
                     {covariates(pi, pj), static_cast<std::size_t>(k_)});
      }
    }
  }
  return out;
}

BinaryLayer binarize(const OrderedNetwork& net, int cutoff) {
  if (cutoff < 1 || cutoff > net.n_categories()) {
    throw Error(ErrorCategory::InvalidCutoff,
                "cutoff " + std::to_string(cutoff) + " outside {1.." +
                    std::to_string(net.n_categories()) + "}");
  }
  const int n = net.n_nodes();
  BinaryLayer layer;
  layer.cutoff = cutoff;
  layer.links = BitMatrix(n, n);
  layer.observed = BitMatrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !net.is_observed(i, j)) continue;
      layer.observed.set(i, j, true);
      if (net.outcome(i, j) >= cutoff) layer.links.set(i, j, true);
    }
  }
  return layer;
}

DegreeSummary degree_summary(const BinaryLayer& layer) {
  const int n = layer.links.rows();
  std::vector<double> shares;
  shares.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::int64_t partners = layer.observed.count_row(i);
    if (partners == 0) continue;
    shares.push_back(static_cast<double>(layer.links.count_row(i)) /
                     static_cast<double>(partners));
  }
  if (shares.empty()) {
    throw Error(ErrorCategory::EmptyNetwork, "no observed dyads in layer");
  }
  std::sort(shares.begin(), shares.end());
  DegreeSummary s;
  s.cutoff = layer.cutoff;
  double sum = 0.0;
  for (double v : shares) sum += v;
  s.mean = sum / static_cast<double>(shares.size());
  s.q25 = quantile_sorted(shares, 0.25);
  s.median = quantile_sorted(shares, 0.5);
  s.q75 = quantile_sorted(shares, 0.75);
  s.min = shares.front();
  s.max = shares.back();
  return s;
}

}  // namespace tetralogit
