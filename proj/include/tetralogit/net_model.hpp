#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tetralogit/errors.hpp"

namespace tetralogit {

// Row-packed bit matrix. Tetrad scans read four bits per candidate, so rows
// are kept contiguous in 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
        data_(static_cast<std::size_t>(rows) * words_per_row_, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int words_per_row() const { return words_per_row_; }

  bool get(int i, int j) const {
    return (row(i)[j >> 6] >> (j & 63)) & 1ULL;
  }
  void set(int i, int j, bool value) {
    std::uint64_t& w = data_[static_cast<std::size_t>(i) * words_per_row_ + (j >> 6)];
    std::uint64_t bit = 1ULL << (j & 63);
    if (value) {
      w |= bit;
    } else {
      w &= ~bit;
    }
  }
  const std::uint64_t* row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * words_per_row_;
  }
  std::int64_t count_row(int i) const;
  std::int64_t count() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> data_;
};

// Directed dyadic dataset with ordered outcomes in {0..M} (or missing) and a
// fixed-length covariate vector per dyad. Immutable once built; construction
// happens through set_dyad calls on a single thread.
class OrderedNetwork {
 public:
  static constexpr int kMissing = -1;

  OrderedNetwork(int n_nodes, int n_categories,
                 std::vector<std::string> covariate_names);

  int n_nodes() const { return n_nodes_; }
  int n_categories() const { return n_categories_; }
  int n_covariates() const { return k_; }
  const std::vector<std::string>& covariate_names() const { return covariate_names_; }

  // outcome may be kMissing; x must have length k. Self loops are rejected.
  void set_dyad(int i, int j, int outcome, std::span<const double> x);

  bool is_observed(int i, int j) const {
    return i != j && outcomes_[idx(i, j)] >= 0;
  }
  // kMissing when unobserved.
  int outcome(int i, int j) const { return outcomes_[idx(i, j)]; }
  const double* covariates(int i, int j) const {
    return covariates_.data() + idx(i, j) * k_;
  }
  bool has_covariates(int i, int j) const { return covariate_set_[idx(i, j)] != 0; }

  std::int64_t n_observed_dyads() const;

  // Relabels nodes: node i of the result is node perm[i] of *this.
  OrderedNetwork permuted(const std::vector<int>& perm) const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_nodes_ + j;
  }

  int n_nodes_;
  int n_categories_;
  int k_;
  std::vector<std::string> covariate_names_;
  std::vector<std::int16_t> outcomes_;   // kMissing where unobserved
  std::vector<std::uint8_t> covariate_set_;
  std::vector<double> covariates_;
};

// One binarized layer D_ij(m) = 1{Y_ij >= m} plus the observation mask.
struct BinaryLayer {
  int cutoff = 0;
  BitMatrix links;
  BitMatrix observed;
};

struct DegreeSummary {
  int cutoff = 0;
  double mean = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

BinaryLayer binarize(const OrderedNetwork& net, int cutoff);

// Statistics of node-level outgoing degree shares (out-degree over observed
// partners); nodes with no observed partner are excluded.
DegreeSummary degree_summary(const BinaryLayer& layer);

}  // namespace tetralogit
