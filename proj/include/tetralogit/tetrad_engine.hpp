#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tetralogit/net_model.hpp"

namespace tetralogit {

// Four distinct nodes: two senders, two receivers, canonically oriented with
// i1 < i2 and j1 < j2. The other orientations carry no extra information
// because flipping one pair negates both the difference statistic and the
// differenced covariates.
struct Tetrad {
  int i1, i2, j1, j2;
};

// Cutoff assignment for the four dyads (i1,j1), (i1,j2), (i2,j1), (i2,j2).
//   Uniform:    one common cutoff m            (flexible two-way effects)
//   SenderPair: m for sender i1, m' for i2     (sender-specific thresholds)
//   Vector:     free (m11, m12, m21, m22)      (additive effects, common
//                                               thresholds; identifies the
//                                               threshold gaps as well)
class CutoffSpec {
 public:
  enum class Kind { Uniform, SenderPair, Vector };

  static CutoffSpec uniform(int m) { return {Kind::Uniform, {m, m, m, m}}; }
  static CutoffSpec sender_pair(int m, int m_prime) {
    return {Kind::SenderPair, {m, m, m_prime, m_prime}};
  }
  static CutoffSpec vector(int m11, int m12, int m21, int m22) {
    return {Kind::Vector, {m11, m12, m21, m22}};
  }

  Kind kind() const { return kind_; }
  // Cutoffs in dyad order (i1,j1), (i1,j2), (i2,j1), (i2,j2).
  const std::array<int, 4>& components() const { return m_; }
  int uniform_cutoff() const { return m_[0]; }

  // Compact descriptor used in CSV dumps and JSON reports, e.g. "u2",
  // "s2,1", "v2,1,1,1".
  std::string label() const;

  friend bool operator==(const CutoffSpec& a, const CutoffSpec& b) {
    return a.kind_ == b.kind_ && a.m_ == b.m_;
  }
  friend bool operator<(const CutoffSpec& a, const CutoffSpec& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    return a.m_ < b.m_;
  }

 private:
  CutoffSpec(Kind kind, std::array<int, 4> m) : kind_(kind), m_(m) {}
  Kind kind_;
  std::array<int, 4> m_;
};

enum class SpecFamily { Main, Additive, SenderHet };

// One informative tetrad-cutoff record. Views into the owning InformativeSet;
// do not outlive it.
struct TetradObservation {
  bool y_star;                       // 1{Z = +1}
  std::span<const double> r;         // differenced covariates
  std::span<const std::int8_t> threshold_loadings;  // empty unless additive
  CutoffSpec cutoff;
  Tetrad tetrad;

  std::array<std::pair<int, int>, 4> dyads() const {
    return {{{tetrad.i1, tetrad.j1},
             {tetrad.i1, tetrad.j2},
             {tetrad.i2, tetrad.j1},
             {tetrad.i2, tetrad.j2}}};
  }
};

// Struct-of-arrays store for informative tetrad-cutoff pairs. Enumeration in
// extract_informative streams tetrads and materializes only these.
class InformativeSet {
 public:
  InformativeSet(int k, int n_loading_cols, std::vector<CutoffSpec> specs)
      : k_(k), n_loading_cols_(n_loading_cols), specs_(std::move(specs)) {}

  std::size_t size() const { return y_.size(); }
  int n_covariates() const { return k_; }
  int n_loading_cols() const { return n_loading_cols_; }
  std::int64_t q_total() const { return q_total_; }
  const std::vector<CutoffSpec>& specs() const { return specs_; }

  bool y_star(std::size_t i) const { return y_[i] != 0; }
  std::span<const double> r(std::size_t i) const {
    return {r_flat_.data() + i * k_, static_cast<std::size_t>(k_)};
  }
  std::span<const std::int8_t> threshold_loadings(std::size_t i) const {
    return {loadings_.data() + i * n_loading_cols_,
            static_cast<std::size_t>(n_loading_cols_)};
  }
  const CutoffSpec& cutoff(std::size_t i) const { return specs_[spec_index_[i]]; }
  int spec_index(std::size_t i) const { return spec_index_[i]; }
  Tetrad tetrad(std::size_t i) const {
    const auto& n = nodes_[i];
    return {n[0], n[1], n[2], n[3]};
  }
  TetradObservation observation(std::size_t i) const {
    return {y_star(i), r(i), threshold_loadings(i), cutoff(i), tetrad(i)};
  }

  std::map<CutoffSpec, std::int64_t> counts_per_cutoff() const;
  std::int64_t count_for(const CutoffSpec& spec) const;

  // Appends one observation; used by the extractor and by test fixtures.
  void push(bool y_star, std::span<const double> r,
            std::span<const std::int8_t> loadings, int spec_index, Tetrad t);
  void set_q_total(std::int64_t q) { q_total_ = q; }
  void reserve(std::size_t n);

 private:
  int k_;
  int n_loading_cols_;
  std::vector<CutoffSpec> specs_;
  std::int64_t q_total_ = 0;
  std::vector<double> r_flat_;
  std::vector<std::int8_t> loadings_;
  std::vector<std::uint8_t> y_;
  std::vector<std::int32_t> spec_index_;
  std::vector<std::array<std::uint16_t, 4>> nodes_;
};

// Number of canonical tetrads, C(N,2) * C(N-2,2).
std::int64_t count_tetrads(int n_nodes);

// Raw difference-in-differences statistic in {-1, -1/2, 0, 1/2, 1}.
inline double tetrad_statistic(bool d11, bool d12, bool d21, bool d22) {
  return 0.5 * ((static_cast<int>(d11) - static_cast<int>(d12)) -
                (static_cast<int>(d21) - static_cast<int>(d22)));
}

// Statistic for a tetrad under a cutoff spec, reading from binarized layers
// indexed by cutoff (layers[m-1].cutoff == m). nullopt when any of the four
// dyads is unobserved (the tetrad is skipped, not an error).
std::optional<double> tetrad_statistic(const std::vector<BinaryLayer>& layers,
                                       const Tetrad& t, const CutoffSpec& spec);

// r = (X_{i1,j1} - X_{i1,j2}) - (X_{i2,j1} - X_{i2,j2});
// nullopt when any dyad lacks covariates.
std::optional<std::vector<double>> differenced_covariates(
    const OrderedNetwork& net, const Tetrad& t);

struct ExtractOptions {
  int threads = 0;  // 0 = hardware concurrency
};

// Enumerates canonical tetrads against every cutoff spec and collects the
// informative ones (|Z| = 1) with their differenced covariates. For the
// additive family each observation also carries integer loadings on the
// thresholds (lambda_2..lambda_M, lambda_1 normalized to zero) so that the
// pooled model reduces to a plain logit on an augmented design.
InformativeSet extract_informative(const OrderedNetwork& net, SpecFamily family,
                                   const std::vector<CutoffSpec>& cutoff_set,
                                   const ExtractOptions& options = {});

// Convenience builders for the default cutoff sets of each family.
std::vector<CutoffSpec> uniform_cutoffs(const std::vector<int>& ms);
std::vector<CutoffSpec> sender_pair_grid(int n_categories);
std::vector<CutoffSpec> vector_grid(int n_categories);

// Debug dump: y_star, r_1..r_k, cutoff, loading_2..loading_M, i1, i2, j1, j2.
void write_informative_csv(const InformativeSet& set,
                           const std::vector<std::string>& covariate_names,
                           std::ostream& out);

}  // namespace tetralogit
