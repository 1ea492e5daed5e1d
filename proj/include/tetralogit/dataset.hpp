#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tetralogit/net_model.hpp"

namespace tetralogit {

// Builds one dyad covariate from node attributes or a dyad column:
//   match:attr    1{attr_i == attr_j}
//   both:attr     1{attr_i == 1 and attr_j == 1}, attr must be binary
//   absdiff:attr  |attr_i - attr_j|
//   sqdiff:attr   (attr_i - attr_j)^2
//   dyadcol:col   numeric column of the dyads file, passed through
struct CovariateRecipe {
  enum class Kind { Match, Both, AbsDiff, SqDiff, DyadCol };
  std::string name;
  Kind kind = Kind::Match;
  std::string attr;

  // Parses "name=kind:attr".
  static CovariateRecipe parse(const std::string& text);
};

struct DatasetBundle {
  std::string dyads_path;
  std::string nodes_path;  // optional; required by node-attribute recipes
  std::vector<CovariateRecipe> recipes;
  std::vector<int> missing_codes;
  // Optional explicit list of retained raw outcome values in ascending
  // order; raw values outside it (and not declared missing) are errors.
  // Empty: retained values are derived from the data.
  std::vector<int> category_map;
};

struct IngestResult {
  OrderedNetwork net;
  std::vector<std::string> node_ids;   // row order defines node indices
  std::vector<int> raw_categories;     // retained raw values, ascending;
                                       // raw_categories[m] maps to outcome m
  // Translates a cutoff given on the raw outcome scale to the internal
  // contiguous scale {1..M}; throws listing the valid values otherwise.
  int map_raw_cutoff(int raw) const;
};

IngestResult ingest(const DatasetBundle& bundle);

// Writes a network back to the dyads/nodes schema: dyads as
// sender,receiver,outcome plus one dyadcol column per covariate, missing
// outcomes as -1. Doubles are printed round-trip exact, so re-ingesting with
// dyadcol recipes and missing code -1 reproduces the network bit for bit.
void export_network(const OrderedNetwork& net, const std::vector<std::string>& node_ids,
                    const std::string& dyads_path, const std::string& nodes_path);

// Recipe list matching what export_network wrote.
DatasetBundle reingest_bundle(const OrderedNetwork& net, const std::string& dyads_path,
                              const std::string& nodes_path);

// Minimal strict CSV support (comma separated, optional double quotes).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

}  // namespace tetralogit
