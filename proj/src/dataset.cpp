#include "tetralogit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tetralogit {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw Error(ErrorCategory::Ingestion, msg);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) fail("unterminated quote in " + where);
  fields.push_back(trim(field));
  return fields;
}

long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail("expected an integer for " + what + ", got '" + s + "'");
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail("expected a number for " + what + ", got '" + s + "'");
}

}  // namespace

CovariateRecipe CovariateRecipe::parse(const std::string& text) {
  auto eq = text.find('=');
  auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos || colon < eq) {
    throw Error(ErrorCategory::Config,
                "recipe '" + text + "' is not of the form name=kind:attr");
  }
  CovariateRecipe r;
  r.name = trim(text.substr(0, eq));
  std::string kind = trim(text.substr(eq + 1, colon - eq - 1));
  r.attr = trim(text.substr(colon + 1));
  if (r.name.empty() || r.attr.empty()) {
    throw Error(ErrorCategory::Config, "recipe '" + text + "' has an empty name or attribute");
  }
  if (kind == "match") {
    r.kind = Kind::Match;
  } else if (kind == "both") {
    r.kind = Kind::Both;
  } else if (kind == "absdiff") {
    r.kind = Kind::AbsDiff;
  } else if (kind == "sqdiff") {
    r.kind = Kind::SqDiff;
  } else if (kind == "dyadcol") {
    r.kind = Kind::DyadCol;
  } else {
    throw Error(ErrorCategory::Config, "unknown recipe kind '" + kind + "'");
  }
  return r;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return static_cast<int>(c);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) fail(path + " is empty");
  table.header = split_csv_line(line, path + " header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, path + ":" + std::to_string(line_no));
    if (fields.size() != table.header.size()) {
      fail(path + ":" + std::to_string(line_no) + " has " +
           std::to_string(fields.size()) + " fields, header has " +
           std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

int IngestResult::map_raw_cutoff(int raw) const {
  for (std::size_t m = 1; m < raw_categories.size(); ++m) {
    if (raw_categories[m] == raw) return static_cast<int>(m);
  }
  std::string valid;
  for (std::size_t m = 1; m < raw_categories.size(); ++m) {
    if (!valid.empty()) valid += ", ";
    valid += std::to_string(raw_categories[m]);
  }
  throw Error(ErrorCategory::InvalidCutoff,
              "cutoff " + std::to_string(raw) +
                  " is not a retained outcome level; valid cutoffs: " + valid);
}

IngestResult ingest(const DatasetBundle& bundle) {
  CsvTable dyads = read_csv(bundle.dyads_path);
  int c_sender = dyads.column("sender");
  int c_receiver = dyads.column("receiver");
  int c_outcome = dyads.column("outcome");
  if (c_sender < 0 || c_receiver < 0 || c_outcome < 0) {
    fail(bundle.dyads_path + " must have columns sender,receiver,outcome");
  }

  std::optional<CsvTable> nodes;
  std::vector<std::string> node_ids;
  std::unordered_map<std::string, int> node_index;
  if (!bundle.nodes_path.empty()) {
    nodes = read_csv(bundle.nodes_path);
    int c_id = nodes->column("node_id");
    if (c_id < 0) fail(bundle.nodes_path + " must have a node_id column");
    for (const auto& row : nodes->rows) {
      const std::string& id = row[c_id];
      if (node_index.count(id)) fail("duplicate node_id '" + id + "'");
      node_index[id] = static_cast<int>(node_ids.size());
      node_ids.push_back(id);
    }
  } else {
    std::set<std::string> seen;
    for (const auto& row : dyads.rows) {
      seen.insert(row[c_sender]);
      seen.insert(row[c_receiver]);
    }
    for (const auto& id : seen) {
      node_index[id] = static_cast<int>(node_ids.size());
      node_ids.push_back(id);
    }
  }
  const int n = static_cast<int>(node_ids.size());
  if (n < 2) fail("dataset has fewer than two nodes");

  auto resolve = [&](const std::string& id) {
    auto it = node_index.find(id);
    if (it == node_index.end()) fail("node '" + id + "' not present in the nodes file");
    return it->second;
  };

  // First pass: outcomes, missingness, category remapping.
  std::unordered_set<int> missing(bundle.missing_codes.begin(), bundle.missing_codes.end());
  std::set<int> retained;
  struct RawDyad {
    int i, j;
    long raw;
    std::size_t row;
  };
  std::vector<RawDyad> raw_dyads;
  std::set<std::pair<int, int>> seen_dyads;
  for (std::size_t r = 0; r < dyads.rows.size(); ++r) {
    const auto& row = dyads.rows[r];
    int i = resolve(row[c_sender]);
    int j = resolve(row[c_receiver]);
    if (i == j) fail("self-loop dyad at " + bundle.dyads_path + " data row " + std::to_string(r + 1));
    if (!seen_dyads.insert({i, j}).second) {
      fail("duplicate dyad (" + row[c_sender] + "," + row[c_receiver] + ")");
    }
    long raw = parse_int(row[c_outcome], "outcome");
    if (!missing.count(static_cast<int>(raw))) retained.insert(static_cast<int>(raw));
    raw_dyads.push_back({i, j, raw, r});
  }

  std::vector<int> raw_categories;
  if (!bundle.category_map.empty()) {
    raw_categories = bundle.category_map;
    if (!std::is_sorted(raw_categories.begin(), raw_categories.end())) {
      fail("category map must be strictly ascending");
    }
    std::string offenders;
    for (int v : retained) {
      if (!std::binary_search(raw_categories.begin(), raw_categories.end(), v)) {
        offenders += (offenders.empty() ? "" : ", ") + std::to_string(v);
      }
    }
    if (!offenders.empty()) fail("unmapped raw outcome values: " + offenders);
  } else {
    raw_categories.assign(retained.begin(), retained.end());
  }
  if (raw_categories.size() < 2) {
    fail("need at least two retained outcome levels, got " +
         std::to_string(raw_categories.size()));
  }
  std::map<int, int> remap;
  for (std::size_t m = 0; m < raw_categories.size(); ++m) {
    remap[raw_categories[m]] = static_cast<int>(m);
  }
  const int n_categories = static_cast<int>(raw_categories.size()) - 1;

  // Covariates.
  const int k = static_cast<int>(bundle.recipes.size());
  std::vector<std::string> names;
  for (const auto& rec : bundle.recipes) names.push_back(rec.name);

  std::vector<int> attr_cols(bundle.recipes.size(), -1);
  for (std::size_t c = 0; c < bundle.recipes.size(); ++c) {
    const auto& rec = bundle.recipes[c];
    if (rec.kind == CovariateRecipe::Kind::DyadCol) {
      attr_cols[c] = dyads.column(rec.attr);
      if (attr_cols[c] < 0) fail("dyads file has no column '" + rec.attr + "'");
    } else {
      if (!nodes) fail("recipe " + rec.name + " needs a nodes file");
      attr_cols[c] = nodes->column(rec.attr);
      if (attr_cols[c] < 0) fail("nodes file has no column '" + rec.attr + "'");
    }
  }

  auto node_attr = [&](int node, int col) -> const std::string& {
    return nodes->rows[node][col];
  };
  auto numeric_attr = [&](int node, int col, const std::string& attr) {
    return parse_double(node_attr(node, col), "attribute " + attr);
  };

  OrderedNetwork net(n, n_categories, names);
  std::vector<double> x(static_cast<std::size_t>(k));
  for (const auto& d : raw_dyads) {
    for (std::size_t c = 0; c < bundle.recipes.size(); ++c) {
      const auto& rec = bundle.recipes[c];
      switch (rec.kind) {
        case CovariateRecipe::Kind::Match:
          x[c] = node_attr(d.i, attr_cols[c]) == node_attr(d.j, attr_cols[c]) ? 1.0 : 0.0;
          break;
        case CovariateRecipe::Kind::Both: {
          double a = numeric_attr(d.i, attr_cols[c], rec.attr);
          double b = numeric_attr(d.j, attr_cols[c], rec.attr);
          if ((a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0)) {
            fail("attribute '" + rec.attr + "' must be 0/1 for the both: recipe");
          }
          x[c] = (a == 1.0 && b == 1.0) ? 1.0 : 0.0;
          break;
        }
        case CovariateRecipe::Kind::AbsDiff:
          x[c] = std::abs(numeric_attr(d.i, attr_cols[c], rec.attr) -
                          numeric_attr(d.j, attr_cols[c], rec.attr));
          break;
        case CovariateRecipe::Kind::SqDiff: {
          double diff = numeric_attr(d.i, attr_cols[c], rec.attr) -
                        numeric_attr(d.j, attr_cols[c], rec.attr);
          x[c] = diff * diff;
          break;
        }
        case CovariateRecipe::Kind::DyadCol:
          x[c] = parse_double(dyads.rows[d.row][attr_cols[c]], "column " + rec.attr);
          break;
      }
    }
    int outcome = OrderedNetwork::kMissing;
    if (!missing.count(static_cast<int>(d.raw))) {
      outcome = remap.at(static_cast<int>(d.raw));
    }
    net.set_dyad(d.i, d.j, outcome, x);
  }

  return IngestResult{std::move(net), std::move(node_ids), std::move(raw_categories)};
}

void export_network(const OrderedNetwork& net, const std::vector<std::string>& node_ids,
                    const std::string& dyads_path, const std::string& nodes_path) {
  if (static_cast<int>(node_ids.size()) != net.n_nodes()) {
    throw Error(ErrorCategory::Config, "node id list does not match network size");
  }
  std::ofstream nf(nodes_path);
  if (!nf) fail("cannot write " + nodes_path);
  nf << "node_id\n";
  for (const auto& id : node_ids) nf << id << "\n";

  std::ofstream df(dyads_path);
  if (!df) fail("cannot write " + dyads_path);
  df.precision(17);
  df << "sender,receiver,outcome";
  for (const auto& name : net.covariate_names()) df << ',' << name;
  df << '\n';
  for (int i = 0; i < net.n_nodes(); ++i) {
    for (int j = 0; j < net.n_nodes(); ++j) {
      if (i == j) continue;
      if (!net.is_observed(i, j) && !net.has_covariates(i, j)) continue;
      df << node_ids[i] << ',' << node_ids[j] << ','
         << (net.is_observed(i, j) ? net.outcome(i, j) : -1);
      const double* x = net.covariates(i, j);
      for (int c = 0; c < net.n_covariates(); ++c) df << ',' << x[c];
      df << '\n';
    }
  }
}

DatasetBundle reingest_bundle(const OrderedNetwork& net, const std::string& dyads_path,
                              const std::string& nodes_path) {
  DatasetBundle b;
  b.dyads_path = dyads_path;
  b.nodes_path = nodes_path;
  b.missing_codes = {-1};
  // Pin the category range so empty categories survive the round trip.
  for (int m = 0; m <= net.n_categories(); ++m) b.category_map.push_back(m);
  for (const auto& name : net.covariate_names()) {
    CovariateRecipe r;
    r.name = name;
    r.kind = CovariateRecipe::Kind::DyadCol;
    r.attr = name;
    b.recipes.push_back(r);
  }
  return b;
}

}  // namespace tetralogit
