// Copyright 2026 The arfcpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Typed tabular data: schema, CSV ingestion and emission, schema inference,
// and train/test splitting.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arf/error.hpp"
#include "arf/random.hpp"
#include "json.hpp"

namespace arf {

enum class ColumnKind { Continuous, Categorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> levels;  // Categorical only; order fixes the level index.

  bool is_categorical() const { return kind == ColumnKind::Categorical; }

  std::optional<std::size_t> level_index(std::string_view level) const {
    for (std::size_t k = 0; k < levels.size(); ++k)
      if (levels[k] == level) return k;
    return std::nullopt;
  }

  friend bool operator==(const Column&, const Column&) = default;
};

class Schema {
 public:
  Schema() = default;

  explicit Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
    std::set<std::string> names;
    for (const auto& c : columns_) {
      if (c.name.empty()) throw InvalidArgument("schema: empty column name");
      if (!names.insert(c.name).second)
        throw InvalidArgument("schema: duplicate column name '" + c.name + "'");
      if (c.is_categorical()) {
        if (c.levels.empty())
          throw InvalidArgument("schema: categorical column '" + c.name + "' has no levels");
        std::set<std::string> seen(c.levels.begin(), c.levels.end());
        if (seen.size() != c.levels.size())
          throw InvalidArgument("schema: duplicate level in column '" + c.name + "'");
      } else if (!c.levels.empty()) {
        throw InvalidArgument("schema: continuous column '" + c.name + "' has levels");
      }
    }
  }

  std::size_t size() const { return columns_.size(); }
  const Column& operator[](std::size_t j) const { return columns_[j]; }
  const std::vector<Column>& columns() const { return columns_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t j = 0; j < columns_.size(); ++j)
      if (columns_[j].name == name) return j;
    return std::nullopt;
  }

  std::size_t require_index(std::string_view name) const {
    if (auto j = index_of(name)) return *j;
    throw DataError("no column named '" + std::string(name) + "'");
  }

  // Schema with column `j` removed.
  Schema without(std::size_t j) const {
    std::vector<Column> cols = columns_;
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(j));
    return Schema(std::move(cols));
  }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Column> columns_;
};

// Column-major table. Continuous cells hold the value; categorical cells hold
// the level index as an exactly representable double.
class Dataset {
 public:
  Dataset() = default;

  Dataset(Schema schema, std::vector<std::vector<double>> columns)
      : schema_(std::move(schema)), columns_(std::move(columns)) {
    if (columns_.size() != schema_.size())
      throw InvalidArgument("dataset: column count does not match schema");
    rows_ = columns_.empty() ? 0 : columns_[0].size();
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (columns_[j].size() != rows_) throw InvalidArgument("dataset: ragged columns");
      const Column& col = schema_[j];
      for (double v : columns_[j]) {
        if (col.is_categorical()) {
          if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(col.levels.size()))
            throw DataError("dataset: invalid level index in column '" + col.name + "'");
        } else if (!std::isfinite(v)) {
          throw DataError("dataset: non-finite value in column '" + col.name + "'");
        }
      }
    }
  }

  const Schema& schema() const { return schema_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  bool empty() const { return rows_ == 0; }

  double operator()(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::size_t level(std::size_t row, std::size_t col) const {
    return static_cast<std::size_t>(columns_[col][row]);
  }
  std::span<const double> column(std::size_t col) const { return columns_[col]; }
  const std::vector<std::vector<double>>& columns() const { return columns_; }

  std::vector<double> row(std::size_t r) const {
    std::vector<double> out(cols());
    for (std::size_t j = 0; j < cols(); ++j) out[j] = columns_[j][r];
    return out;
  }

  Dataset select_rows(std::span<const std::size_t> idx) const {
    std::vector<std::vector<double>> cols(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      cols[j].reserve(idx.size());
      for (std::size_t i : idx) cols[j].push_back(columns_[j][i]);
    }
    return Dataset(schema_, std::move(cols));
  }

  Dataset select_columns(std::span<const std::size_t> idx) const {
    std::vector<Column> schema_cols;
    std::vector<std::vector<double>> cols;
    for (std::size_t j : idx) {
      schema_cols.push_back(schema_[j]);
      cols.push_back(columns_[j]);
    }
    return Dataset(Schema(std::move(schema_cols)), std::move(cols));
  }

  Dataset without_column(std::size_t j) const {
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < cols(); ++k)
      if (k != j) keep.push_back(k);
    return select_columns(keep);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
};

// Rows of `a` followed by rows of `b`; schemas must match.
inline Dataset concat_rows(const Dataset& a, const Dataset& b) {
  if (!(a.schema() == b.schema())) throw DataError("concat_rows: schema mismatch");
  std::vector<std::vector<double>> cols = a.columns();
  for (std::size_t j = 0; j < cols.size(); ++j)
    cols[j].insert(cols[j].end(), b.column(j).begin(), b.column(j).end());
  return Dataset(a.schema(), std::move(cols));
}

// ---------------------------------------------------------------------------
// Cell parsing and formatting

inline std::optional<double> parse_real(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Shortest representation that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// CSV

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  out.push_back(std::move(cell));
  return out;
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

// Reads a comma-separated file. With has_header=false, columns are named
// x1..xd.
inline RawTable read_csv_raw(const std::string& path, bool has_header = true) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  RawTable table;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (first && has_header) {
      table.header = std::move(cells);
    } else {
      if (first) {
        for (std::size_t j = 0; j < cells.size(); ++j)
          table.header.push_back("x" + std::to_string(j + 1));
      }
      if (cells.size() != table.header.size())
        throw DataError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields, found " +
                        std::to_string(cells.size()));
      table.rows.push_back(std::move(cells));
    }
    first = false;
  }
  if (table.header.empty()) throw DataError("'" + path + "' is empty");
  return table;
}

inline constexpr std::size_t kDefaultDistinctThreshold = 10;

// A column is Continuous iff every cell parses as a finite real and it has
// more than `threshold` distinct values; otherwise Categorical with sorted
// distinct strings as levels.
inline Schema infer_schema(const std::vector<std::vector<std::string>>& raw_rows,
                           const std::vector<std::string>& header,
                           std::size_t threshold = kDefaultDistinctThreshold) {
  if (header.empty() || raw_rows.empty()) throw DataError("infer_schema: empty table");
  for (std::size_t i = 0; i < raw_rows.size(); ++i)
    if (raw_rows[i].size() != header.size())
      throw DataError("infer_schema: row " + std::to_string(i + 1) + " has " +
                      std::to_string(raw_rows[i].size()) + " fields, header has " +
                      std::to_string(header.size()));
  std::vector<Column> cols;
  cols.reserve(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    std::set<std::string> distinct;
    bool numeric = true;
    for (const auto& row : raw_rows) {
      const std::string& cell = row[j];
      distinct.insert(cell);
      if (numeric && !cell.empty() && !parse_real(cell)) numeric = false;
    }
    Column c;
    c.name = header[j];
    if (numeric && distinct.size() > threshold) {
      c.kind = ColumnKind::Continuous;
    } else {
      c.kind = ColumnKind::Categorical;
      c.levels.assign(distinct.begin(), distinct.end());
    }
    cols.push_back(std::move(c));
  }
  return Schema(std::move(cols));
}

// Converts raw string cells into a Dataset under `schema`. Errors name the
// 1-based data row and the column.
inline Dataset parse_table(const RawTable& raw, const Schema& schema) {
  if (raw.header.size() != schema.size())
    throw DataError("header has " + std::to_string(raw.header.size()) + " columns, schema has " +
                    std::to_string(schema.size()));
  std::vector<std::size_t> to_schema(raw.header.size());
  for (std::size_t j = 0; j < raw.header.size(); ++j) {
    auto k = schema.index_of(raw.header[j]);
    if (!k) throw DataError("column '" + raw.header[j] + "' is not in the schema");
    to_schema[j] = *k;
  }
  std::vector<std::vector<double>> cols(schema.size(), std::vector<double>(raw.rows.size()));
  std::vector<std::unordered_map<std::string, std::size_t>> level_maps(schema.size());
  for (std::size_t k = 0; k < schema.size(); ++k)
    for (std::size_t l = 0; l < schema[k].levels.size(); ++l) level_maps[k][schema[k].levels[l]] = l;

  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    for (std::size_t j = 0; j < raw.header.size(); ++j) {
      const std::size_t k = to_schema[j];
      const std::string& cell = raw.rows[i][j];
      auto where = [&] {
        return "row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1) + " ('" +
               schema[k].name + "')";
      };
      if (cell.empty()) throw DataError(where() + ": missing value");
      if (schema[k].is_categorical()) {
        auto it = level_maps[k].find(cell);
        if (it == level_maps[k].end())
          throw DataError(where() + ": level '" + cell + "' not in schema");
        cols[k][i] = static_cast<double>(it->second);
      } else {
        auto v = parse_real(cell);
        if (!v) throw DataError(where() + ": cannot parse '" + cell + "' as a real");
        cols[k][i] = *v;
      }
    }
  }
  return Dataset(schema, std::move(cols));
}

struct CsvOptions {
  bool has_header = true;
  std::size_t distinct_threshold = kDefaultDistinctThreshold;
};

inline Dataset load_csv(const std::string& path, const std::optional<Schema>& schema = std::nullopt,
                        const CsvOptions& opts = {}) {
  RawTable raw = read_csv_raw(path, opts.has_header);
  if (raw.rows.empty()) throw DataError("'" + path + "' has no data rows");
  const Schema s = schema ? *schema : infer_schema(raw.rows, raw.header, opts.distinct_threshold);
  return parse_table(raw, s);
}

inline void write_csv(std::ostream& out, const Dataset& ds) {
  const Schema& s = ds.schema();
  for (std::size_t j = 0; j < s.size(); ++j)
    out << (j ? "," : "") << detail::quote_if_needed(s[j].name);
  out << '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j) out << ',';
      if (s[j].is_categorical())
        out << detail::quote_if_needed(s[j].levels[ds.level(i, j)]);
      else
        out << format_real(ds(i, j));
    }
    out << '\n';
  }
}

inline void save_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv(out, ds);
  if (!out) throw DataError("write failed for '" + path + "'");
}

// All-Boolean schema x1..xd with levels {0, 1}, as used by binary benchmark
// collections whose files carry no header.
inline Schema binary_schema(std::size_t d) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < d; ++j)
    cols.push_back({"x" + std::to_string(j + 1), ColumnKind::Categorical, {"0", "1"}});
  return Schema(std::move(cols));
}

// ---------------------------------------------------------------------------
// Schema sidecar: {"columns": [{"name": ..., "kind": "continuous" |
// "categorical", "levels": [...]}, ...]}

inline nlohmann::json schema_to_json(const Schema& s) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : s.columns()) {
    nlohmann::json jc = {{"name", c.name},
                         {"kind", c.is_categorical() ? "categorical" : "continuous"}};
    if (c.is_categorical()) jc["levels"] = c.levels;
    cols.push_back(std::move(jc));
  }
  return {{"columns", cols}};
}

inline Schema schema_from_json(const nlohmann::json& j) {
  try {
    std::vector<Column> cols;
    for (const auto& jc : j.at("columns")) {
      Column c;
      c.name = jc.at("name").get<std::string>();
      const auto kind = jc.at("kind").get<std::string>();
      if (kind == "categorical") {
        c.kind = ColumnKind::Categorical;
        c.levels = jc.at("levels").get<std::vector<std::string>>();
      } else if (kind == "continuous") {
        c.kind = ColumnKind::Continuous;
      } else {
        throw DataError("unknown column kind '" + kind + "'");
      }
      cols.push_back(std::move(c));
    }
    return Schema(std::move(cols));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
}

inline Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema '" + path + "': " + e.what());
  }
  return schema_from_json(j);
}

inline void save_schema(const std::string& path, const Schema& s) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << schema_to_json(s).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Splitting

struct TrainTest {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

namespace detail {
inline void shuffle(std::vector<std::size_t>& v, Engine& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}
}  // namespace detail

// Deterministic random split. With `stratify`, each level of that categorical
// column is split separately, so per-level proportions agree within one row.
inline TrainTest split_train_test(const Dataset& ds, double test_fraction, std::uint64_t seed,
                                  std::optional<std::size_t> stratify = std::nullopt) {
  if (ds.rows() < 2) throw InvalidArgument("split_train_test: need at least 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidArgument("split_train_test: test fraction must lie in (0, 1)");
  Engine rng = make_engine(seed, {stream::kSplit});

  std::vector<std::vector<std::size_t>> strata;
  if (stratify) {
    if (*stratify >= ds.cols() || !ds.schema()[*stratify].is_categorical())
      throw InvalidArgument("split_train_test: stratify column must be categorical");
    strata.resize(ds.schema()[*stratify].levels.size());
    for (std::size_t i = 0; i < ds.rows(); ++i) strata[ds.level(i, *stratify)].push_back(i);
    std::erase_if(strata, [](const auto& s) { return s.empty(); });
    for (const auto& s : strata)
      if (s.size() < 2) throw InvalidArgument("split_train_test: stratum with fewer than 2 rows");
  } else {
    strata.emplace_back(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) strata[0][i] = i;
  }

  TrainTest out;
  for (auto& s : strata) {
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(s.size())));
    if (stratify) n_test = std::clamp<std::size_t>(n_test, 1, s.size() - 1);
    if (n_test == 0 || n_test == s.size())
      throw InvalidArgument("split_train_test: test fraction leaves an empty part");
    detail::shuffle(s, rng);
    out.test_rows.insert(out.test_rows.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train_rows.insert(out.train_rows.end(), s.begin() + static_cast<std::ptrdiff_t>(n_test), s.end());
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = ds.select_rows(out.train_rows);
  out.test = ds.select_rows(out.test_rows);
  return out;
}

}  // namespace arf
