// Copyright 2026 The modelsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Typed in-memory tabular data and CSV ingestion.
//
// Every column stores its values as doubles. Categorical columns store level
// indices (0, 1, ...) into an ordered level list, so model code can treat all
// columns uniformly and effect code can overwrite a column with a grid value
// regardless of its kind.

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "modelsum/error.hpp"

namespace modelsum {

enum class ColumnKind { numeric, categorical };

inline std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

class Column {
 public:
  static Column numeric(std::string name, std::vector<double> values) {
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw Error("non-finite value in numeric column " + name);
      }
    }
    Column c;
    c.name_ = std::move(name);
    c.kind_ = ColumnKind::numeric;
    c.values_ = std::move(values);
    return c;
  }

  static Column categorical(std::string name, std::vector<std::uint32_t> codes,
                            std::vector<std::string> levels) {
    Column c;
    c.name_ = std::move(name);
    c.kind_ = ColumnKind::categorical;
    c.values_.reserve(codes.size());
    for (std::uint32_t code : codes) {
      if (code >= levels.size()) {
        throw Error("level index out of range in column " + c.name_);
      }
      c.values_.push_back(static_cast<double>(code));
    }
    c.levels_ = std::move(levels);
    c.check_unique_levels();
    return c;
  }

  /// Encodes strings as levels. Level order is `declared_levels` when given,
  /// otherwise first appearance.
  static Column categorical_from_strings(
      std::string name, const std::vector<std::string>& values,
      std::optional<std::vector<std::string>> declared_levels = std::nullopt) {
    std::vector<std::string> levels;
    std::unordered_map<std::string, std::uint32_t> index;
    if (declared_levels) {
      levels = *declared_levels;
      for (std::uint32_t i = 0; i < levels.size(); ++i) index.emplace(levels[i], i);
    }
    std::vector<std::uint32_t> codes;
    codes.reserve(values.size());
    for (const auto& v : values) {
      auto it = index.find(v);
      if (it == index.end()) {
        if (declared_levels) {
          throw Error("value '" + v + "' is not a declared level of column " + name);
        }
        it = index.emplace(v, static_cast<std::uint32_t>(levels.size())).first;
        levels.push_back(v);
      }
      codes.push_back(it->second);
    }
    return categorical(std::move(name), std::move(codes), std::move(levels));
  }

  const std::string& name() const { return name_; }
  ColumnKind kind() const { return kind_; }
  bool is_numeric() const { return kind_ == ColumnKind::numeric; }
  bool is_categorical() const { return kind_ == ColumnKind::categorical; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t row) const { return values_[row]; }

  const std::vector<std::string>& levels() const { return levels_; }
  std::size_t n_levels() const { return levels_.size(); }
  std::uint32_t code(std::size_t row) const {
    return static_cast<std::uint32_t>(values_[row]);
  }
  const std::string& level(std::size_t row) const { return levels_[code(row)]; }

  std::optional<std::uint32_t> level_index(std::string_view level) const {
    for (std::uint32_t i = 0; i < levels_.size(); ++i) {
      if (levels_[i] == level) return i;
    }
    return std::nullopt;
  }

  /// Same name, kind and levels; values taken from `rows` in order.
  Column subset(std::span<const std::size_t> rows) const {
    Column c;
    c.name_ = name_;
    c.kind_ = kind_;
    c.levels_ = levels_;
    c.values_.reserve(rows.size());
    for (std::size_t r : rows) c.values_.push_back(values_[r]);
    return c;
  }

  /// Same name, kind and levels with new raw values (level codes for
  /// categorical columns). Values are trusted to respect the invariants.
  Column with_values(std::vector<double> values) const {
    Column c;
    c.name_ = name_;
    c.kind_ = kind_;
    c.levels_ = levels_;
    c.values_ = std::move(values);
    return c;
  }

  friend bool operator==(const Column&, const Column&) = default;

 private:
  void check_unique_levels() const {
    std::unordered_map<std::string_view, int> seen;
    for (const auto& l : levels_) {
      if (!seen.emplace(l, 0).second) {
        throw Error("duplicate level '" + l + "' in column " + name_);
      }
    }
  }

  std::string name_;
  ColumnKind kind_ = ColumnKind::numeric;
  std::vector<double> values_;
  std::vector<std::string> levels_;
};

class Frame {
 public:
  Frame() = default;

  explicit Frame(std::vector<Column> columns) : columns_(std::move(columns)) {
    n_rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].size() != n_rows_) {
        throw Error("column " + columns_[i].name() + " has " +
                    std::to_string(columns_[i].size()) + " rows, expected " +
                    std::to_string(n_rows_));
      }
      if (!index_.emplace(columns_[i].name(), i).second) {
        throw Error("duplicate column name " + columns_[i].name());
      }
    }
  }

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }

  bool has_column(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
  }

  std::size_t column_index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error("no column named " + std::string(name));
    return it->second;
  }

  const Column& column(std::string_view name) const {
    return columns_[column_index(name)];
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name());
    return out;
  }

  Frame rows(std::span<const std::size_t> row_ids) const {
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) cols.push_back(c.subset(row_ids));
    Frame f(std::move(cols));
    f.n_rows_ = row_ids.size();
    return f;
  }

  /// Copy of this frame with column `i` replaced.
  Frame with_column(std::size_t i, Column column) const {
    Frame f = *this;
    if (column.size() != n_rows_) throw Error("replacement column has wrong length");
    if (column.name() != columns_.at(i).name()) {
      f.index_.erase(columns_[i].name());
      f.index_.emplace(column.name(), i);
    }
    f.columns_[i] = std::move(column);
    return f;
  }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.n_rows_ == b.n_rows_ && a.columns_ == b.columns_;
  }

 private:
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_rows_ = 0;
};

namespace csv {

/// Splits RFC-4180 content into records of fields. Quoted fields may contain
/// commas, doubled quotes and line breaks. CRLF and LF both end a record.
inline std::vector<std::vector<std::string>> parse_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw Error("unterminated quoted field in CSV");
  if (field_started || !record.empty()) end_record();
  return records;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline std::string quote(std::string_view s) {
  bool needs = s.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace csv

using SchemaOverrides = std::map<std::string, ColumnKind>;

inline Frame parse_csv(std::string_view text, const SchemaOverrides& overrides = {}) {
  auto records = csv::parse_records(text);
  if (records.empty()) throw Error("empty CSV input");
  const auto& header = records.front();
  std::unordered_map<std::string, int> seen;
  for (const auto& name : header) {
    if (!seen.emplace(name, 0).second) throw Error("duplicate header name " + name);
  }
  for (const auto& [name, kind] : overrides) {
    if (!seen.count(name)) throw Error("schema override for unknown column " + name);
  }
  const std::size_t n_cols = header.size();
  const std::size_t n_rows = records.size() - 1;
  std::vector<std::vector<std::string>> fields(n_cols);
  for (auto& f : fields) f.reserve(n_rows);
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() != n_cols) {
      throw Error("row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                  " fields, expected " + std::to_string(n_cols));
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (rec[c].empty() || rec[c] == "NA") {
        throw Error("missing value at row " + std::to_string(r) + ", column " + header[c]);
      }
      fields[c].push_back(std::move(rec[c]));
    }
  }

  std::vector<Column> columns;
  columns.reserve(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    auto override_it = overrides.find(header[c]);
    std::vector<double> parsed;
    parsed.reserve(n_rows);
    std::size_t first_bad = n_rows;
    for (std::size_t r = 0; r < n_rows; ++r) {
      auto v = csv::parse_double(fields[c][r]);
      if (!v) {
        first_bad = r;
        break;
      }
      parsed.push_back(*v);
    }
    ColumnKind kind = first_bad == n_rows ? ColumnKind::numeric : ColumnKind::categorical;
    if (override_it != overrides.end()) {
      if (override_it->second == ColumnKind::numeric && first_bad != n_rows) {
        throw Error("unparseable numeric at row " + std::to_string(first_bad + 1) +
                    ", column " + header[c]);
      }
      kind = override_it->second;
    }
    if (kind == ColumnKind::numeric) {
      columns.push_back(Column::numeric(header[c], std::move(parsed)));
    } else {
      columns.push_back(Column::categorical_from_strings(header[c], fields[c]));
    }
  }
  Frame frame(std::move(columns));
  if (frame.n_cols() > 0 && frame.n_rows() != n_rows) throw Error("inconsistent CSV rows");
  return frame;
}

inline Frame load_csv(const std::string& path, const SchemaOverrides& overrides = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), overrides);
}

inline void write_csv(std::ostream& out, const Frame& frame) {
  const auto& cols = frame.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out << ',';
    out << csv::quote(cols[c].name());
  }
  out << '\n';
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      if (cols[c].is_numeric()) {
        out << csv::format_double(cols[c][r]);
      } else {
        out << csv::quote(cols[c].level(r));
      }
    }
    out << '\n';
  }
}

inline std::string to_csv(const Frame& frame) {
  std::ostringstream out;
  write_csv(out, frame);
  return out.str();
}

}  // namespace modelsum
