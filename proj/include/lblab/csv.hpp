#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lblab/dataset.hpp"
#include "lblab/errors.hpp"
#include "lblab/io_util.hpp"

namespace lblab {

// Small CSV layer: comma separator, optional double-quote quoting with ""
// escapes, LF or CRLF line endings. Embedded newlines inside quoted fields
// are not supported; every record is one physical line.

namespace csv {

inline std::string quote_if_needed(std::string_view field) {
  const bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

/// Split one line into cells. `line_no` is 1-based and used in errors only.
inline std::vector<std::string> split_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool in_quotes = false;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
      } else {
        cur += c;
        ++i;
      }
    } else if (c == '"') {
      if (!cur.empty())
        throw ParseError("line " + std::to_string(line_no) +
                         ": quote in the middle of an unquoted cell");
      in_quotes = true;
      ++i;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
      ++i;
    } else {
      cur += c;
      ++i;
    }
  }
  if (in_quotes)
    throw ParseError("line " + std::to_string(line_no) + ": unterminated quoted cell");
  cells.push_back(cur);
  return cells;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // ragged rows already rejected
  std::vector<std::size_t> row_lines;          // 1-based file line per row
};

/// Parse a whole CSV document. Requires a header row; enforces rectangularity.
inline Table parse(std::string_view text, const std::string& origin) {
  Table t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;  // skip blank lines
    auto cells = split_line(line, line_no);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      if (cells.size() != t.header.size())
        throw ParseError(origin + ": line " + std::to_string(line_no) + ": expected " +
                         std::to_string(t.header.size()) + " cells, got " +
                         std::to_string(cells.size()));
      t.rows.push_back(std::move(cells));
      t.row_lines.push_back(line_no);
    }
  }
  if (t.header.empty()) throw ParseError(origin + ": empty file (no header row)");
  return t;
}

inline std::size_t column_index(const Table& t, const std::string& name,
                                const std::string& origin) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw ParseError(origin + ": missing column '" + name + "'");
}

}  // namespace csv

/// Which columns of a CSV file hold the features, the label, and (optionally)
/// the sample id. Ids are synthesized as "row-<k>" (k = 0-based sample index)
/// when no id column is given.
struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string label_column;
  std::optional<std::string> id_column;
};

inline Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  if (schema.feature_columns.empty())
    throw InvalidInputError("load_csv: no feature columns named");
  const std::string origin = path.string();
  const auto table = csv::parse(read_text_file(path), origin);
  if (table.rows.empty()) throw ParseError(origin + ": no data rows");

  std::vector<std::size_t> feat_idx;
  feat_idx.reserve(schema.feature_columns.size());
  for (const auto& name : schema.feature_columns)
    feat_idx.push_back(csv::column_index(table, name, origin));
  const std::size_t label_idx = csv::column_index(table, schema.label_column, origin);
  std::optional<std::size_t> id_idx;
  if (schema.id_column) id_idx = csv::column_index(table, *schema.id_column, origin);

  const std::size_t n = table.rows.size();
  const std::size_t d = feat_idx.size();
  Dataset ds;
  ds.features = Matrix(n, d);
  ds.labels.resize(n);
  ds.sample_ids.resize(n);

  int max_label = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    for (std::size_t j = 0; j < d; ++j) {
      const auto v = parse_double(row[feat_idx[j]]);
      if (!v)
        throw ParseError(origin + ": line " + std::to_string(line) + ", column '" +
                         schema.feature_columns[j] + "': non-numeric cell '" +
                         row[feat_idx[j]] + "'");
      ds.features.at(r, j) = *v;
    }
    const auto lab = parse_int(row[label_idx]);
    if (!lab || *lab < 1)
      throw ParseError(origin + ": line " + std::to_string(line) + ", column '" +
                       schema.label_column + "': label must be a positive integer, got '" +
                       row[label_idx] + "'");
    ds.labels[r] = static_cast<int>(*lab);
    max_label = std::max(max_label, ds.labels[r]);
    ds.sample_ids[r] = id_idx ? row[*id_idx] : ("row-" + std::to_string(r));
  }
  ds.n_classes = std::max(max_label, 2);
  ds.validate();
  return ds;
}

/// Write a dataset as CSV: sample_id, x0..x{D-1}, label, and, when present,
/// difficulty_tag. Readable back with load_csv (the tag column is just extra).
inline void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::string out = "sample_id";
  for (std::size_t j = 0; j < ds.dim(); ++j) out += ",x" + std::to_string(j);
  out += ",label";
  const bool tags = !ds.difficulty_tags.empty();
  if (tags) out += ",difficulty_tag";
  out += '\n';
  for (std::size_t i = 0; i < ds.n_samples(); ++i) {
    out += csv::quote_if_needed(ds.sample_ids[i]);
    for (std::size_t j = 0; j < ds.dim(); ++j) out += ',' + fmt_double(ds.features.at(i, j));
    out += ',' + std::to_string(ds.labels[i]);
    if (tags) out += ',' + std::string(to_string(ds.difficulty_tags[i]));
    out += '\n';
  }
  write_text_atomic(path, out);
}

}  // namespace lblab
