#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairlicit/io.hpp"
#include "fairlicit/schema.hpp"

namespace fairlicit {

namespace detail {

// Splits one CSV record. Fields may be double-quoted with "" escapes.
inline std::vector<std::string> parse_csv_record(std::string_view line, std::size_t row) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ValueError(row, "", "unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace detail

// Parses CSV text against a schema. The header names every schema feature
// (any order) plus, optionally, id, true_label, score and prediction. A blank
// prediction next to a score is filled in by thresholding the score.
inline Dataset parse_dataset_csv(const FeatureSchema& schema, std::string_view text,
                                 double threshold = 0.5) {
  validate(schema);
  if (!(threshold > 0.0 && threshold < 1.0)) throw SchemaError("threshold must lie in (0,1)");

  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      auto line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      start = end + 1;
    }
  }
  if (lines.empty()) throw SchemaError("CSV has no header row");

  const auto header = detail::parse_csv_record(lines[0], 0);
  std::vector<std::optional<std::size_t>> feature_col(schema.size());
  std::optional<std::size_t> id_col, label_col, score_col, pred_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& h = header[c];
    auto claim = [&](std::optional<std::size_t>& slot) {
      if (slot) throw SchemaError("CSV header repeats column '" + h + "'");
      slot = c;
    };
    if (h == "id") claim(id_col);
    else if (h == "true_label") claim(label_col);
    else if (h == "score") claim(score_col);
    else if (h == "prediction") claim(pred_col);
    else if (auto i = schema.index_of(h)) claim(feature_col[*i]);
    else throw SchemaError("CSV header has unknown column '" + h + "'");
  }
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (!feature_col[i])
      throw SchemaError("CSV header is missing feature '" + schema.features[i].name + "'");

  Dataset d;
  d.schema = schema;
  d.threshold = threshold;
  d.provenance = Provenance::imported;

  std::set<std::string> ids;
  std::size_t row = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty() && li + 1 == lines.size()) break;
    ++row;
    const auto cells = detail::parse_csv_record(lines[li], row);
    if (cells.size() != header.size())
      throw ValueError(row, "", "expected " + std::to_string(header.size()) + " cells, got " +
                                    std::to_string(cells.size()));
    Case c;
    c.id = id_col && !cells[*id_col].empty() ? cells[*id_col] : std::to_string(row);
    c.values.resize(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto& v = cells[*feature_col[i]];
      const auto& f = schema.features[i];
      if (v.empty()) throw ValueError(row, f.name, "missing value");
      if (!f.index_of(v)) throw ValueError(row, f.name, "'" + v + "' is not a value of " + f.name);
      c.values[i] = v;
    }
    auto label = [&](const std::optional<std::size_t>& col, const char* name) -> std::optional<Label> {
      if (!col || cells[*col].empty()) return std::nullopt;
      auto l = parse_label(cells[*col]);
      if (!l) throw ValueError(row, name, "expected 'high' or 'low', got '" + cells[*col] + "'");
      return l;
    };
    c.true_label = label(label_col, "true_label");
    c.prediction = label(pred_col, "prediction");
    if (score_col && !cells[*score_col].empty()) {
      auto s = parse_double(cells[*score_col]);
      if (!s) throw ValueError(row, "score", "'" + cells[*score_col] + "' is not a number");
      c.score = *s;
      if (!c.prediction && *s >= 0.0 && *s <= 1.0) c.prediction = binarize(*s, threshold);
    }
    validate_case(schema, c, threshold, row);
    if (!ids.insert(c.id).second) throw DuplicateId("duplicate case id '" + c.id + "'");
    d.cases.push_back(std::move(c));
  }
  return d;
}

inline FeatureSchema load_schema(const std::filesystem::path& schema_file) {
  json j;
  try {
    j = json::parse(read_file(schema_file));
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  return schema_from_json(j);
}

inline Dataset load_dataset(const std::filesystem::path& schema_file,
                            const std::filesystem::path& data_file, double threshold = 0.5) {
  return parse_dataset_csv(load_schema(schema_file), read_file(data_file), threshold);
}

// Inverse of parse_dataset_csv: id, features, true_label, score, prediction.
inline std::string to_csv(const Dataset& d) {
  std::string out = "id";
  for (const auto& f : d.schema.features) out += "," + detail::csv_escape(f.name);
  out += ",true_label,score,prediction\n";
  for (const auto& c : d.cases) {
    out += detail::csv_escape(c.id);
    for (const auto& v : c.values) out += "," + detail::csv_escape(v);
    out += ",";
    if (c.true_label) out += to_string(*c.true_label);
    out += ",";
    if (c.score) out += format_double(*c.score);
    out += ",";
    if (c.prediction) out += to_string(*c.prediction);
    out += "\n";
  }
  return out;
}

inline std::string serialize(const Dataset& d) { return to_json(d).dump(2) + "\n"; }

inline void save_dataset_json(const Dataset& d, const std::filesystem::path& path) {
  write_file_atomic(path, serialize(d));
}

inline Dataset load_dataset_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("dataset is not valid JSON: ") + e.what());
  }
  return dataset_from_json(j);
}

}  // namespace fairlicit
