#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fairlicit/error.hpp"

namespace fairlicit {

using json = nlohmann::ordered_json;
using CaseId = std::string;

enum class Label { low, high };

inline std::string_view to_string(Label l) { return l == Label::high ? "high" : "low"; }

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "high") return Label::high;
  if (s == "low") return Label::low;
  return std::nullopt;
}

// Inclusive at the boundary: score == threshold is high.
inline Label binarize(double score, double threshold) {
  return score >= threshold ? Label::high : Label::low;
}

// Case ids order numerically when both are unsigned integers written without
// leading zeros, and lexicographically otherwise; numeric ids sort before
// non-numeric ones.
inline bool id_less(std::string_view a, std::string_view b) {
  auto numeric = [](std::string_view s) {
    return !s.empty() && (s.size() == 1 || s[0] != '0') &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const bool na = numeric(a), nb = numeric(b);
  if (na && nb) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
  if (na != nb) return na;
  return a < b;
}

struct IdLess {
  bool operator()(std::string_view a, std::string_view b) const { return id_less(a, b); }
};

enum class FeatureKind { categorical, ordinal };

struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  std::vector<std::string> values;
  std::vector<double> levels;  // ordinal only; parallel to values
  std::string description;

  // Position of a value label, or nullopt when it is not in the value set.
  std::optional<std::size_t> index_of(std::string_view value) const {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == value) return i;
    return std::nullopt;
  }

  bool operator==(const FeatureDef&) const = default;
};

struct FeatureSchema {
  std::vector<FeatureDef> features;
  std::vector<std::string> sensitive_attributes;

  std::size_t size() const noexcept { return features.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
      if (features[i].name == name) return i;
    return std::nullopt;
  }

  const FeatureDef& feature(std::string_view name) const {
    const auto i = index_of(name);
    if (!i) throw UnknownAttribute("unknown attribute '" + std::string(name) + "'");
    return features[*i];
  }

  std::size_t require_index(std::string_view name) const {
    const auto i = index_of(name);
    if (!i) throw UnknownAttribute("unknown attribute '" + std::string(name) + "'");
    return *i;
  }

  bool operator==(const FeatureSchema&) const = default;
};

// Throws SchemaError on the first violated invariant.
inline void validate(const FeatureSchema& schema) {
  std::set<std::string> names;
  for (const auto& f : schema.features) {
    if (f.name.empty()) throw SchemaError("feature with empty name");
    if (!names.insert(f.name).second) throw SchemaError("duplicate feature '" + f.name + "'");
    if (f.values.size() < 2)
      throw SchemaError("feature '" + f.name + "' needs at least two values");
    std::set<std::string> seen;
    for (const auto& v : f.values) {
      if (v.empty()) throw SchemaError("feature '" + f.name + "' has an empty value label");
      if (!seen.insert(v).second)
        throw SchemaError("feature '" + f.name + "' repeats value '" + v + "'");
    }
    if (f.kind == FeatureKind::ordinal) {
      if (f.levels.size() != f.values.size())
        throw SchemaError("ordinal feature '" + f.name + "' needs one level per value");
      for (std::size_t i = 1; i < f.levels.size(); ++i)
        if (!(f.levels[i] > f.levels[i - 1]))
          throw SchemaError("ordinal feature '" + f.name + "' levels must strictly increase");
    } else if (!f.levels.empty()) {
      throw SchemaError("categorical feature '" + f.name + "' must not carry levels");
    }
  }
  std::set<std::string> sens;
  for (const auto& s : schema.sensitive_attributes) {
    if (!names.count(s)) throw SchemaError("sensitive attribute '" + s + "' is not a feature");
    if (!sens.insert(s).second) throw SchemaError("sensitive attribute '" + s + "' repeated");
  }
}

struct Case {
  CaseId id;
  std::vector<std::string> values;  // one per schema feature, schema order
  std::optional<Label> true_label;
  std::optional<double> score;
  std::optional<Label> prediction;

  bool operator==(const Case&) const = default;
};

enum class Provenance { synthetic, imported };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::synthetic ? "synthetic" : "imported";
}

struct Dataset {
  FeatureSchema schema;
  std::vector<Case> cases;
  double threshold = 0.5;
  Provenance provenance = Provenance::imported;

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < cases.size(); ++i)
      if (cases[i].id == id) return i;
    return std::nullopt;
  }

  const Case& at(std::string_view id) const {
    const auto i = find(id);
    if (!i) throw UnknownCase("unknown case '" + std::string(id) + "'");
    return cases[*i];
  }

  bool has_predictions() const {
    return std::all_of(cases.begin(), cases.end(),
                       [](const Case& c) { return c.prediction.has_value(); });
  }
  bool has_labels() const {
    return std::all_of(cases.begin(), cases.end(),
                       [](const Case& c) { return c.true_label.has_value(); });
  }

  bool operator==(const Dataset&) const = default;
};

// Checks one case against the schema. row is reported in ValueError (1-based).
inline void validate_case(const FeatureSchema& schema, const Case& c, double threshold,
                          std::size_t row) {
  if (c.id.empty()) throw ValueError(row, "id", "empty case id");
  if (c.values.size() != schema.size())
    throw ValueError(row, "values",
                     "expected " + std::to_string(schema.size()) + " values, got " +
                         std::to_string(c.values.size()));
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& f = schema.features[i];
    if (!f.index_of(c.values[i]))
      throw ValueError(row, f.name, "'" + c.values[i] + "' is not a value of " + f.name);
  }
  if (c.score) {
    if (!(*c.score >= 0.0 && *c.score <= 1.0))
      throw ValueError(row, "score", "score must lie in [0,1]");
    if (c.prediction && *c.prediction != binarize(*c.score, threshold))
      throw ValueError(row, "prediction", "prediction disagrees with binarized score");
  }
}

inline void validate(const Dataset& d) {
  validate(d.schema);
  if (!(d.threshold > 0.0 && d.threshold < 1.0))
    throw SchemaError("threshold must lie in (0,1)");
  std::set<std::string> ids;
  for (std::size_t r = 0; r < d.cases.size(); ++r) {
    validate_case(d.schema, d.cases[r], d.threshold, r + 1);
    if (!ids.insert(d.cases[r].id).second) throw DuplicateId("duplicate case id '" + d.cases[r].id + "'");
  }
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const FeatureDef& f) {
  json j;
  j["name"] = f.name;
  j["kind"] = f.kind == FeatureKind::ordinal ? "ordinal" : "categorical";
  j["values"] = f.values;
  if (f.kind == FeatureKind::ordinal) j["levels"] = f.levels;
  j["description"] = f.description;
  return j;
}

inline json to_json(const FeatureSchema& s) {
  json j;
  j["features"] = json::array();
  for (const auto& f : s.features) j["features"].push_back(to_json(f));
  j["sensitive_attributes"] = s.sensitive_attributes;
  return j;
}

inline FeatureSchema schema_from_json(const json& j) {
  FeatureSchema s;
  try {
    if (!j.is_object() || !j.contains("features") || !j.at("features").is_array())
      throw SchemaError("schema must be an object with a 'features' array");
    for (const auto& jf : j.at("features")) {
      FeatureDef f;
      f.name = jf.at("name").get<std::string>();
      const auto kind = jf.value("kind", std::string("categorical"));
      if (kind == "ordinal")
        f.kind = FeatureKind::ordinal;
      else if (kind == "categorical")
        f.kind = FeatureKind::categorical;
      else
        throw SchemaError("feature '" + f.name + "' has unknown kind '" + kind + "'");
      f.values = jf.at("values").get<std::vector<std::string>>();
      if (jf.contains("levels")) f.levels = jf.at("levels").get<std::vector<double>>();
      f.description = jf.value("description", std::string());
      s.features.push_back(std::move(f));
    }
    if (j.contains("sensitive_attributes"))
      s.sensitive_attributes = j.at("sensitive_attributes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
  validate(s);
  return s;
}

inline json to_json(const Case& c) {
  json j;
  j["id"] = c.id;
  j["values"] = c.values;
  j["true_label"] = c.true_label ? json(to_string(*c.true_label)) : json(nullptr);
  j["score"] = c.score ? json(*c.score) : json(nullptr);
  j["prediction"] = c.prediction ? json(to_string(*c.prediction)) : json(nullptr);
  return j;
}

inline json to_json(const Dataset& d) {
  json j;
  j["schema"] = to_json(d.schema);
  j["threshold"] = d.threshold;
  j["provenance"] = to_string(d.provenance);
  j["cases"] = json::array();
  for (const auto& c : d.cases) j["cases"].push_back(to_json(c));
  return j;
}

inline Dataset dataset_from_json(const json& j) {
  Dataset d;
  if (!j.is_object() || !j.contains("schema")) throw SchemaError("dataset must carry a schema");
  d.schema = schema_from_json(j.at("schema"));
  std::size_t row = 0;
  try {
    d.threshold = j.value("threshold", 0.5);
    const auto prov = j.value("provenance", std::string("imported"));
    if (prov == "synthetic")
      d.provenance = Provenance::synthetic;
    else if (prov == "imported")
      d.provenance = Provenance::imported;
    else
      throw SchemaError("unknown provenance '" + prov + "'");
    if (j.contains("cases")) {
      for (const auto& jc : j.at("cases")) {
        ++row;
        Case c;
        c.id = jc.at("id").get<std::string>();
        c.values = jc.at("values").get<std::vector<std::string>>();
        auto label = [&](const char* key) -> std::optional<Label> {
          if (!jc.contains(key) || jc.at(key).is_null()) return std::nullopt;
          const auto s = jc.at(key).get<std::string>();
          const auto l = parse_label(s);
          if (!l) throw ValueError(row, key, "expected 'high' or 'low', got '" + s + "'");
          return l;
        };
        c.true_label = label("true_label");
        c.prediction = label("prediction");
        if (jc.contains("score") && !jc.at("score").is_null()) c.score = jc.at("score").get<double>();
        d.cases.push_back(std::move(c));
      }
    }
  } catch (const json::exception& e) {
    throw ValueError(row, "cases", std::string("malformed case: ") + e.what());
  }
  validate(d);
  return d;
}

}  // namespace fairlicit
