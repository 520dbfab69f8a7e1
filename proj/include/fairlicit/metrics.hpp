#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fairlicit/io.hpp"
#include "fairlicit/ratio.hpp"
#include "fairlicit/schema.hpp"

namespace fairlicit {

inline constexpr double kDefaultEpsilon = 0.05;

enum class Criterion { statistical_parity, equalized_odds };
enum class Verdict { satisfied, violated, undefined };
enum class Metric { positive_rate, fpr, fnr, accuracy };

inline std::string_view to_string(Criterion c) {
  return c == Criterion::statistical_parity ? "statistical_parity" : "equalized_odds";
}
inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    default: return "undefined";
  }
}
inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::positive_rate: return "positive_rate";
    case Metric::fpr: return "fpr";
    case Metric::fnr: return "fnr";
    default: return "accuracy";
  }
}

inline Criterion parse_criterion(std::string_view s) {
  if (s == "statistical_parity") return Criterion::statistical_parity;
  if (s == "equalized_odds") return Criterion::equalized_odds;
  throw ValidationError("criterion: unknown value '" + std::string(s) + "'");
}
inline Metric parse_metric(std::string_view s) {
  if (s == "positive_rate") return Metric::positive_rate;
  if (s == "fpr") return Metric::fpr;
  if (s == "fnr") return Metric::fnr;
  if (s == "accuracy") return Metric::accuracy;
  throw ValidationError("metric: unknown value '" + std::string(s) + "'");
}

struct SubgroupStats {
  std::string attribute;
  std::string value;
  std::int64_t n = 0;
  std::int64_t n_true_high = 0;
  std::int64_t n_true_low = 0;
  std::int64_t n_pred_high = 0;
  std::int64_t false_positives = 0;
  std::int64_t false_negatives = 0;
  Rate positive_rate;
  Rate fpr;
  Rate fnr;
  Rate accuracy;
};

struct FairnessReport {
  std::string attribute;
  Criterion criterion = Criterion::statistical_parity;
  std::vector<SubgroupStats> per_subgroup;
  std::optional<Ratio> max_gap;
  std::optional<Ratio> fpr_gap;  // equalized odds only
  std::optional<Ratio> fnr_gap;  // equalized odds only
  double epsilon = kDefaultEpsilon;
  Verdict verdict = Verdict::undefined;
};

// Attributes a trained model must not read.
struct AwarenessConfig {
  std::set<std::string> excluded_attributes;
};

inline void validate(const AwarenessConfig& cfg, const FeatureSchema& schema) {
  for (const auto& a : cfg.excluded_attributes)
    if (!schema.index_of(a)) throw UnknownAttribute("cannot exclude unknown attribute '" + a + "'");
}

namespace detail {

struct Tally {
  std::int64_t n = 0, true_high = 0, true_low = 0, pred_high = 0, fp = 0, fn = 0, correct = 0;
};

inline SubgroupStats finish(std::string attribute, std::string value, const Tally& t) {
  SubgroupStats s;
  s.attribute = std::move(attribute);
  s.value = std::move(value);
  s.n = t.n;
  s.n_true_high = t.true_high;
  s.n_true_low = t.true_low;
  s.n_pred_high = t.pred_high;
  s.false_positives = t.fp;
  s.false_negatives = t.fn;
  s.positive_rate = make_rate(t.pred_high, t.n);
  s.fpr = make_rate(t.fp, t.true_low);
  s.fnr = make_rate(t.fn, t.true_high);
  s.accuracy = make_rate(t.correct, t.true_high + t.true_low);
  return s;
}

inline void add(Tally& t, const Case& c) {
  ++t.n;
  const bool pred_high = *c.prediction == Label::high;
  if (pred_high) ++t.pred_high;
  if (!c.true_label) return;
  if (*c.true_label == Label::high) {
    ++t.true_high;
    if (!pred_high) ++t.fn;
  } else {
    ++t.true_low;
    if (pred_high) ++t.fp;
  }
  if (*c.true_label == *c.prediction) ++t.correct;
}

inline void require_predictions(const Dataset& d) {
  if (!d.has_predictions()) throw MissingPredictions("dataset has cases without predictions");
}
inline void require_labels(const Dataset& d) {
  if (!d.has_labels()) throw MissingLabels("dataset has cases without true labels");
}

}  // namespace detail

// One entry per schema value of the attribute, in schema order, including
// empty subgroups. Label-based counts cover labeled cases only.
inline std::vector<SubgroupStats> subgroup_stats(const Dataset& d, std::string_view attribute) {
  const auto col = d.schema.require_index(attribute);
  detail::require_predictions(d);
  const auto& f = d.schema.features[col];
  std::vector<detail::Tally> tallies(f.values.size());
  for (const auto& c : d.cases) detail::add(tallies[*f.index_of(c.values[col])], c);
  std::vector<SubgroupStats> out;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out.push_back(detail::finish(f.name, f.values[i], tallies[i]));
  return out;
}

namespace detail {

// Largest pairwise |a - b| over defined rates; nullopt if fewer than one.
inline std::optional<Ratio> max_pairwise_gap(const std::vector<Ratio>& rates) {
  if (rates.empty()) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  return abs_diff(*hi, *lo);
}

inline Verdict verdict_for(const std::optional<Ratio>& gap, double eps) {
  if (!gap) return Verdict::undefined;
  return gap->within(eps) ? Verdict::satisfied : Verdict::violated;
}

}  // namespace detail

inline FairnessReport statistical_parity_report(const Dataset& d, std::string_view attribute,
                                                double epsilon = kDefaultEpsilon) {
  FairnessReport r;
  r.attribute = std::string(attribute);
  r.criterion = Criterion::statistical_parity;
  r.epsilon = epsilon;
  r.per_subgroup = subgroup_stats(d, attribute);
  std::vector<Ratio> rates;
  for (const auto& s : r.per_subgroup)
    if (s.n > 0) rates.push_back(*s.positive_rate);
  r.max_gap = rates.empty() ? Ratio(0, 1) : *detail::max_pairwise_gap(rates);
  r.verdict = detail::verdict_for(r.max_gap, epsilon);
  return r;
}

inline FairnessReport equalized_odds_report(const Dataset& d, std::string_view attribute,
                                            double epsilon = kDefaultEpsilon) {
  FairnessReport r;
  r.attribute = std::string(attribute);
  r.criterion = Criterion::equalized_odds;
  r.epsilon = epsilon;
  r.per_subgroup = subgroup_stats(d, attribute);
  detail::require_labels(d);
  std::vector<Ratio> fprs, fnrs;
  bool undefined = false;
  for (const auto& s : r.per_subgroup) {
    if (s.n == 0) continue;
    if (!s.fpr || !s.fnr) {
      undefined = true;
      continue;
    }
    fprs.push_back(*s.fpr);
    fnrs.push_back(*s.fnr);
  }
  if (undefined) {
    r.verdict = Verdict::undefined;
    return r;
  }
  r.fpr_gap = fprs.empty() ? Ratio(0, 1) : *detail::max_pairwise_gap(fprs);
  r.fnr_gap = fnrs.empty() ? Ratio(0, 1) : *detail::max_pairwise_gap(fnrs);
  r.max_gap = std::max(*r.fpr_gap, *r.fnr_gap);
  r.verdict = detail::verdict_for(r.max_gap, epsilon);
  return r;
}

inline FairnessReport fairness_report(const Dataset& d, Criterion c, std::string_view attribute,
                                      double epsilon = kDefaultEpsilon) {
  return c == Criterion::statistical_parity ? statistical_parity_report(d, attribute, epsilon)
                                            : equalized_odds_report(d, attribute, epsilon);
}

// ---------------------------------------------------------------------------
// Group view

struct GroupRow {
  std::vector<std::string> values;  // one per selected attribute
  Rate value;
  std::int64_t n = 0;
};

struct GroupViewSummary {
  std::vector<std::string> attributes;
  Metric metric = Metric::positive_rate;
  std::vector<GroupRow> rows;
  std::string description;
};

inline std::string_view metric_phrase(Metric m) {
  switch (m) {
    case Metric::positive_rate: return "high-risk prediction rate";
    case Metric::fpr: return "false positive rate";
    case Metric::fnr: return "false negative rate";
    default: return "accuracy";
  }
}

inline std::string row_label(const GroupRow& r) {
  std::string s;
  for (std::size_t i = 0; i < r.values.size(); ++i) s += (i ? " / " : "") + r.values[i];
  return s;
}

// Cross-product subgroups of one or two attributes, in schema value order,
// plus a sentence naming the highest and lowest subgroup.
inline GroupViewSummary group_view_summary(const Dataset& d,
                                           const std::vector<std::string>& attributes,
                                           Metric metric) {
  if (attributes.empty() || attributes.size() > 2)
    throw ValidationError("attributes: select one or two attributes");
  std::vector<std::size_t> cols;
  for (const auto& a : attributes) cols.push_back(d.schema.require_index(a));
  detail::require_predictions(d);
  if (metric != Metric::positive_rate) detail::require_labels(d);

  const auto& f1 = d.schema.features[cols[0]];
  const std::size_t m1 = f1.values.size();
  const std::size_t m2 = cols.size() == 2 ? d.schema.features[cols[1]].values.size() : 1;
  std::vector<detail::Tally> tallies(m1 * m2);
  for (const auto& c : d.cases) {
    std::size_t k = *f1.index_of(c.values[cols[0]]);
    if (cols.size() == 2) k = k * m2 + *d.schema.features[cols[1]].index_of(c.values[cols[1]]);
    detail::add(tallies[k], c);
  }

  GroupViewSummary out;
  out.attributes = attributes;
  out.metric = metric;
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t j = 0; j < m2; ++j) {
      GroupRow row;
      row.values.push_back(f1.values[i]);
      if (cols.size() == 2) row.values.push_back(d.schema.features[cols[1]].values[j]);
      const auto s = detail::finish("", "", tallies[i * m2 + j]);
      row.n = s.n;
      switch (metric) {
        case Metric::positive_rate: row.value = s.positive_rate; break;
        case Metric::fpr: row.value = s.fpr; break;
        case Metric::fnr: row.value = s.fnr; break;
        case Metric::accuracy: row.value = s.accuracy; break;
      }
      out.rows.push_back(std::move(row));
    }
  }

  const GroupRow* hi = nullptr;
  const GroupRow* lo = nullptr;
  for (const auto& r : out.rows) {
    if (!r.value) continue;
    if (!hi || *r.value > *hi->value) hi = &r;
    if (!lo || *r.value < *lo->value) lo = &r;
  }
  std::string by;
  for (std::size_t i = 0; i < attributes.size(); ++i) by += (i ? " and " : "") + attributes[i];
  const std::string phrase(metric_phrase(metric));
  auto fmt = [](const GroupRow& r) {
    return row_label(r) + " (" + format_fixed(r.value->value(), 3) + ", n=" + std::to_string(r.n) + ")";
  };
  if (!hi) {
    out.description = "No subgroup of " + by + " has a defined " + phrase + ".";
  } else if (hi == lo || *hi->value == *lo->value) {
    out.description = "The " + phrase + " by " + by + " is " + format_fixed(hi->value->value(), 3) +
                      " for every subgroup where it is defined.";
  } else {
    out.description = "The " + phrase + " by " + by + " is highest for " + fmt(*hi) +
                      " and lowest for " + fmt(*lo) + ", a gap of " +
                      format_fixed(abs_diff(*hi->value, *lo->value).value(), 3) + ".";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline json rate_json(const Rate& r) { return r ? json(r->value()) : json(nullptr); }

inline json to_json(const SubgroupStats& s) {
  json j;
  j["attribute"] = s.attribute;
  j["value"] = s.value;
  j["n"] = s.n;
  j["n_true_high"] = s.n_true_high;
  j["n_true_low"] = s.n_true_low;
  j["positive_rate"] = rate_json(s.positive_rate);
  j["fpr"] = rate_json(s.fpr);
  j["fnr"] = rate_json(s.fnr);
  j["accuracy"] = rate_json(s.accuracy);
  return j;
}

inline json to_json(const FairnessReport& r) {
  json j;
  j["attribute"] = r.attribute;
  j["criterion"] = to_string(r.criterion);
  j["per_subgroup"] = json::array();
  for (const auto& s : r.per_subgroup) j["per_subgroup"].push_back(to_json(s));
  j["max_gap"] = rate_json(r.max_gap);
  if (r.criterion == Criterion::equalized_odds) {
    j["fpr_gap"] = rate_json(r.fpr_gap);
    j["fnr_gap"] = rate_json(r.fnr_gap);
  }
  j["epsilon"] = r.epsilon;
  j["verdict"] = to_string(r.verdict);
  return j;
}

inline json to_json(const GroupViewSummary& g) {
  json j;
  j["attributes"] = g.attributes;
  j["metric"] = to_string(g.metric);
  j["rows"] = json::array();
  for (const auto& r : g.rows) {
    json jr;
    jr["subgroup"] = r.values;
    jr["value"] = rate_json(r.value);
    jr["n"] = r.n;
    j["rows"].push_back(std::move(jr));
  }
  j["description"] = g.description;
  return j;
}

namespace detail {

inline std::string cell(const Rate& r) { return r ? format_fixed(r->value(), 3) : "-"; }

inline std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace detail

// Aligned plain-text table.
inline std::string render_text(const FairnessReport& r) {
  std::size_t w = 8;
  for (const auto& s : r.per_subgroup) w = std::max(w, s.value.size());
  std::string out = std::string(to_string(r.criterion)) + " on " + r.attribute + " (epsilon " +
                    format_fixed(r.epsilon, 3) + ")\n";
  out += detail::pad("subgroup", w, true) + "  " + detail::pad("n", 5) + "  " +
         detail::pad("true_high", 9) + "  " + detail::pad("true_low", 8) + "  " +
         detail::pad("pos_rate", 8) + "  " + detail::pad("fpr", 6) + "  " + detail::pad("fnr", 6) +
         "  " + detail::pad("accuracy", 8) + "\n";
  for (const auto& s : r.per_subgroup) {
    out += detail::pad(s.value, w, true) + "  " + detail::pad(std::to_string(s.n), 5) + "  " +
           detail::pad(std::to_string(s.n_true_high), 9) + "  " +
           detail::pad(std::to_string(s.n_true_low), 8) + "  " +
           detail::pad(detail::cell(s.positive_rate), 8) + "  " + detail::pad(detail::cell(s.fpr), 6) +
           "  " + detail::pad(detail::cell(s.fnr), 6) + "  " +
           detail::pad(detail::cell(s.accuracy), 8) + "\n";
  }
  if (r.criterion == Criterion::equalized_odds)
    out += "fpr gap " + detail::cell(r.fpr_gap) + "  fnr gap " + detail::cell(r.fnr_gap) + "  ";
  out += "max gap " + detail::cell(r.max_gap) + "  verdict ";
  std::string v(to_string(r.verdict));
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::toupper(c); });
  return out + v + "\n";
}

inline std::string render_csv(const FairnessReport& r) {
  auto c = [](const Rate& x) { return x ? format_double(x->value()) : std::string(); };
  std::string out = "attribute,criterion,subgroup,n,n_true_high,n_true_low,positive_rate,fpr,fnr,accuracy,max_gap,epsilon,verdict\n";
  for (const auto& s : r.per_subgroup) {
    out += r.attribute + "," + std::string(to_string(r.criterion)) + "," + s.value + "," +
           std::to_string(s.n) + "," + std::to_string(s.n_true_high) + "," +
           std::to_string(s.n_true_low) + "," + c(s.positive_rate) + "," + c(s.fpr) + "," +
           c(s.fnr) + "," + c(s.accuracy) + "," + c(r.max_gap) + "," + format_double(r.epsilon) +
           "," + std::string(to_string(r.verdict)) + "\n";
  }
  return out;
}

inline std::string render_text(const GroupViewSummary& g) {
  std::size_t w = 8;
  for (const auto& r : g.rows) w = std::max(w, row_label(r).size());
  std::string out = detail::pad("subgroup", w, true) + "  " +
                    detail::pad(std::string(to_string(g.metric)), 13) + "  " + detail::pad("n", 5) +
                    "\n";
  for (const auto& r : g.rows)
    out += detail::pad(row_label(r), w, true) + "  " + detail::pad(detail::cell(r.value), 13) + "  " +
           detail::pad(std::to_string(r.n), 5) + "\n";
  return out + g.description + "\n";
}

inline std::string render_csv(const GroupViewSummary& g) {
  std::string out;
  for (const auto& a : g.attributes) out += a + ",";
  out += std::string(to_string(g.metric)) + ",n\n";
  for (const auto& r : g.rows) {
    for (const auto& v : r.values) out += v + ",";
    out += (r.value ? format_double(r.value->value()) : std::string()) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

}  // namespace fairlicit
