#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairlicit/encoding.hpp"
#include "fairlicit/io.hpp"
#include "fairlicit/schema.hpp"

namespace fairlicit {

// One nonnegative weight per schema feature.
struct WeightVector {
  std::vector<double> weights;

  static WeightVector uniform(std::size_t n, double w = 1.0) { return {std::vector<double>(n, w)}; }

  bool operator==(const WeightVector&) const = default;
};

inline void validate(const WeightVector& w, const FeatureSchema& schema) {
  if (w.weights.size() != schema.size())
    throw InvalidWeights("weights: expected " + std::to_string(schema.size()) + " values, got " +
                         std::to_string(w.weights.size()));
  for (std::size_t i = 0; i < w.weights.size(); ++i)
    if (!std::isfinite(w.weights[i]) || w.weights[i] < 0.0)
      throw InvalidWeights("weights: weight for " + schema.features[i].name +
                           " must be a finite nonnegative number");
}

// Parses comma-separated decimals in schema feature order.
inline WeightVector parse_weights(std::string_view text, const FeatureSchema& schema) {
  WeightVector w;
  for (const auto& part : split(text, ',')) {
    auto v = parse_double(part);
    if (!v) throw InvalidWeights("weights: '" + part + "' is not a number");
    w.weights.push_back(*v);
  }
  validate(w, schema);
  return w;
}

namespace detail {

inline std::vector<double> coordinate_weights(const Encoder& enc, const WeightVector& w) {
  std::vector<double> out(enc.dim());
  for (const auto& b : enc.blocks())
    for (std::size_t k = 0; k < b.width; ++k) out[b.offset + k] = w.weights[b.feature];
  return out;
}

inline double weighted_sq(const double* p, const double* q, const std::vector<double>& cw) {
  double sum = 0.0;
  for (std::size_t k = 0; k < cw.size(); ++k) {
    const double d = q[k] - p[k];
    sum += cw[k] * d * d;
  }
  return sum;
}

}  // namespace detail

// sqrt(sum_i w_i * |enc_i(b) - enc_i(a)|^2), where feature i's weight applies
// to every coordinate of its block.
inline double weighted_distance(const FeatureSchema& schema, const Case& a, const Case& b,
                                const WeightVector& w) {
  validate(w, schema);
  if (a.values.size() != schema.size() || b.values.size() != schema.size())
    throw SchemaMismatch("cases do not conform to the same schema");
  const Encoder enc(schema);
  const auto pa = enc.encode(a), pb = enc.encode(b);
  return std::sqrt(detail::weighted_sq(pa.data(), pb.data(), detail::coordinate_weights(enc, w)));
}

struct RankedCase {
  CaseId id;
  double distance = 0.0;
  std::optional<Label> prediction;
};

struct SimilarityRanking {
  CaseId reference_id;
  WeightVector weights;
  std::vector<RankedCase> entries;  // ascending distance, then ascending id
};

inline SimilarityRanking rank_by_similarity(const Dataset& d, std::string_view reference_id,
                                            const WeightVector& w) {
  validate(w, d.schema);
  const auto ref = d.find(reference_id);
  if (!ref) throw UnknownCase("unknown reference case '" + std::string(reference_id) + "'");
  const Encoder enc(d.schema);
  const auto cw = detail::coordinate_weights(enc, w);
  const auto ref_enc = enc.encode(d.cases[*ref]);
  std::vector<double> buf(enc.dim());

  SimilarityRanking out;
  out.reference_id = std::string(reference_id);
  out.weights = w;
  out.entries.reserve(d.cases.size());
  for (std::size_t i = 0; i < d.cases.size(); ++i) {
    if (i == *ref) continue;
    enc.encode_into(d.cases[i], buf.data());
    out.entries.push_back(
        {d.cases[i].id, std::sqrt(detail::weighted_sq(ref_enc.data(), buf.data(), cw)),
         d.cases[i].prediction});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const RankedCase& x, const RankedCase& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    return id_less(x.id, y.id);
  });
  return out;
}

struct DiscordantPair {
  CaseId case_a;  // id_less(case_a, case_b)
  CaseId case_b;
  double distance = 0.0;
};

// The k closest pairs whose predictions differ, ties broken by (case_a, case_b).
inline std::vector<DiscordantPair> nearest_discordant_pairs(const Dataset& d, const WeightVector& w,
                                                            std::size_t k) {
  validate(w, d.schema);
  if (k == 0) throw ValidationError("k: must be at least 1");
  if (!d.has_predictions()) throw MissingPredictions("dataset has cases without predictions");
  const Encoder enc(d.schema);
  const auto cw = detail::coordinate_weights(enc, w);
  const auto mat = enc.encode_all(d.cases);
  const std::size_t dim = enc.dim();

  struct Candidate {
    double sq;
    std::size_t a, b;
  };
  auto less = [&](const Candidate& x, const Candidate& y) {
    if (x.sq != y.sq) return x.sq < y.sq;
    if (d.cases[x.a].id != d.cases[y.a].id) return id_less(d.cases[x.a].id, d.cases[y.a].id);
    return id_less(d.cases[x.b].id, d.cases[y.b].id);
  };
  std::vector<Candidate> cand;
  for (std::size_t i = 0; i < d.cases.size(); ++i) {
    for (std::size_t j = i + 1; j < d.cases.size(); ++j) {
      if (*d.cases[i].prediction == *d.cases[j].prediction) continue;
      std::size_t a = i, b = j;
      if (id_less(d.cases[b].id, d.cases[a].id)) std::swap(a, b);
      cand.push_back({detail::weighted_sq(mat.data() + i * dim, mat.data() + j * dim, cw), a, b});
    }
  }
  const std::size_t keep = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(), less);
  std::vector<DiscordantPair> out;
  for (std::size_t i = 0; i < keep; ++i)
    out.push_back({d.cases[cand[i].a].id, d.cases[cand[i].b].id, std::sqrt(cand[i].sq)});
  return out;
}

// Distances are rounded to 12 significant digits on the wire.
inline json to_json(const SimilarityRanking& r) {
  json j;
  j["reference"] = r.reference_id;
  j["weights"] = r.weights.weights;
  j["entries"] = json::array();
  for (const auto& e : r.entries) {
    json je;
    je["id"] = e.id;
    je["distance"] = round_significant(e.distance, 12);
    je["prediction"] = e.prediction ? json(to_string(*e.prediction)) : json(nullptr);
    j["entries"].push_back(std::move(je));
  }
  return j;
}

inline json to_json(const std::vector<DiscordantPair>& pairs) {
  json j = json::array();
  for (const auto& p : pairs) {
    json jp;
    jp["case_a"] = p.case_a;
    jp["case_b"] = p.case_b;
    jp["distance"] = round_significant(p.distance, 12);
    j.push_back(std::move(jp));
  }
  return j;
}

inline std::string render_text(const SimilarityRanking& r, std::size_t limit = 0) {
  std::string out = "reference " + r.reference_id + "\nrank  id          distance  prediction\n";
  std::size_t rank = 0;
  for (const auto& e : r.entries) {
    if (limit && rank >= limit) break;
    char line[160];
    std::snprintf(line, sizeof line, "%4zu  %-10s  %8.4f  %s\n", ++rank, e.id.c_str(), e.distance,
                  e.prediction ? std::string(to_string(*e.prediction)).c_str() : "-");
    out += line;
  }
  return out;
}

}  // namespace fairlicit
