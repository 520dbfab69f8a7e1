#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairlicit/random.hpp"
#include "fairlicit/schema.hpp"

namespace fairlicit {

inline double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// The bundled twelve-feature vocabulary. Value sets are invented stand-ins,
// not a reconstruction of any real screening data.
inline FeatureSchema default_schema() {
  auto cat = [](std::string name, std::vector<std::string> values, std::string desc) {
    return FeatureDef{std::move(name), FeatureKind::categorical, std::move(values), {}, std::move(desc)};
  };
  auto ord = [](std::string name, std::vector<std::string> values, std::vector<double> levels,
                std::string desc) {
    return FeatureDef{std::move(name), FeatureKind::ordinal, std::move(values), std::move(levels),
                      std::move(desc)};
  };
  FeatureSchema s;
  s.features = {
      ord("victim_age", {"infant", "toddler", "child", "adolescent"}, {0, 1, 2, 3},
          "Age band of the alleged victim at the time of the referral (synthetic)."),
      cat("victim_gender", {"female", "male"}, "Gender of the alleged victim (synthetic)."),
      cat("family_race", {"caucasian", "african_american", "hispanic", "other"},
          "Race of the victim's family as recorded in the referral (synthetic)."),
      cat("public_assistance", {"no", "yes"},
          "Whether the family has used public assistance services (synthetic)."),
      cat("perpetrator_gender", {"female", "male"}, "Gender of the alleged perpetrator (synthetic)."),
      cat("allegation_type",
          {"neglect", "caregiver_substance_abuse", "physical_abuse", "sexual_abuse"},
          "Primary allegation in the referral (synthetic)."),
      ord("perpetrator_age", {"under_20", "20_29", "30_39", "40_plus"}, {0, 1, 2, 3},
          "Age band of the alleged perpetrator (synthetic)."),
      ord("referral_history", {"none", "one", "two_to_four", "five_plus"}, {0, 1, 2, 3},
          "Number of prior referrals involving the family (synthetic)."),
      cat("reporter_type", {"school", "medical", "law_enforcement", "relative", "anonymous"},
          "Who placed the call to the hotline (synthetic)."),
      cat("perpetrator_relationship", {"parent", "relative", "non_relative"},
          "Relationship of the alleged perpetrator to the victim (synthetic)."),
      ord("number_of_parents", {"one", "two"}, {1, 2},
          "Number of parents in the household (synthetic)."),
      ord("region_wealth", {"low", "middle", "high"}, {0, 1, 2},
          "Relative wealth of the family's region of residence (synthetic)."),
  };
  s.sensitive_attributes = {"victim_age", "victim_gender", "family_race", "public_assistance",
                            "perpetrator_gender"};
  return s;
}

// Hidden linear logit used to score generated cases: intercept plus one
// additive contribution per (feature, value).
struct ScoreModel {
  double intercept = 0.0;
  std::map<std::string, std::vector<double>> contributions;
};

inline ScoreModel default_score_model() {
  ScoreModel m;
  m.intercept = -1.6;
  m.contributions = {
      {"victim_age", {0.8, 0.5, 0.1, -0.3}},
      {"victim_gender", {0.0, 0.0}},
      {"family_race", {0.0, 0.2, 0.1, 0.0}},
      {"public_assistance", {0.0, 0.4}},
      {"perpetrator_gender", {0.0, 0.1}},
      {"allegation_type", {0.0, 0.6, 1.0, 1.4}},
      {"perpetrator_age", {0.3, 0.1, 0.0, -0.1}},
      {"referral_history", {0.0, 0.5, 1.0, 1.6}},
      {"reporter_type", {0.1, 0.4, 0.5, 0.0, -0.3}},
      {"perpetrator_relationship", {0.3, 0.1, 0.0}},
      {"number_of_parents", {0.3, 0.0}},
      {"region_wealth", {0.3, 0.1, 0.0}},
  };
  return m;
}

// Logit of the hidden model for a case. Features absent from the model
// contribute their normalized level minus one half when ordinal, else zero.
inline double hidden_logit(const FeatureSchema& schema, const ScoreModel& model,
                           const std::vector<std::string>& values) {
  double z = model.intercept;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& f = schema.features[i];
    const auto idx = *f.index_of(values[i]);
    auto it = model.contributions.find(f.name);
    if (it != model.contributions.end() && idx < it->second.size()) {
      z += it->second[idx];
    } else if (f.kind == FeatureKind::ordinal) {
      const double lo = f.levels.front(), hi = f.levels.back();
      z += (f.levels[idx] - lo) / (hi - lo) - 0.5;
    }
  }
  return z;
}

struct SyntheticConfig {
  double threshold = 0.5;
  double score_noise = 0.5;  // sd of logit noise on the stored model score
  double label_noise = 0.5;  // sd of the independent logit noise behind true labels
  ScoreModel model = default_score_model();
};

// Per-feature value probabilities, keyed by feature name. Features not
// listed are sampled uniformly.
using Marginals = std::map<std::string, std::vector<double>>;

inline void validate_marginals(const FeatureSchema& schema, const Marginals& marginals) {
  for (const auto& [name, probs] : marginals) {
    const auto i = schema.index_of(name);
    if (!i) throw BadMarginals("marginals name unknown feature '" + name + "'");
    const auto& f = schema.features[*i];
    if (probs.size() != f.values.size())
      throw BadMarginals("marginals for '" + name + "' need " + std::to_string(f.values.size()) +
                         " probabilities");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw BadMarginals("marginals for '" + name + "' must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw BadMarginals("marginals for '" + name + "' sum to " + std::to_string(sum));
  }
}

// Draws n cases with independent per-feature values. Each case stores a model
// score, its binarized prediction, and a true label from a second noisy draw
// of the same hidden logit, so predictions and labels can disagree.
inline Dataset generate_synthetic(const FeatureSchema& schema, std::size_t n, std::uint64_t seed,
                                  const Marginals& marginals = {},
                                  const SyntheticConfig& config = {}) {
  validate(schema);
  if (n == 0) throw ValidationError("n must be at least 1");
  if (!(config.threshold > 0.0 && config.threshold < 1.0))
    throw SchemaError("threshold must lie in (0,1)");
  validate_marginals(schema, marginals);

  std::vector<std::vector<double>> cdf(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& f = schema.features[i];
    std::vector<double> probs;
    if (auto it = marginals.find(f.name); it != marginals.end())
      probs = it->second;
    else
      probs.assign(f.values.size(), 1.0 / static_cast<double>(f.values.size()));
    double acc = 0.0;
    for (double p : probs) cdf[i].push_back(acc += p);
  }

  Rng rng(seed);
  Dataset d;
  d.schema = schema;
  d.threshold = config.threshold;
  d.provenance = Provenance::synthetic;
  d.cases.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Case c;
    c.id = std::to_string(k + 1);
    c.values.resize(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const double u = rng.uniform() * cdf[i].back();
      // First bucket whose cumulative mass exceeds u; zero-mass values are
      // never selected.
      std::size_t j = 0;
      while (j + 1 < cdf[i].size() && !(u < cdf[i][j])) ++j;
      c.values[i] = schema.features[i].values[j];
    }
    const double z = hidden_logit(schema, config.model, c.values);
    const double score = logistic(z + config.score_noise * rng.normal());
    const double truth = logistic(z + config.label_noise * rng.normal());
    c.score = score;
    c.prediction = binarize(score, config.threshold);
    c.true_label = binarize(truth, config.threshold);
    d.cases.push_back(std::move(c));
  }
  return d;
}

inline json to_json(const Marginals& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

inline Marginals marginals_from_json(const json& j) {
  Marginals m;
  try {
    for (const auto& [k, v] : j.items()) m[k] = v.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw BadMarginals(std::string("malformed marginals: ") + e.what());
  }
  return m;
}

}  // namespace fairlicit
