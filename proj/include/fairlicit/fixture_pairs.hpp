#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairlicit/schema.hpp"
#include "fairlicit/synthetic.hpp"

namespace fairlicit {

struct FixturePair {
  int number = 0;  // 1-based
  Case a;
  Case b;
  std::vector<std::string> differing;  // feature names, exactly the ones that differ
};

struct FixturePairSet {
  std::vector<FixturePair> pairs;

  const Case* find_case(std::string_view id) const {
    for (const auto& p : pairs) {
      if (p.a.id == id) return &p.a;
      if (p.b.id == id) return &p.b;
    }
    return nullptr;
  }
};

// Checks every pair against the schema: both cases conform and differ in
// exactly the listed features.
inline void verify(const FixturePairSet& set, const FeatureSchema& schema) {
  for (const auto& p : set.pairs) {
    validate_case(schema, p.a, 0.5, static_cast<std::size_t>(p.number));
    validate_case(schema, p.b, 0.5, static_cast<std::size_t>(p.number));
    std::set<std::string> expected(p.differing.begin(), p.differing.end());
    for (const auto& name : expected)
      if (!schema.index_of(name))
        throw SchemaMismatch("fixture pair " + std::to_string(p.number) + " names unknown feature '" +
                             name + "'");
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const bool differs = p.a.values[i] != p.b.values[i];
      if (differs != (expected.count(schema.features[i].name) > 0))
        throw SchemaMismatch("fixture pair " + std::to_string(p.number) +
                             (differs ? " differs unexpectedly in " : " does not differ in ") +
                             schema.features[i].name);
    }
  }
}

// The fourteen fixed comparison pairs over default_schema(). Pairs 1-5 differ
// in a single sensitive attribute; later pairs differ in two or three
// features. Values the pair shares are arbitrary.
inline FixturePairSet default_fixture_pairs() {
  const FeatureSchema schema = default_schema();
  const std::map<std::string, std::string> base = {
      {"victim_age", "child"},         {"victim_gender", "female"},
      {"family_race", "caucasian"},    {"public_assistance", "no"},
      {"perpetrator_gender", "male"},  {"allegation_type", "neglect"},
      {"perpetrator_age", "30_39"},    {"referral_history", "one"},
      {"reporter_type", "school"},     {"perpetrator_relationship", "parent"},
      {"number_of_parents", "two"},    {"region_wealth", "middle"},
  };
  using Overrides = std::map<std::string, std::string>;
  struct Spec {
    Overrides shared, a, b;
  };
  const std::vector<Spec> specs = {
      {{}, {{"victim_age", "toddler"}}, {{"victim_age", "adolescent"}}},
      {{}, {{"victim_gender", "female"}}, {{"victim_gender", "male"}}},
      {{}, {{"family_race", "caucasian"}}, {{"family_race", "african_american"}}},
      {{}, {{"public_assistance", "no"}}, {{"public_assistance", "yes"}}},
      {{}, {{"perpetrator_gender", "female"}}, {{"perpetrator_gender", "male"}}},
      {{},
       {{"allegation_type", "physical_abuse"}, {"perpetrator_age", "20_29"}},
       {{"allegation_type", "neglect"}, {"perpetrator_age", "40_plus"}}},
      {{},
       {{"family_race", "african_american"}, {"referral_history", "none"}},
       {{"family_race", "caucasian"}, {"referral_history", "two_to_four"}}},
      {{},
       {{"public_assistance", "yes"}, {"victim_age", "infant"}, {"reporter_type", "medical"}},
       {{"public_assistance", "no"}, {"victim_age", "child"}, {"reporter_type", "school"}}},
      {{{"perpetrator_relationship", "non_relative"}},
       {{"victim_age", "infant"}, {"perpetrator_age", "under_20"}},
       {{"victim_age", "adolescent"}, {"perpetrator_age", "40_plus"}}},
      {{{"perpetrator_relationship", "relative"}},
       {{"victim_age", "toddler"}, {"perpetrator_age", "30_39"}},
       {{"victim_age", "child"}, {"perpetrator_age", "20_29"}}},
      {{},
       {{"number_of_parents", "one"}, {"region_wealth", "low"}, {"perpetrator_relationship", "non_relative"}},
       {{"number_of_parents", "two"}, {"region_wealth", "high"}, {"perpetrator_relationship", "parent"}}},
      {{},
       {{"region_wealth", "low"}, {"public_assistance", "yes"}, {"referral_history", "one"}},
       {{"region_wealth", "high"}, {"public_assistance", "no"}, {"referral_history", "none"}}},
      {{},
       {{"family_race", "hispanic"}, {"region_wealth", "low"}, {"public_assistance", "yes"}},
       {{"family_race", "caucasian"}, {"region_wealth", "middle"}, {"public_assistance", "no"}}},
      {{},
       {{"number_of_parents", "two"}, {"victim_age", "toddler"}, {"victim_gender", "male"}},
       {{"number_of_parents", "one"}, {"victim_age", "adolescent"}, {"victim_gender", "female"}}},
  };

  auto make = [&](const std::string& id, const Overrides& shared, const Overrides& own) {
    Case c;
    c.id = id;
    for (const auto& f : schema.features) {
      auto v = base.at(f.name);
      if (auto it = shared.find(f.name); it != shared.end()) v = it->second;
      if (auto it = own.find(f.name); it != own.end()) v = it->second;
      c.values.push_back(v);
    }
    return c;
  };

  FixturePairSet set;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto num = static_cast<int>(k + 1);
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "fx%02d", num);
    FixturePair p;
    p.number = num;
    p.a = make(std::string(prefix) + "a", specs[k].shared, specs[k].a);
    p.b = make(std::string(prefix) + "b", specs[k].shared, specs[k].b);
    for (const auto& f : schema.features)
      if (specs[k].a.count(f.name)) p.differing.push_back(f.name);
    set.pairs.push_back(std::move(p));
  }
  return set;
}

// Appends the fixture cases to a dataset so constraints that reference them
// can be trained on. Scores come from the hidden synthetic model at the
// dataset's threshold; labels and predictions are its binarization. Cases
// whose ids already exist are left alone.
inline Dataset with_fixture_cases(Dataset d, const FixturePairSet& set,
                                  const ScoreModel& model = default_score_model()) {
  verify(set, d.schema);
  for (const auto& p : set.pairs) {
    for (const Case* c : {&p.a, &p.b}) {
      if (d.find(c->id)) continue;
      Case x = *c;
      const double s = logistic(hidden_logit(d.schema, model, x.values));
      x.score = s;
      x.prediction = binarize(s, d.threshold);
      x.true_label = x.prediction;
      d.cases.push_back(std::move(x));
    }
  }
  return d;
}

}  // namespace fairlicit
