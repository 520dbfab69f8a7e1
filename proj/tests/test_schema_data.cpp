#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>

#include "fairlicit/dataset_io.hpp"
#include "fairlicit/random.hpp"
#include "fairlicit/ratio.hpp"
#include "fairlicit/synthetic.hpp"

using namespace fairlicit;

namespace {

std::string header() {
  std::string h = "id";
  for (const auto& f : default_schema().features) h += "," + f.name;
  return h + ",true_label,score,prediction\n";
}

std::string row(const std::string& id, const std::string& tail) {
  return id + ",infant,female,caucasian,no,female,neglect,under_20,none,school,parent,one,low," + tail + "\n";
}

template <class E>
std::string error_name(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e.name();
  }
  return "none";
}

}  // namespace

TEST(Ratio, ReducesAndCompares) {
  EXPECT_EQ(Ratio(2, 4), Ratio(1, 2));
  EXPECT_EQ(Ratio(2, 4).num(), 1);
  EXPECT_EQ(Ratio(2, 4).den(), 2);
  EXPECT_LT(Ratio(1, 3), Ratio(1, 2));
  EXPECT_EQ(abs_diff(Ratio(3, 4), Ratio(1, 2)), Ratio(1, 4));
  EXPECT_EQ(abs_diff(Ratio(1, 2), Ratio(3, 4)), Ratio(1, 4));
  EXPECT_THROW(Ratio(1, 0), std::invalid_argument);
  EXPECT_FALSE(make_rate(0, 0).has_value());
}

TEST(Ratio, WithinIsExactAtDecimalTolerances) {
  EXPECT_TRUE(Ratio(1, 4).within(0.25));
  EXPECT_TRUE(Ratio(1, 10).within(0.1));
  EXPECT_FALSE(Ratio(26, 100).within(0.25));
  EXPECT_TRUE(Ratio(0, 1).within(0.0));
}

TEST(Labels, BinarizeIsInclusiveAtThreshold) {
  EXPECT_EQ(binarize(0.5, 0.5), Label::high);
  EXPECT_EQ(binarize(std::nextafter(0.5, 0.0), 0.5), Label::low);
  EXPECT_EQ(binarize(1.0, 0.5), Label::high);
  EXPECT_EQ(binarize(0.0, 0.5), Label::low);
}

TEST(Ids, NumericIdsSortFirstAndByValue) {
  EXPECT_TRUE(id_less("2", "10"));
  EXPECT_FALSE(id_less("10", "2"));
  EXPECT_TRUE(id_less("10", "a"));
  EXPECT_TRUE(id_less("007", "7a"));
  EXPECT_TRUE(id_less("9", "007"));  // leading zero makes it text
  EXPECT_FALSE(id_less("x", "x"));
}

TEST(Schema, DefaultSchemaIsValidAndRoundTrips) {
  const auto s = default_schema();
  EXPECT_NO_THROW(validate(s));
  EXPECT_EQ(s.size(), 12u);
  EXPECT_EQ(s.sensitive_attributes.size(), 5u);
  EXPECT_EQ(schema_from_json(to_json(s)), s);
}

TEST(Schema, RejectsBrokenDefinitions) {
  auto s = default_schema();
  s.sensitive_attributes.push_back("nope");
  EXPECT_THROW(validate(s), SchemaError);
  s = default_schema();
  s.features[0].levels = {0, 1};
  EXPECT_THROW(validate(s), SchemaError);
  s = default_schema();
  s.features[1].values = {"female", "female"};
  EXPECT_THROW(validate(s), SchemaError);
  s = default_schema();
  s.features[2].name = s.features[1].name;
  EXPECT_THROW(validate(s), SchemaError);
}

TEST(Csv, ParsesAndDerivesPredictionFromScore) {
  const auto d = parse_dataset_csv(default_schema(), header() + row("a", "high,0.5,") + row("b", "low,0.49,low"));
  ASSERT_EQ(d.cases.size(), 2u);
  EXPECT_EQ(d.cases[0].prediction, Label::high);
  EXPECT_EQ(d.cases[1].prediction, Label::low);
  EXPECT_EQ(d.cases[0].true_label, Label::high);
  EXPECT_EQ(d.provenance, Provenance::imported);
}

TEST(Csv, ColumnsMayComeInAnyOrderAndIdsDefaultToRowNumbers) {
  const auto schema = default_schema();
  std::string text;
  for (std::size_t i = schema.size(); i-- > 0;) text += schema.features[i].name + (i ? "," : "\n");
  for (std::size_t i = schema.size(); i-- > 0;) text += schema.features[i].values.back() + (i ? "," : "\n");
  const auto d = parse_dataset_csv(schema, text);
  ASSERT_EQ(d.cases.size(), 1u);
  EXPECT_EQ(d.cases[0].id, "1");
  for (std::size_t i = 0; i < schema.size(); ++i) EXPECT_EQ(d.cases[0].values[i], schema.features[i].values.back());
}

TEST(Csv, QuotedFieldsAreHonoured) {
  const auto d = parse_dataset_csv(default_schema(), header() + row("\"a,1\"", ",,"));
  EXPECT_EQ(d.cases.at(0).id, "a,1");
}

TEST(Csv, ReportsFirstBadCell) {
  const auto schema = default_schema();
  try {
    parse_dataset_csv(schema, header() + row("a", ",,") + row("b", "maybe,,"));
    FAIL();
  } catch (const ValueError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "true_label");
  }
  try {
    parse_dataset_csv(schema, header() + row("a", ",1.5,"));
    FAIL();
  } catch (const ValueError& e) {
    EXPECT_EQ(e.column(), "score");
  }
  try {
    parse_dataset_csv(schema, header() + row("a", ",0.9,low"));
    FAIL();
  } catch (const ValueError& e) {
    EXPECT_EQ(e.column(), "prediction");
  }
  EXPECT_THROW(parse_dataset_csv(schema, header() + row("a", ",,") + row("a", ",,")), DuplicateId);
  EXPECT_THROW(parse_dataset_csv(schema, "id,victim_age\n1,infant\n"), SchemaError);
  EXPECT_THROW(parse_dataset_csv(schema, header() + row("a", ",,"), 1.0), SchemaError);
}

TEST(Csv, RoundTripsGeneratedData) {
  const auto d = generate_synthetic(default_schema(), 300, 8);
  const auto back = parse_dataset_csv(d.schema, to_csv(d), d.threshold);
  EXPECT_EQ(back.cases, d.cases);
}

TEST(Json, DatasetRoundTripIsByteStable) {
  const auto d = generate_synthetic(default_schema(), 100, 3);
  const auto text = serialize(d);
  const auto back = dataset_from_json(json::parse(text));
  EXPECT_EQ(back, d);
  EXPECT_EQ(serialize(back), text);
}

TEST(Generator, SameSeedSameBytes) {
  const auto a = serialize(generate_synthetic(default_schema(), 400, 99));
  EXPECT_EQ(a, serialize(generate_synthetic(default_schema(), 400, 99)));
  EXPECT_NE(a, serialize(generate_synthetic(default_schema(), 400, 100)));
}

TEST(Generator, CasesAreValidAndProvenanceSynthetic) {
  const auto d = generate_synthetic(default_schema(), 500, 1);
  EXPECT_NO_THROW(validate(d));
  EXPECT_EQ(d.provenance, Provenance::synthetic);
  EXPECT_TRUE(d.has_labels());
  EXPECT_TRUE(d.has_predictions());
  std::size_t disagree = 0;
  for (const auto& c : d.cases) {
    EXPECT_EQ(*c.prediction, binarize(*c.score, d.threshold));
    disagree += c.prediction != c.true_label;
  }
  EXPECT_GT(disagree, 0u);  // labels are a separate noisy draw
}

// Empirical value shares approach the requested marginals.
TEST(Generator, HonoursMarginals) {
  const auto schema = default_schema();
  const Marginals m = {{"victim_age", {0.7, 0.1, 0.1, 0.1}}, {"public_assistance", {0.2, 0.8}}};
  const std::size_t n = 20000;
  const auto d = generate_synthetic(schema, n, 4, m);
  for (const auto& [name, probs] : m) {
    const auto col = schema.require_index(name);
    std::map<std::string, std::size_t> seen;
    for (const auto& c : d.cases) ++seen[c.values[col]];
    for (std::size_t k = 0; k < probs.size(); ++k) {
      const double share = static_cast<double>(seen[schema.features[col].values[k]]) / n;
      EXPECT_NEAR(share, probs[k], 4 * std::sqrt(probs[k] * (1 - probs[k]) / n)) << name << " " << k;
    }
  }
}

TEST(Generator, ZeroMassValuesNeverAppear) {
  const auto d = generate_synthetic(default_schema(), 2000, 5, {{"victim_gender", {0.0, 1.0}}});
  for (const auto& c : d.cases) EXPECT_EQ(c.values[1], "male");
}

TEST(Generator, RejectsBadInput) {
  const auto s = default_schema();
  EXPECT_THROW(generate_synthetic(s, 10, 1, {{"victim_gender", {0.5, 0.6}}}), BadMarginals);
  EXPECT_THROW(generate_synthetic(s, 10, 1, {{"victim_gender", {1.0}}}), BadMarginals);
  EXPECT_THROW(generate_synthetic(s, 10, 1, {{"nope", {1.0}}}), BadMarginals);
  EXPECT_THROW(generate_synthetic(s, 10, 1, {{"victim_gender", {-0.5, 1.5}}}), BadMarginals);
  EXPECT_THROW(generate_synthetic(s, 0, 1), ValidationError);
}

// Random single-byte corruptions of a valid CSV either parse to a valid
// dataset or raise a library error; nothing else escapes.
TEST(Csv, CorruptionNeverEscapesAsForeignException) {
  const auto text = to_csv(generate_synthetic(default_schema(), 20, 6));
  Rng rng(12);
  const std::string alphabet = ",\"\n\r x9.-highlow";
  std::size_t parsed = 0, rejected = 0;
  for (int t = 0; t < 3000; ++t) {
    auto bad = text;
    const int edits = 1 + static_cast<int>(rng.below(3));
    for (int e = 0; e < edits; ++e) bad[rng.below(bad.size())] = alphabet[rng.below(alphabet.size())];
    try {
      const auto d = parse_dataset_csv(default_schema(), bad);
      EXPECT_NO_THROW(validate(d));
      ++parsed;
    } catch (const Error&) {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 0u);
  EXPECT_EQ(parsed + rejected, 3000u);
}

TEST(Errors, CarryStableNames) {
  EXPECT_EQ(error_name<Error>([] { throw DuplicateId("x"); }), "DuplicateId");
  EXPECT_EQ(error_name<Error>([] { throw ValueError(1, "c", "d"); }), "ValueError");
  EXPECT_EQ(error_name<Error>([] { load_dataset_json("/nonexistent/file.json"); }), "IoError");
}
