#include <gtest/gtest.h>

#include <cmath>

#include "fairlicit/random.hpp"
#include "fairlicit/synthetic.hpp"
#include "fairlicit/training.hpp"
#include "oracles.hpp"

using namespace fairlicit;

namespace {

TrainingConfig plain() {
  TrainingConfig c;
  c.lambda_pair = 0.0;
  return c;
}

std::vector<double> numeric_gradient(const Objective& obj, std::vector<double> theta, double h = 1e-5) {
  std::vector<double> g(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double t = theta[k];
    theta[k] = t + h;
    const double up = obj.value(theta);
    theta[k] = t - h;
    const double down = obj.value(theta);
    theta[k] = t;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

// Two cases differing only in referral history.
Dataset two_cases() {
  Dataset d;
  d.schema = default_schema();
  Case a = default_fixture_pairs().pairs[0].a;
  Case b = a;
  a.id = "A";
  b.id = "B";
  a.values[d.schema.require_index("referral_history")] = "five_plus";
  b.values[d.schema.require_index("referral_history")] = "none";
  a.true_label = Label::high;
  b.true_label = Label::low;
  d.cases = {a, b};
  return d;
}

}  // namespace

TEST(Constraints, PerParticipantPolicy) {
  const std::vector<PairJudgment> js = {{"1", "2", PairChoice::prioritize_a, "p", "q"},
                                        {"1", "2", PairChoice::prioritize_b, "p", "q"},
                                        {"3", "4", PairChoice::equal, "p", "q"},
                                        {"3", "4", PairChoice::no_opinion, "p", "q"},
                                        {"3", "4", PairChoice::not_comfortable, "p", "q"}};
  const auto c = derive_constraints(js, ConstraintPolicy::per_participant, nullptr, 0.2);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], PairConstraint::strict("1", "2", 0.2));
  EXPECT_EQ(c[1], PairConstraint::strict("2", "1", 0.2));
  EXPECT_EQ(c[2], PairConstraint::equal("3", "4", 0.2));
}

TEST(Constraints, BordaPolicyCollapsesEachPair) {
  const std::vector<PairJudgment> js = {{"2", "1", PairChoice::prioritize_a, "p", "q"},
                                        {"1", "2", PairChoice::prioritize_b, "p", "q"},
                                        {"1", "2", PairChoice::prioritize_a, "p", "q"},
                                        {"3", "4", PairChoice::prioritize_a, "p", "q"},
                                        {"4", "3", PairChoice::prioritize_a, "p", "q"},
                                        {"5", "6", PairChoice::no_opinion, "p", "q"}};
  const auto c = derive_constraints(js, ConstraintPolicy::borda_aggregate);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], PairConstraint::strict("2", "1"));
  EXPECT_EQ(c[1], PairConstraint::equal("3", "4"));
}

TEST(Constraints, ValidationAndUnknownCases) {
  const auto d = generate_synthetic(default_schema(), 5, 1);
  EXPECT_THROW(derive_constraints({{"1", "99", PairChoice::equal, "", ""}}, ConstraintPolicy::per_participant, &d),
               UnknownCase);
  EXPECT_THROW(validate(PairConstraint::strict("1", "1")), ValidationError);
  EXPECT_THROW(validate(PairConstraint::strict("1", "2", -0.1)), ValidationError);
  EXPECT_THROW(validate(PairConstraint::equal("1", "2", 0.1, std::nan(""))), ValidationError);
  EXPECT_THROW(parse_policy("majority"), ValidationError);
}

TEST(Constraints, FixtureCasesAreAddedOnlyWhenReferenced) {
  const auto d = generate_synthetic(default_schema(), 5, 1);
  EXPECT_EQ(with_referenced_fixtures(d, {{"1", "2", PairChoice::equal, "", ""}}).cases.size(), 5u);
  const auto grown = with_referenced_fixtures(d, {{"fx03a", "fx03b", PairChoice::equal, "", ""}});
  EXPECT_EQ(grown.cases.size(), 5u + 28u);
  EXPECT_TRUE(grown.has_labels());
  EXPECT_NO_THROW(validate(grown));
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto d = generate_synthetic(default_schema(), 15, 100 + t);
    std::vector<PairConstraint> cons = {PairConstraint::strict("1", "2", 0.3), PairConstraint::strict("4", "3", 0.5),
                                        PairConstraint::equal("5", "6", 0.1, 2.0)};
    TrainingConfig cfg;
    cfg.lambda_pair = 2;
    cfg.lambda_parity = 1.5;
    cfg.lambda_odds = 0.7;
    cfg.fairness_attributes = {"victim_age", "family_race"};
    const Objective obj(d, cons, cfg);
    std::vector<double> theta(obj.size());
    for (auto& v : theta) v = rng.normal();
    const auto g = obj.gradient(theta);
    const auto n = numeric_gradient(obj, theta);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(g[k], n[k], 1e-6 * std::max(1.0, std::abs(n[k])));
  }
}

TEST(Objective, TermsAtZeroAreKnown) {
  const auto d = two_cases();
  const Objective obj(d, {PairConstraint::strict("A", "B", 0.25)}, TrainingConfig{});
  const auto t = obj.terms(std::vector<double>(obj.size(), 0.0));
  EXPECT_NEAR(t.cross_entropy, std::log(2.0), 1e-15);
  EXPECT_EQ(t.l2, 0.0);
  EXPECT_NEAR(t.pair_strict, 0.0625, 1e-15);  // (0.25 - 0)^2
  EXPECT_EQ(t.parity, 0.0);
}

TEST(Objective, RejectsBadInput) {
  auto d = generate_synthetic(default_schema(), 10, 1);
  EXPECT_THROW(Objective(d, {PairConstraint::strict("1", "x")}, TrainingConfig{}), UnknownCase);
  auto cfg = TrainingConfig{};
  cfg.lambda_parity = -1;
  EXPECT_THROW(Objective(d, {}, cfg), ValidationError);
  cfg = TrainingConfig{};
  cfg.excluded_attributes = {"shoe"};
  EXPECT_THROW(Objective(d, {}, cfg), UnknownAttribute);
  cfg = TrainingConfig{};
  cfg.fairness_attributes = {"shoe"};
  EXPECT_THROW(Objective(d, {}, cfg), UnknownAttribute);
  d.cases[0].true_label.reset();
  EXPECT_THROW(Objective(d, {}, TrainingConfig{}), MissingLabels);
  d.cases.clear();
  EXPECT_THROW(Objective(d, {}, TrainingConfig{}), EmptyDataset);
}

TEST(Train, UnconstrainedFitMatchesNewton) {
  const auto d = generate_synthetic(default_schema(), 80, 12);
  auto cfg = plain();
  cfg.l2 = 0.05;
  const auto fit = train(d, {}, cfg);
  EXPECT_LT(fit.report.convergence->gradient_norm, 1e-5);
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (const auto& c : d.cases) {
    X.push_back(oracle::encode(d.schema, c));
    y.push_back(c.true_label == Label::high);
  }
  const auto want = oracle::logistic_fit(X, y, 0.05);
  const auto got = parameters(fit.model);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-6) << fit.model.coordinate_names[k];
}

TEST(Train, StrictConstraintIsMetWithHeavyPenalty) {
  const auto d = two_cases();
  auto cfg = TrainingConfig{};
  cfg.lambda_pair = 100;
  const auto fit = train(d, {PairConstraint::strict("A", "B", 0.1)}, cfg);
  EXPECT_GE(fit.model.score(d.at("A")) - fit.model.score(d.at("B")), 0.1 - 1e-3);
  EXPECT_EQ(fit.report.strict_satisfied, 1);
  EXPECT_EQ(fit.report.satisfied_fraction, Ratio(1, 1));
}

// A constraint against the labels pulls the scores toward each other.
TEST(Train, PairPenaltyOpposesLabels) {
  const auto d = two_cases();
  auto gap = [&](double lambda) {
    auto cfg = TrainingConfig{};
    cfg.lambda_pair = lambda;
    const auto fit = train(d, {PairConstraint::strict("B", "A", 0.1)}, cfg);
    return fit.model.score(d.at("A")) - fit.model.score(d.at("B"));
  };
  const double free = gap(0.0), pulled = gap(10.0), hard = gap(1000.0);
  EXPECT_GT(free, pulled);
  EXPECT_GT(pulled, hard);
}

TEST(Train, EqualConstraintShrinksScoreDifference) {
  const auto d = generate_synthetic(default_schema(), 60, 7);
  const auto base = train(d, {}, plain());
  auto cfg = TrainingConfig{};
  cfg.lambda_pair = 50;
  std::vector<PairConstraint> cons;
  for (int i = 1; i <= 10; ++i) cons.push_back(PairConstraint::equal(std::to_string(i), std::to_string(i + 10)));
  const auto tied = train(d, cons, cfg);
  double before = 0, after = 0;
  for (const auto& c : cons) {
    before += std::abs(base.model.score(d.at(c.a)) - base.model.score(d.at(c.b)));
    after += std::abs(tied.model.score(d.at(c.a)) - tied.model.score(d.at(c.b)));
  }
  EXPECT_LT(after, before);
  EXPECT_EQ(tied.report.equal_constraints, 10);
}

TEST(Train, ParityGapShrinksAsPenaltyGrows) {
  const auto d = generate_synthetic(default_schema(), 150, 2);
  double prev = 1e300;
  for (double lam : {0.0, 1.0, 10.0, 100.0}) {
    auto cfg = plain();
    cfg.lambda_parity = lam;
    const auto fit = train(d, {}, cfg);
    const double gap = Objective(d, {}, cfg).smoothed_parity(parameters(fit.model));
    EXPECT_LE(gap, prev + 1e-9) << lam;
    prev = gap;
  }
}

TEST(Train, OddsPenaltyReducesOddsTerm) {
  const auto d = generate_synthetic(default_schema(), 150, 3);
  auto off = plain();
  auto on = plain();
  on.lambda_odds = 50;
  const auto a = train(d, {}, off), b = train(d, {}, on);
  const Objective probe(d, {}, on);
  EXPECT_LT(probe.terms(parameters(b.model)).odds, probe.terms(parameters(a.model)).odds);
}

TEST(Train, ExcludedAttributeHasNoInfluence) {
  auto cfg = TrainingConfig{};
  cfg.excluded_attributes = {"family_race", "victim_gender"};
  cfg.lambda_parity = 2;
  const auto fit = train(generate_synthetic(default_schema(), 100, 4), {}, cfg);
  for (const auto& n : fit.model.coordinate_names) {
    EXPECT_EQ(n.find("family_race"), std::string::npos);
    EXPECT_EQ(n.find("victim_gender"), std::string::npos);
  }
  const auto probe = generate_synthetic(default_schema(), 300, 5);
  for (auto c : probe.cases) {
    const double base = fit.model.score(c);
    c.values[1] = c.values[1] == "male" ? "female" : "male";
    c.values[2] = "hispanic";
    EXPECT_EQ(fit.model.score(c), base);
  }
}

TEST(Train, DeterministicAndRoundTrips) {
  const auto d = generate_synthetic(default_schema(), 60, 9);
  auto cfg = TrainingConfig{};
  cfg.lambda_parity = 0.5;
  cfg.max_iterations = 500;
  const std::vector<PairConstraint> cons = {PairConstraint::strict("3", "9")};
  const auto a = train(d, cons, cfg), b = train(d, cons, cfg);
  EXPECT_EQ(serialize(a.model), serialize(b.model));
  EXPECT_EQ(to_json(a.report), to_json(b.report));
  const auto back = model_from_json(json::parse(serialize(a.model)));
  EXPECT_EQ(serialize(back), serialize(a.model));
  for (const auto& c : d.cases) EXPECT_EQ(back.score(c), a.model.score(c));
  EXPECT_EQ(to_json(evaluate(back, d, cons)), [&] {
    auto j = to_json(a.report);
    j["convergence"] = nullptr;
    return j;
  }());
}

TEST(Train, ConfigJsonRoundTrip) {
  TrainingConfig c;
  c.lambda_odds = 3;
  c.excluded_attributes = {"family_race"};
  c.fairness_attributes = {"victim_age"};
  c.seed = 9;
  EXPECT_EQ(training_config_from_json(to_json(c)), c);
  EXPECT_THROW(training_config_from_json(json{{"l2", "big"}}), ValidationError);
  EXPECT_THROW(model_from_json(json{{"format", "other"}}), ValidationError);
}

TEST(Evaluate, HardGapsUseModelThreshold) {
  const auto d = generate_synthetic(default_schema(), 100, 10);
  const auto fit = train(d, {}, plain());
  const auto r = evaluate(fit.model, d, {});
  ASSERT_EQ(r.gaps.size(), 5u);
  Dataset scored = d;
  for (auto& c : scored.cases) c.prediction = binarize(fit.model.score(c), fit.model.threshold);
  EXPECT_EQ(r.gaps[0].parity_gap, statistical_parity_report(scored, "victim_age").max_gap);
  EXPECT_FALSE(r.satisfied_fraction.has_value());
  auto other = d;
  other.schema.features[0].description = "changed";
  EXPECT_THROW(evaluate(fit.model, other, {}), SchemaMismatch);
  EXPECT_NE(render_text(r).find("objective"), std::string::npos);
}
