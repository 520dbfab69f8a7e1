#pragma once

// Builders for the bundled fixtures. make_fixtures writes them to disk and
// the tests rebuild them to check the committed files are current.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fairlicit/dataset_io.hpp"
#include "fairlicit/elicitation.hpp"
#include "fairlicit/synthetic.hpp"

namespace fairlicit::fixtures {

// --- group-view examples: infants vs adolescents -------------------------

struct Cell {
  std::string age;
  std::optional<Label> truth;
  Label predicted;
  int count;
};

inline Dataset age_table(const std::vector<Cell>& cells) {
  Dataset d;
  d.schema = default_schema();
  const auto base = default_fixture_pairs().pairs.front().a.values;
  const auto age = d.schema.require_index("victim_age");
  int next = 1;
  for (const auto& c : cells) {
    for (int k = 0; k < c.count; ++k) {
      Case x;
      x.id = std::to_string(next++);
      x.values = base;
      x.values[age] = c.age;
      x.true_label = c.truth;
      x.prediction = c.predicted;
      x.score = c.predicted == Label::high ? 0.75 : 0.25;
      d.cases.push_back(std::move(x));
    }
  }
  return d;
}

// High-risk shares 3/4 (infants) vs 2/4 (adolescents).
inline Dataset parity_violated() {
  return age_table({{"infant", std::nullopt, Label::high, 3},
                    {"infant", std::nullopt, Label::low, 1},
                    {"adolescent", std::nullopt, Label::high, 2},
                    {"adolescent", std::nullopt, Label::low, 2}});
}

// High-risk shares 2/4 in both groups.
inline Dataset parity_satisfied() {
  return age_table({{"infant", std::nullopt, Label::high, 2},
                    {"infant", std::nullopt, Label::low, 2},
                    {"adolescent", std::nullopt, Label::high, 2},
                    {"adolescent", std::nullopt, Label::low, 2}});
}

// (fpr, fnr) = (1/2, 1/5) for infants and (1/3, 2/3) for adolescents.
inline Dataset odds_violated() {
  const auto H = Label::high, L = Label::low;
  return age_table({{"infant", L, H, 1},
                    {"infant", L, L, 1},
                    {"infant", H, H, 4},
                    {"infant", H, L, 1},
                    {"adolescent", L, H, 1},
                    {"adolescent", L, L, 2},
                    {"adolescent", H, H, 1},
                    {"adolescent", H, L, 2}});
}

// (fpr, fnr) = (1/2, 2/3) in both groups.
inline Dataset odds_satisfied() {
  const auto H = Label::high, L = Label::low;
  return age_table({{"infant", L, H, 1},
                    {"infant", L, L, 1},
                    {"infant", H, H, 1},
                    {"infant", H, L, 2},
                    {"adolescent", L, H, 2},
                    {"adolescent", L, L, 2},
                    {"adolescent", H, H, 2},
                    {"adolescent", H, L, 4}});
}

// --- twelve-participant replay set ----------------------------------------

inline constexpr std::size_t kParticipants = 12;
inline constexpr const char* kReplayDatasetId = "ds-0001";

inline Dataset replay_dataset() { return generate_synthetic(default_schema(), 200, 2019); }

// Group answers per participant, in sensitive-attribute order
// (victim_age, victim_gender, family_race, public_assistance,
// perpetrator_gender); 1 = yes, 0 = no.
using GroupRow = std::array<int, 5>;

inline const std::array<GroupRow, kParticipants>& unawareness_answers() {
  static const std::array<GroupRow, kParticipants> rows = {{
      {1, 1, 1, 1, 1}, {0, 1, 1, 1, 1}, {0, 0, 0, 0, 0}, {0, 1, 1, 0, 1},
      {0, 0, 0, 0, 0}, {0, 1, 1, 1, 1}, {1, 1, 1, 1, 1}, {0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0}, {0, 1, 1, 1, 1}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0},
  }};
  return rows;
}

inline const std::array<GroupRow, kParticipants>& parity_answers() {
  static const std::array<GroupRow, kParticipants> rows = {{
      {0, 1, 1, 1, 1}, {1, 1, 1, 0, 0}, {0, 1, 1, 0, 0}, {1, 1, 0, 1, 0},
      {0, 0, 0, 0, 0}, {0, 1, 0, 1, 0}, {0, 1, 1, 1, 1}, {1, 0, 1, 0, 1},
      {0, 0, 1, 0, 1}, {0, 0, 0, 1, 1}, {0, 1, 0, 0, 0}, {0, 0, 0, 0, 0},
  }};
  return rows;
}

// Participants answering "no" to every equalized-odds question; the rest
// answer "yes" throughout.
inline bool odds_all_no(std::size_t p) { return p == 6 || p == 7 || p == 10 || p == 11; }

inline Role role_of(std::size_t p) { return p < 8 ? Role::social_worker : Role::parent; }

// Fixture-pair answers: for each pair, the choices of participants 1..12.
inline std::vector<std::vector<PairChoice>> pair_answers() {
  using C = PairChoice;
  const auto E = C::equal, A = C::prioritize_a, B = C::prioritize_b, N = C::no_opinion,
             X = C::not_comfortable;
  return {
      {A, E, A, E, A, B, A, E, A, E, A, E},  // 1: a 6, equal 5, b 1
      {E, E, E, A, E, E, E, E, E, E, E, E},  // 2: equal 11, a 1
      {E, E, B, E, E, E, E, B, E, E, E, E},  // 3: equal 10, b 2
      {E, A, E, E, N, E, E, E, A, E, E, E},  // 4: equal 9, a 2, no_opinion 1
      {E, E, E, E, E, X, E, E, E, A, E, E},  // 5: equal 10, a 1, not_comfortable 1
      {A, A, A, A, A, A, A, A, A, A, A, A},  // 6: a 12
      {B, B, B, B, B, B, E, B, B, B, B, B},  // 7: b 11, equal 1
      {A, A, E, A, A, A, E, A, A, E, A, A},  // 8: a 9, equal 3
      {A, E, A, A, E, A, A, E, A, A, E, A},  // 9: a 8, equal 4
      {A, A, A, E, A, A, B, A, A, E, A, A},  // 10: a 9, equal 2, b 1
      {E, A, A, E, A, E, A, N, E, A, E, A},  // 11: equal 5, a 6, no_opinion 1
      {E, B, E, E, A, E, B, E, B, E, B, E},  // 12: equal 7, b 4, a 1
      {E, E, B, E, E, B, E, E, B, E, B, E},  // 13: equal 8, b 4
      {A, E, B, A, E, A, B, E, A, B, E, A},  // 14: equal 4, a 5, b 3
  };
}

inline std::string session_id(std::size_t p) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "ses-%04zu", p + 1);
  return buf;
}

// Drives one participant through all four stages.
inline Session run_participant(std::size_t p, const Dataset& d) {
  ParticipantProfile profile;
  profile.role = role_of(p);
  const std::int64_t start = 1'560'000'000'000 + static_cast<std::int64_t>(p) * 86'400'000;
  auto s = Session::start(session_id(p), profile, kReplayDatasetId, d, 100 + p, {}, logical_clock(start, 15'000));
  const auto pairs = pair_answers();
  const auto& schema = d.schema;

  auto group_answer = [&](const GroupFairnessQuestion& q) {
    std::size_t a = 0;
    while (schema.sensitive_attributes[a] != q.attribute) ++a;
    int yes = 0;
    switch (q.criterion) {
      case GroupCriterion::unawareness: yes = unawareness_answers()[p][a]; break;
      case GroupCriterion::statistical_parity: yes = parity_answers()[p][a]; break;
      case GroupCriterion::equalized_odds: yes = odds_all_no(p) ? 0 : 1; break;
    }
    return std::string(to_string(yes ? GroupChoice::yes : GroupChoice::no));
  };

  for (;;) {
    const auto item = s.next_question();
    if (std::holds_alternative<StagePrompt>(item)) break;
    if (const auto* q = std::get_if<PairwiseQuestion>(&item))
      s.record_response({q->question_id, std::string(to_string(pairs[q->fixture_number - 1][p])), ""});
    else
      s.record_response({std::get<GroupFairnessQuestion>(item).question_id,
                         group_answer(std::get<GroupFairnessQuestion>(item)), ""});
  }
  s.advance();

  const PairChoice stage2[] = {PairChoice::equal, PairChoice::prioritize_a, PairChoice::prioritize_b};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto q = std::get<PairwiseQuestion>(s.next_question());
    s.record_response({q.question_id, std::string(to_string(stage2[(p + k) % 3])), ""});
  }
  s.advance();

  WeightVector w = WeightVector::uniform(schema.size());
  w.weights[p % schema.size()] = 2.0;
  w.weights[(p + 5) % schema.size()] = 0.5;
  s.record_exploration(WeightChange{w});
  s.record_exploration(SimilarityFlag{d.cases[p].id, d.cases[p + 20].id, "similar cases, different predictions"});
  s.advance();

  s.record_exploration(GroupQuery{{schema.sensitive_attributes[p % 5]}, Metric::positive_rate});
  s.advance();
  return s;
}

inline std::vector<Session> replay_sessions(const Dataset& d) {
  std::vector<Session> out;
  for (std::size_t p = 0; p < kParticipants; ++p) out.push_back(run_participant(p, d));
  return out;
}

// Writes every bundled fixture below `root`.
inline void write_all(const std::filesystem::path& root) {
  write_file_atomic(root / "default_schema.json", to_json(default_schema()).dump(2) + "\n");
  const std::pair<const char*, Dataset> tables[] = {
      {"age_parity_violated", parity_violated()},
      {"age_parity_satisfied", parity_satisfied()},
      {"age_odds_violated", odds_violated()},
      {"age_odds_satisfied", odds_satisfied()},
  };
  for (const auto& [name, d] : tables) write_file_atomic(root / "group_view" / (std::string(name) + ".json"), serialize(d));

  const auto dir = root / "12participants";
  const auto d = replay_dataset();
  write_file_atomic(dir / "datasets" / (std::string(kReplayDatasetId) + ".json"), serialize(d));
  for (const auto& s : replay_sessions(d)) write_file_atomic(dir / "sessions" / (s.id() + ".json"), serialize(s));
}

}  // namespace fairlicit::fixtures
