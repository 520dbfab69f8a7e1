#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairlicit/elicitation.hpp"
#include "fairlicit/io.hpp"
#include "fairlicit/ratio.hpp"

namespace fairlicit {

// One pairwise judgment resolved to case ids.
struct PairJudgment {
  CaseId case_a;
  CaseId case_b;
  PairChoice choice = PairChoice::no_opinion;
  std::string participant;
  std::string question_id;
  bool operator==(const PairJudgment&) const = default;
};

struct MatrixParticipant {
  std::string id;
  Role role = Role::other;
};

struct GroupKey {
  std::string attribute;
  GroupCriterion criterion = GroupCriterion::unawareness;
  std::string question_id;
};

struct PairKey {
  std::string question_id;
  int fixture_number = 0;
  CaseId case_a;
  CaseId case_b;
};

// Participants x questions grid of recorded choices. Unanswered cells are
// empty. The pairwise block covers the fixed fixture pairs; every pairwise
// answer, fixed or random, is also kept in `judgments`.
struct ResponseMatrix {
  std::vector<MatrixParticipant> participants;
  std::vector<std::string> attributes;
  std::vector<GroupKey> group_questions;
  std::vector<std::vector<std::optional<GroupChoice>>> group_cells;
  std::vector<PairKey> pair_questions;
  std::vector<std::vector<std::optional<PairChoice>>> pair_cells;
  std::vector<PairJudgment> judgments;

  std::optional<std::size_t> participant_index(std::string_view id) const {
    for (std::size_t i = 0; i < participants.size(); ++i)
      if (participants[i].id == id) return i;
    return std::nullopt;
  }
};

// Builds the matrix from session logs. Question columns follow the first
// log's serving order.
inline ResponseMatrix build_response_matrix(const std::vector<json>& logs) {
  ResponseMatrix m;
  std::map<std::string, std::size_t> group_col, pair_col;
  struct Answers {
    std::map<std::string, GroupChoice> group;
    std::map<std::string, PairChoice> pair;
  };
  std::vector<Answers> answers;

  try {
    for (const auto& log : logs) {
      MatrixParticipant p;
      p.id = log.at("session_id").get<std::string>();
      p.role = parse_role(log.at("participant").value("role", std::string("other")));
      if (m.participant_index(p.id)) throw ValidationError("session '" + p.id + "' listed twice");
      m.participants.push_back(p);
      Answers a;
      std::map<std::string, json> served;
      for (const auto& e : log.at("transcript")) {
        const auto type = e.at("type").get<std::string>();
        if (type == "question_served") {
          const auto& q = e.at("question");
          const auto qid = q.at("question_id").get<std::string>();
          served[qid] = q;
          if (q.at("kind") == "group_fairness" && !group_col.count(qid)) {
            group_col[qid] = m.group_questions.size();
            const auto attr = q.at("attribute").get<std::string>();
            m.group_questions.push_back(
                {attr, parse_group_criterion(q.at("criterion").get<std::string>()), qid});
            if (std::find(m.attributes.begin(), m.attributes.end(), attr) == m.attributes.end())
              m.attributes.push_back(attr);
          } else if (q.at("kind") == "pairwise" && q.at("source") == "fixed_fixture" &&
                     !pair_col.count(qid)) {
            pair_col[qid] = m.pair_questions.size();
            m.pair_questions.push_back({qid, q.at("fixture_number").get<int>(),
                                        q.at("case_a").get<std::string>(),
                                        q.at("case_b").get<std::string>()});
          }
        } else if (type == "response_recorded") {
          const auto& r = e.at("response");
          const auto qid = r.at("question_id").get<std::string>();
          const auto it = served.find(qid);
          if (it == served.end()) throw ValidationError("response to unserved question '" + qid + "'");
          const auto choice = r.at("choice").get<std::string>();
          if (it->second.at("kind") == "group_fairness") {
            a.group[qid] = parse_group_choice(choice);
          } else {
            const auto c = parse_pair_choice(choice);
            if (it->second.at("source") == "fixed_fixture") a.pair[qid] = c;
            m.judgments.push_back({it->second.at("case_a").get<std::string>(),
                                   it->second.at("case_b").get<std::string>(), c, p.id, qid});
          }
        }
      }
      answers.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("session log: ") + e.what());
  }

  std::sort(m.pair_questions.begin(), m.pair_questions.end(),
            [](const PairKey& x, const PairKey& y) { return x.question_id < y.question_id; });
  for (const auto& a : answers) {
    std::vector<std::optional<GroupChoice>> grow;
    for (const auto& q : m.group_questions) {
      auto it = a.group.find(q.question_id);
      grow.push_back(it == a.group.end() ? std::nullopt : std::optional(it->second));
    }
    m.group_cells.push_back(std::move(grow));
    std::vector<std::optional<PairChoice>> prow;
    for (const auto& q : m.pair_questions) {
      auto it = a.pair.find(q.question_id);
      prow.push_back(it == a.pair.end() ? std::nullopt : std::optional(it->second));
    }
    m.pair_cells.push_back(std::move(prow));
  }
  return m;
}

inline ResponseMatrix build_response_matrix(const std::vector<const Session*>& sessions) {
  std::vector<json> logs;
  for (const auto* s : sessions) logs.push_back(export_session(*s));
  return build_response_matrix(logs);
}

// ---------------------------------------------------------------------------
// Criterion support

struct AttributeSupport {
  std::string attribute;
  std::int64_t yes = 0, no = 0, no_opinion = 0, unanswered = 0;
};

struct CriterionSupport {
  GroupCriterion criterion = GroupCriterion::unawareness;
  std::int64_t yes = 0;
  std::int64_t total = 0;  // participants x attributes
  Ratio fraction;
  std::vector<AttributeSupport> per_attribute;
  // Participants answering yes (resp. no) for every attribute.
  std::int64_t participants_all_yes = 0;
  std::int64_t participants_all_no = 0;
  std::map<std::string, std::int64_t> yes_by_role;
};

// yes / (participants x attributes); no_opinion and unanswered cells stay in
// the denominator.
inline CriterionSupport criterion_support(const ResponseMatrix& m, GroupCriterion c) {
  if (m.participants.empty() || m.attributes.empty())
    throw EmptyMatrix("response matrix has no group-fairness answers");
  CriterionSupport s;
  s.criterion = c;
  for (const auto& a : m.attributes) s.per_attribute.push_back({a});
  for (std::size_t p = 0; p < m.participants.size(); ++p) {
    std::int64_t yes = 0, no = 0;
    for (std::size_t q = 0; q < m.group_questions.size(); ++q) {
      const auto& key = m.group_questions[q];
      if (key.criterion != c) continue;
      auto& att = *std::find_if(s.per_attribute.begin(), s.per_attribute.end(),
                                [&](const AttributeSupport& x) { return x.attribute == key.attribute; });
      const auto& cell = m.group_cells[p][q];
      if (!cell) ++att.unanswered;
      else if (*cell == GroupChoice::yes) ++att.yes, ++yes;
      else if (*cell == GroupChoice::no) ++att.no, ++no;
      else ++att.no_opinion;
    }
    const auto n_attr = static_cast<std::int64_t>(m.attributes.size());
    if (yes == n_attr) ++s.participants_all_yes;
    if (no == n_attr) ++s.participants_all_no;
    s.yes_by_role[std::string(to_string(m.participants[p].role))] += yes;
  }
  for (auto& a : s.per_attribute) {
    a.unanswered += static_cast<std::int64_t>(m.participants.size()) - (a.yes + a.no + a.no_opinion + a.unanswered);
    s.yes += a.yes;
  }
  s.total = static_cast<std::int64_t>(m.participants.size() * m.attributes.size());
  s.fraction = Ratio(s.yes, s.total);
  return s;
}

// ---------------------------------------------------------------------------
// Consensus

enum class Consensus { unanimous, majority, contested };

inline std::string_view to_string(Consensus c) {
  switch (c) {
    case Consensus::unanimous: return "unanimous";
    case Consensus::majority: return "majority";
    default: return "contested";
  }
}

inline constexpr PairChoice kPairChoices[] = {PairChoice::equal, PairChoice::prioritize_a,
                                              PairChoice::prioritize_b, PairChoice::not_comfortable,
                                              PairChoice::no_opinion};

struct ConsensusRow {
  std::string question_id;
  int fixture_number = 0;
  std::array<std::int64_t, 5> counts{};  // indexed like kPairChoices
  std::int64_t unanswered = 0;
  std::int64_t total = 0;  // participants
  Consensus classification = Consensus::contested;
  std::optional<PairChoice> top_choice;  // most frequent substantive choice
  std::int64_t top_count = 0;
  // At least ten twelfths of participants gave the same substantive choice.
  bool strong_agreement = false;

  std::int64_t count(PairChoice c) const { return counts[static_cast<std::size_t>(c)]; }
};

// Classifies one tally of pairwise answers. Unanimous: every participant gave
// the same substantive choice. Majority: one substantive choice holds
// strictly more than half of all participants. Otherwise contested.
inline ConsensusRow classify_counts(const std::array<std::int64_t, 5>& counts, std::int64_t participants) {
  ConsensusRow r;
  r.counts = counts;
  r.total = participants;
  std::int64_t answered = 0;
  for (auto c : counts) answered += c;
  r.unanswered = participants - answered;
  for (auto c : {PairChoice::equal, PairChoice::prioritize_a, PairChoice::prioritize_b}) {
    const auto n = counts[static_cast<std::size_t>(c)];
    if (n > r.top_count) {
      r.top_count = n;
      r.top_choice = c;
    }
  }
  if (participants > 0 && r.top_count == participants)
    r.classification = Consensus::unanimous;
  else if (2 * r.top_count > participants)
    r.classification = Consensus::majority;
  else
    r.classification = Consensus::contested;
  r.strong_agreement = participants > 0 && 12 * r.top_count >= 10 * participants;
  return r;
}

inline ConsensusRow consensus_class(const ResponseMatrix& m, std::string_view question_id) {
  for (std::size_t q = 0; q < m.pair_questions.size(); ++q) {
    if (m.pair_questions[q].question_id != question_id) continue;
    std::array<std::int64_t, 5> counts{};
    for (std::size_t p = 0; p < m.participants.size(); ++p)
      if (const auto& cell = m.pair_cells[p][q]) ++counts[static_cast<std::size_t>(*cell)];
    auto row = classify_counts(counts, static_cast<std::int64_t>(m.participants.size()));
    row.question_id = m.pair_questions[q].question_id;
    row.fixture_number = m.pair_questions[q].fixture_number;
    return row;
  }
  throw UnknownQuestion("no pairwise question '" + std::string(question_id) + "' in the matrix");
}

// ---------------------------------------------------------------------------
// Internal consistency

// Share of a participant's yes/no answers for one criterion that equal
// their most common answer. no_opinion and unanswered cells are ignored.
inline Ratio consistency_score(const ResponseMatrix& m, std::string_view participant, GroupCriterion c) {
  const auto p = m.participant_index(participant);
  if (!p) throw UnknownQuestion("no participant '" + std::string(participant) + "' in the matrix");
  std::int64_t yes = 0, no = 0;
  for (std::size_t q = 0; q < m.group_questions.size(); ++q) {
    if (m.group_questions[q].criterion != c) continue;
    const auto& cell = m.group_cells[*p][q];
    if (cell == GroupChoice::yes) ++yes;
    if (cell == GroupChoice::no) ++no;
  }
  if (yes + no == 0)
    throw NoAnswers("participant '" + std::string(participant) + "' has no yes/no answers for " +
                    std::string(to_string(c)));
  return Ratio(std::max(yes, no), yes + no);
}

struct ConsistencySummary {
  double mean = 0.0;
  std::int64_t scored = 0;  // (participant, criterion) pairs with answers
  std::vector<std::pair<std::string, std::array<std::optional<Ratio>, 3>>> per_participant;
};

// Mean consistency over every (participant, criterion) pair that has at
// least one yes/no answer.
inline ConsistencySummary mean_consistency(const ResponseMatrix& m) {
  ConsistencySummary out;
  double sum = 0.0;
  for (const auto& p : m.participants) {
    std::array<std::optional<Ratio>, 3> row;
    for (std::size_t k = 0; k < 3; ++k) {
      try {
        row[k] = consistency_score(m, p.id, kGroupCriteria[k]);
        sum += row[k]->value();
        ++out.scored;
      } catch (const NoAnswers&) {
      }
    }
    out.per_participant.emplace_back(p.id, row);
  }
  if (out.scored == 0) throw EmptyMatrix("no participant has yes/no group-fairness answers");
  out.mean = sum / static_cast<double>(out.scored);
  return out;
}

// ---------------------------------------------------------------------------
// Borda aggregation

struct BordaEntry {
  CaseId id;
  double score = 0.0;
  bool tied = false;  // shares its score with another case
};

struct BordaResult {
  std::vector<BordaEntry> ranking;  // descending score, ties by ascending id
  bool has_ties = false;

  double score_of(std::string_view id) const {
    for (const auto& e : ranking)
      if (e.id == id) return e.score;
    throw UnknownCase("unknown case '" + std::string(id) + "'");
  }
};

// Per judgment: prioritize_a gives (1, 0) to (a, b), prioritize_b (0, 1),
// equal (0.5, 0.5); abstentions score nothing.
inline BordaResult borda_aggregate(const std::vector<CaseId>& cases,
                                   const std::vector<PairJudgment>& judgments) {
  std::vector<std::size_t> order(cases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return id_less(cases[x], cases[y]); });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (cases[order[i]] == cases[order[i - 1]])
      throw ValidationError("cases: '" + cases[order[i]] + "' listed twice");
  auto lookup = [&](const CaseId& id) {
    auto it = std::lower_bound(order.begin(), order.end(), id,
                               [&](std::size_t x, const CaseId& v) { return id_less(cases[x], v); });
    if (it == order.end() || cases[*it] != id) throw UnknownCase("unknown case '" + id + "'");
    return *it;
  };

  std::vector<double> score(cases.size(), 0.0);
  for (const auto& j : judgments) {
    const auto a = lookup(j.case_a);
    const auto b = lookup(j.case_b);
    switch (j.choice) {
      case PairChoice::prioritize_a: score[a] += 1.0; break;
      case PairChoice::prioritize_b: score[b] += 1.0; break;
      case PairChoice::equal:
        score[a] += 0.5;
        score[b] += 0.5;
        break;
      default: break;
    }
  }

  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return score[x] > score[y]; });
  BordaResult r;
  r.ranking.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const bool tie = (i > 0 && score[order[i - 1]] == score[order[i]]) ||
                     (i + 1 < order.size() && score[order[i + 1]] == score[order[i]]);
    r.ranking.push_back({cases[order[i]], score[order[i]], tie});
    r.has_ties = r.has_ties || tie;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(const CriterionSupport& s) {
  json j;
  j["criterion"] = to_string(s.criterion);
  j["yes"] = s.yes;
  j["total"] = s.total;
  j["fraction"] = s.fraction.value();
  j["participants_all_yes"] = s.participants_all_yes;
  j["participants_all_no"] = s.participants_all_no;
  j["yes_by_role"] = json::object();
  for (const auto& [k, v] : s.yes_by_role) j["yes_by_role"][k] = v;
  j["per_attribute"] = json::array();
  for (const auto& a : s.per_attribute)
    j["per_attribute"].push_back({{"attribute", a.attribute},
                                  {"yes", a.yes},
                                  {"no", a.no},
                                  {"no_opinion", a.no_opinion},
                                  {"unanswered", a.unanswered}});
  return j;
}

inline json to_json(const ConsensusRow& r) {
  json j;
  j["question_id"] = r.question_id;
  j["fixture_number"] = r.fixture_number;
  j["counts"] = json::object();
  for (auto c : kPairChoices) j["counts"][std::string(to_string(c))] = r.count(c);
  j["unanswered"] = r.unanswered;
  j["total"] = r.total;
  j["classification"] = to_string(r.classification);
  j["top_choice"] = r.top_choice ? json(to_string(*r.top_choice)) : json(nullptr);
  j["top_count"] = r.top_count;
  j["strong_agreement"] = r.strong_agreement;
  return j;
}

inline json to_json(const BordaResult& r) {
  json j;
  j["ranking"] = json::array();
  for (const auto& e : r.ranking)
    j["ranking"].push_back({{"id", e.id}, {"score", e.score}, {"tied", e.tied}});
  j["has_ties"] = r.has_ties;
  return j;
}

inline json to_json(const ResponseMatrix& m) {
  json j;
  j["participants"] = json::array();
  for (const auto& p : m.participants)
    j["participants"].push_back({{"id", p.id}, {"role", to_string(p.role)}});
  j["attributes"] = m.attributes;
  j["group_questions"] = json::array();
  for (const auto& q : m.group_questions)
    j["group_questions"].push_back(
        {{"question_id", q.question_id}, {"attribute", q.attribute}, {"criterion", to_string(q.criterion)}});
  j["group_cells"] = json::array();
  for (const auto& row : m.group_cells) {
    json jr = json::array();
    for (const auto& c : row) jr.push_back(c ? json(to_string(*c)) : json(nullptr));
    j["group_cells"].push_back(std::move(jr));
  }
  j["pair_questions"] = json::array();
  for (const auto& q : m.pair_questions)
    j["pair_questions"].push_back({{"question_id", q.question_id},
                                   {"fixture_number", q.fixture_number},
                                   {"case_a", q.case_a},
                                   {"case_b", q.case_b}});
  j["pair_cells"] = json::array();
  for (const auto& row : m.pair_cells) {
    json jr = json::array();
    for (const auto& c : row) jr.push_back(c ? json(to_string(*c)) : json(nullptr));
    j["pair_cells"].push_back(std::move(jr));
  }
  j["judgments"] = json::array();
  for (const auto& x : m.judgments)
    j["judgments"].push_back({{"participant", x.participant},
                              {"question_id", x.question_id},
                              {"case_a", x.case_a},
                              {"case_b", x.case_b},
                              {"choice", to_string(x.choice)}});
  return j;
}

inline ResponseMatrix matrix_from_json(const json& j) {
  ResponseMatrix m;
  try {
    for (const auto& p : j.at("participants"))
      m.participants.push_back({p.at("id").get<std::string>(), parse_role(p.at("role").get<std::string>())});
    m.attributes = j.at("attributes").get<std::vector<std::string>>();
    for (const auto& q : j.at("group_questions"))
      m.group_questions.push_back({q.at("attribute").get<std::string>(),
                                   parse_group_criterion(q.at("criterion").get<std::string>()),
                                   q.at("question_id").get<std::string>()});
    for (const auto& row : j.at("group_cells")) {
      std::vector<std::optional<GroupChoice>> r;
      for (const auto& c : row)
        r.push_back(c.is_null() ? std::nullopt : std::optional(parse_group_choice(c.get<std::string>())));
      m.group_cells.push_back(std::move(r));
    }
    for (const auto& q : j.at("pair_questions"))
      m.pair_questions.push_back({q.at("question_id").get<std::string>(), q.at("fixture_number").get<int>(),
                                  q.at("case_a").get<std::string>(), q.at("case_b").get<std::string>()});
    for (const auto& row : j.at("pair_cells")) {
      std::vector<std::optional<PairChoice>> r;
      for (const auto& c : row)
        r.push_back(c.is_null() ? std::nullopt : std::optional(parse_pair_choice(c.get<std::string>())));
      m.pair_cells.push_back(std::move(r));
    }
    for (const auto& x : j.at("judgments"))
      m.judgments.push_back({x.at("case_a").get<std::string>(), x.at("case_b").get<std::string>(),
                             parse_pair_choice(x.at("choice").get<std::string>()),
                             x.at("participant").get<std::string>(), x.at("question_id").get<std::string>()});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("response matrix: ") + e.what());
  }
  const auto n = m.participants.size();
  if (m.group_cells.size() != n || m.pair_cells.size() != n)
    throw ValidationError("response matrix: one row per participant required");
  for (const auto& r : m.group_cells)
    if (r.size() != m.group_questions.size()) throw ValidationError("response matrix: ragged group block");
  for (const auto& r : m.pair_cells)
    if (r.size() != m.pair_questions.size()) throw ValidationError("response matrix: ragged pairwise block");
  return m;
}

// Cases referenced by the fixed pairs, in column order.
inline std::vector<CaseId> fixture_case_ids(const ResponseMatrix& m) {
  std::vector<CaseId> ids;
  for (const auto& q : m.pair_questions)
    for (const auto& id : {q.case_a, q.case_b})
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  return ids;
}

// Full summary: support per criterion, consensus per fixed pair, mean
// consistency, and Borda totals over the fixed-pair cases.
inline json analysis_summary(const ResponseMatrix& m) {
  json j;
  j["participants"] = m.participants.size();
  j["roles"] = json::object();
  for (const auto& p : m.participants) {
    const std::string r(to_string(p.role));
    j["roles"][r] = j["roles"].value(r, 0) + 1;
  }
  j["support"] = json::array();
  if (!m.attributes.empty())
    for (auto c : kGroupCriteria) j["support"].push_back(to_json(criterion_support(m, c)));
  j["consensus"] = json::array();
  for (const auto& q : m.pair_questions) j["consensus"].push_back(to_json(consensus_class(m, q.question_id)));
  j["consistency"] = nullptr;
  if (!m.attributes.empty()) {
    try {
      const auto cs = mean_consistency(m);
      json jc;
      jc["mean"] = cs.mean;
      jc["scored"] = cs.scored;
      jc["per_participant"] = json::array();
      for (const auto& [id, row] : cs.per_participant) {
        json jr;
        jr["participant"] = id;
        for (std::size_t k = 0; k < 3; ++k)
          jr[std::string(to_string(kGroupCriteria[k]))] = row[k] ? json(row[k]->value()) : json(nullptr);
        jc["per_participant"].push_back(std::move(jr));
      }
      j["consistency"] = std::move(jc);
    } catch (const EmptyMatrix&) {
    }
  }
  std::vector<PairJudgment> fixed;
  for (const auto& x : m.judgments)
    for (const auto& q : m.pair_questions)
      if (q.question_id == x.question_id) fixed.push_back(x);
  j["borda"] = to_json(borda_aggregate(fixture_case_ids(m), fixed));
  return j;
}

// Plot-ready rows: overall support per criterion, then one row per bar of
// the per-attribute, per-criterion and per-pair response charts.
inline std::string aggregate_csv(const ResponseMatrix& m) {
  std::string out = "chart,key,attribute,choice,count,total,fraction\n";
  auto row = [&](std::string_view chart, std::string_view key, std::string_view attr,
                 std::string_view choice, std::int64_t count, std::int64_t total) {
    out += std::string(chart) + "," + std::string(key) + "," + std::string(attr) + "," +
           std::string(choice) + "," + std::to_string(count) + "," + std::to_string(total) + "," +
           (total ? format_fixed(static_cast<double>(count) / static_cast<double>(total), 3) : "") + "\n";
  };
  if (!m.attributes.empty()) {
    std::vector<CriterionSupport> supports;
    for (auto c : kGroupCriteria) supports.push_back(criterion_support(m, c));
    for (const auto& s : supports) row("support", to_string(s.criterion), "", "yes", s.yes, s.total);
    for (const auto& s : supports) {
      std::int64_t no = 0, abst = 0;
      for (const auto& a : s.per_attribute) no += a.no, abst += a.no_opinion + a.unanswered;
      row("criterion", to_string(s.criterion), "", "yes", s.yes, s.total);
      row("criterion", to_string(s.criterion), "", "no", no, s.total);
      row("criterion", to_string(s.criterion), "", "no_opinion", abst, s.total);
    }
    for (const auto& s : supports) {
      const auto n = static_cast<std::int64_t>(m.participants.size());
      for (const auto& a : s.per_attribute) {
        row("attribute", to_string(s.criterion), a.attribute, "yes", a.yes, n);
        row("attribute", to_string(s.criterion), a.attribute, "no", a.no, n);
        row("attribute", to_string(s.criterion), a.attribute, "no_opinion", a.no_opinion + a.unanswered, n);
      }
    }
  }
  for (const auto& q : m.pair_questions) {
    const auto r = consensus_class(m, q.question_id);
    for (auto c : kPairChoices) row("pair", q.question_id, "", to_string(c), r.count(c), r.total);
  }
  return out;
}

}  // namespace fairlicit
