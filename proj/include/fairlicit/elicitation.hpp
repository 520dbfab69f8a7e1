#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fairlicit/fixture_pairs.hpp"
#include "fairlicit/metrics.hpp"
#include "fairlicit/random.hpp"
#include "fairlicit/schema.hpp"
#include "fairlicit/similarity.hpp"

namespace fairlicit {

// ---------------------------------------------------------------------------
// Vocabulary

enum class Role { social_worker, parent, other };
enum class PairChoice { equal, prioritize_a, prioritize_b, not_comfortable, no_opinion };
enum class GroupChoice { yes, no, no_opinion };
enum class GroupCriterion { unawareness, statistical_parity, equalized_odds };
enum class QuestionSource { fixed_fixture, random };

inline constexpr GroupCriterion kGroupCriteria[] = {
    GroupCriterion::unawareness, GroupCriterion::statistical_parity, GroupCriterion::equalized_odds};

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::social_worker: return "social_worker";
    case Role::parent: return "parent";
    default: return "other";
  }
}
inline std::string_view to_string(PairChoice c) {
  switch (c) {
    case PairChoice::equal: return "equal";
    case PairChoice::prioritize_a: return "prioritize_a";
    case PairChoice::prioritize_b: return "prioritize_b";
    case PairChoice::not_comfortable: return "not_comfortable";
    default: return "no_opinion";
  }
}
inline std::string_view to_string(GroupChoice c) {
  switch (c) {
    case GroupChoice::yes: return "yes";
    case GroupChoice::no: return "no";
    default: return "no_opinion";
  }
}
inline std::string_view to_string(GroupCriterion c) {
  switch (c) {
    case GroupCriterion::unawareness: return "unawareness";
    case GroupCriterion::statistical_parity: return "statistical_parity";
    default: return "equalized_odds";
  }
}
inline std::string_view to_string(QuestionSource s) {
  return s == QuestionSource::fixed_fixture ? "fixed_fixture" : "random";
}

inline Role parse_role(std::string_view s) {
  if (s == "social_worker") return Role::social_worker;
  if (s == "parent") return Role::parent;
  if (s == "other") return Role::other;
  throw ValidationError("role: unknown value '" + std::string(s) + "'");
}
inline PairChoice parse_pair_choice(std::string_view s) {
  if (s == "equal") return PairChoice::equal;
  if (s == "prioritize_a") return PairChoice::prioritize_a;
  if (s == "prioritize_b") return PairChoice::prioritize_b;
  if (s == "not_comfortable") return PairChoice::not_comfortable;
  if (s == "no_opinion") return PairChoice::no_opinion;
  throw ValidationError("choice: '" + std::string(s) +
                        "' is not one of equal, prioritize_a, prioritize_b, not_comfortable, no_opinion");
}
inline GroupChoice parse_group_choice(std::string_view s) {
  if (s == "yes") return GroupChoice::yes;
  if (s == "no") return GroupChoice::no;
  if (s == "no_opinion") return GroupChoice::no_opinion;
  throw ValidationError("choice: '" + std::string(s) + "' is not one of yes, no, no_opinion");
}
inline GroupCriterion parse_group_criterion(std::string_view s) {
  if (s == "unawareness") return GroupCriterion::unawareness;
  if (s == "statistical_parity") return GroupCriterion::statistical_parity;
  if (s == "equalized_odds") return GroupCriterion::equalized_odds;
  throw ValidationError("criterion: unknown value '" + std::string(s) + "'");
}

inline bool is_abstention(PairChoice c) {
  return c == PairChoice::not_comfortable || c == PairChoice::no_opinion;
}

// Fixed wording of the group-fairness questions. Each asks whether the
// criterion is required (a necessary condition) for the algorithm to be fair.
inline std::string group_question_text(GroupCriterion c, std::string_view attribute) {
  const std::string a(attribute);
  switch (c) {
    case GroupCriterion::unawareness:
      return "For the algorithm to be fair, must it leave out " + a +
             " entirely, so that " + a + " is never used as a factor in its predictions?";
    case GroupCriterion::statistical_parity:
      return "For the algorithm to be fair, must it predict high risk for the same share of cases "
             "in every " + a + " subgroup?";
    default:
      return "For the algorithm to be fair, must its false positive rate and its false negative "
             "rate each be the same in every " + a + " subgroup?";
  }
}

struct ParticipantProfile {
  Role role = Role::other;
  std::map<std::string, std::string> demographics;
  bool operator==(const ParticipantProfile&) const = default;
};

struct PairwiseQuestion {
  std::string question_id;
  CaseId case_a;
  CaseId case_b;
  bool show_predictions = false;
  QuestionSource source = QuestionSource::fixed_fixture;
  int fixture_number = 0;  // 1..14 for fixture pairs, 0 otherwise
  bool operator==(const PairwiseQuestion&) const = default;
};

struct GroupFairnessQuestion {
  std::string question_id;
  std::string attribute;
  GroupCriterion criterion = GroupCriterion::unawareness;
  std::string text;
  bool operator==(const GroupFairnessQuestion&) const = default;
};

// Returned instead of a question when the stage has no fixed items left.
struct StagePrompt {
  int stage = 1;
  std::string view;  // case_by_case | similarity | group
  std::string message;
  std::optional<int> advance_to;
  bool operator==(const StagePrompt&) const = default;
};

using Question = std::variant<PairwiseQuestion, GroupFairnessQuestion>;
using NextItem = std::variant<PairwiseQuestion, GroupFairnessQuestion, StagePrompt>;

inline NextItem as_next(const Question& q) {
  return std::visit([](const auto& x) -> NextItem { return x; }, q);
}

inline const std::string& question_id(const Question& q) {
  return std::visit([](const auto& x) -> const std::string& { return x.question_id; }, q);
}

struct PairwiseResponse {
  std::string question_id;
  PairChoice choice = PairChoice::no_opinion;
  std::string rationale;
  bool operator==(const PairwiseResponse&) const = default;
};

struct GroupFairnessResponse {
  std::string question_id;
  GroupChoice choice = GroupChoice::no_opinion;
  std::string rationale;
  bool operator==(const GroupFairnessResponse&) const = default;
};

using Response = std::variant<PairwiseResponse, GroupFairnessResponse>;

// Untyped response as it arrives over the wire; the choice is checked
// against the enumeration of the question it answers.
struct ResponseInput {
  std::string question_id;
  std::string choice;
  std::string rationale;
};

struct WeightChange {
  WeightVector weights;
  bool operator==(const WeightChange&) const = default;
};
struct SimilarityFlag {
  CaseId case_a;
  CaseId case_b;
  std::string reason;
  bool operator==(const SimilarityFlag&) const = default;
};
struct GroupQuery {
  std::vector<std::string> attributes;
  Metric metric = Metric::positive_rate;
  bool operator==(const GroupQuery&) const = default;
};
using Exploration = std::variant<WeightChange, SimilarityFlag, GroupQuery>;

struct QuestionServed {
  Question question;
  bool operator==(const QuestionServed&) const = default;
};
struct ResponseRecorded {
  Response response;
  bool operator==(const ResponseRecorded&) const = default;
};
struct StageAdvanced {
  int from = 1;
  int to = 2;  // 5 means closed
  bool operator==(const StageAdvanced&) const = default;
};

struct Event {
  std::size_t seq = 0;
  int stage = 1;
  std::int64_t at_ms = 0;
  std::variant<QuestionServed, ResponseRecorded, WeightChange, SimilarityFlag, GroupQuery, StageAdvanced>
      body;
  bool operator==(const Event&) const = default;
};

struct SessionOptions {
  // Serve the fifteen group-fairness questions before the fixture pairs.
  bool group_questions_first = false;
  bool operator==(const SessionOptions&) const = default;
};

using Clock = std::function<std::int64_t()>;

inline Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

// Deterministic clock: start, start + step, start + 2*step, ...
inline Clock logical_clock(std::int64_t start = 0, std::int64_t step = 1000) {
  auto next = std::make_shared<std::int64_t>(start);
  return [next, step] {
    const auto t = *next;
    *next += step;
    return t;
  };
}

inline constexpr int kClosed = 5;

// ---------------------------------------------------------------------------
// Session

// One participant's staged pass through the protocol. Stage 1 serves the
// fixture pairs (predictions hidden) and the group-fairness questions;
// stage 2 serves seeded random pairs with predictions shown; stages 3 and 4
// record similarity-view and group-view exploration. Not thread-safe; callers
// serialize access per session.
class Session {
 public:
  static Session start(std::string session_id, ParticipantProfile participant,
                       std::string dataset_ref, const Dataset& dataset, std::uint64_t seed,
                       SessionOptions options = {}, Clock clock = system_clock(),
                       FixturePairSet fixtures = default_fixture_pairs()) {
    if (!dataset.has_predictions())
      throw MissingPredictions("session dataset '" + dataset_ref + "' has cases without predictions");
    verify(fixtures, dataset.schema);
    Session s;
    s.session_id_ = std::move(session_id);
    s.participant_ = std::move(participant);
    s.dataset_ref_ = std::move(dataset_ref);
    s.seed_ = seed;
    s.options_ = options;
    s.clock_ = std::move(clock);
    s.fixtures_ = std::move(fixtures);
    s.schema_ = dataset.schema;
    for (const auto& c : dataset.cases) s.case_ids_.push_back(c.id);
    s.build_stage1_queue();
    s.created_at_ms_ = s.clock_();
    return s;
  }

  const std::string& id() const noexcept { return session_id_; }
  const ParticipantProfile& participant() const noexcept { return participant_; }
  const std::string& dataset_ref() const noexcept { return dataset_ref_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const SessionOptions& options() const noexcept { return options_; }
  int stage() const noexcept { return stage_; }
  bool closed() const noexcept { return stage_ == kClosed; }
  const std::vector<Event>& transcript() const noexcept { return transcript_; }
  std::int64_t created_at_ms() const noexcept { return created_at_ms_; }
  std::optional<std::int64_t> closed_at_ms() const noexcept { return closed_at_ms_; }
  const std::optional<WeightVector>& elicited_weights() const noexcept { return elicited_weights_; }
  const FixturePairSet& fixtures() const noexcept { return fixtures_; }
  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<Question>& stage1_queue() const noexcept { return stage1_queue_; }

  void set_clock(Clock clock) { clock_ = std::move(clock); }

  const Question* served_question(std::string_view id) const {
    auto it = served_.find(std::string(id));
    return it == served_.end() ? nullptr : &it->second.question;
  }
  bool answered(std::string_view id) const { return answered_.count(std::string(id)) > 0; }

  NextItem next_question() {
    require_open();
    if (pending_) return as_next(served_.at(*pending_).question);
    switch (stage_) {
      case 1: {
        if (stage1_pos_ < stage1_queue_.size()) {
          const auto q = stage1_queue_[stage1_pos_++];
          serve(q);
          return as_next(q);
        }
        return StagePrompt{1, "case_by_case",
                           "All stage 1 questions are answered. Advance to stage 2 to compare "
                           "randomly selected cases with their predictions shown.",
                           2};
      }
      case 2: {
        const Question q = random_pair(stage2_count_++);
        serve(q);
        return as_next(q);
      }
      case 3:
        return StagePrompt{3, "similarity",
                           "Use the similarity view: set feature weights, inspect cases near a "
                           "reference case, and flag similar cases that received different "
                           "predictions.",
                           4};
      default:
        return StagePrompt{4, "group",
                           "Use the group view: choose attributes and a metric to inspect how the "
                           "algorithm performs across subgroups.",
                           std::nullopt};
    }
  }

  // Records one answer. The question must have been served in the current
  // stage and not yet answered.
  void record_response(const ResponseInput& in) {
    require_open();
    auto it = served_.find(in.question_id);
    if (it == served_.end())
      throw UnknownQuestion("question '" + in.question_id + "' was not served in this session");
    if (answered_.count(in.question_id))
      throw DuplicateResponse("question '" + in.question_id + "' is already answered");
    if (it->second.stage != stage_)
      throw WrongStage("question '" + in.question_id + "' belongs to stage " +
                       std::to_string(it->second.stage));
    Response r;
    if (std::holds_alternative<PairwiseQuestion>(it->second.question))
      r = PairwiseResponse{in.question_id, parse_pair_choice(in.choice), in.rationale};
    else
      r = GroupFairnessResponse{in.question_id, parse_group_choice(in.choice), in.rationale};
    append(ResponseRecorded{std::move(r)});
    answered_.insert(in.question_id);
    if (pending_ == in.question_id) pending_.reset();
  }

  void record_exploration(const Exploration& e) {
    require_open();
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, WeightChange>) {
            require_stage(3, "weight_change");
            validate(x.weights, schema_);
            elicited_weights_ = x.weights;
          } else if constexpr (std::is_same_v<T, SimilarityFlag>) {
            require_stage(3, "similarity_flag");
            if (x.case_a == x.case_b) throw ValidationError("similarity_flag: cases must differ");
            for (const auto& id : {x.case_a, x.case_b})
              if (!has_case(id)) throw UnknownCase("unknown case '" + id + "'");
          } else {
            require_stage(4, "group_query");
            if (x.attributes.empty() || x.attributes.size() > 2)
              throw ValidationError("attributes: select one or two attributes");
            for (const auto& a : x.attributes) schema_.require_index(a);
          }
          append(x);
        },
        e);
  }

  // Moves to the next stage. Leaving stage 1 requires every stage-1
  // question to be answered; leaving stage 4 closes the session.
  void advance() {
    require_open();
    if (stage_ == 1 && (stage1_pos_ < stage1_queue_.size() || pending_))
      throw WrongStage("stage 1 still has unanswered questions");
    const int from = stage_;
    const int to = stage_ + 1;
    append(StageAdvanced{from, to});
    stage_ = to;
    pending_.reset();
    if (to == kClosed) closed_at_ms_ = transcript_.back().at_ms;
  }

  // Number of answered fixture pairs and group-fairness questions.
  std::pair<std::size_t, std::size_t> coverage() const {
    std::size_t pairs = 0, groups = 0;
    for (const auto& e : transcript_) {
      if (const auto* r = std::get_if<ResponseRecorded>(&e.body)) {
        if (const auto* p = std::get_if<PairwiseResponse>(&r->response)) {
          const auto* q = served_question(p->question_id);
          if (q && std::get<PairwiseQuestion>(*q).source == QuestionSource::fixed_fixture) ++pairs;
        } else {
          ++groups;
        }
      }
    }
    return {pairs, groups};
  }

 private:
  struct Served {
    Question question;
    int stage;
  };

  void require_open() const {
    if (stage_ == kClosed) throw SessionClosed("session '" + session_id_ + "' is closed");
  }
  void require_stage(int stage, const char* what) const {
    if (stage_ != stage)
      throw WrongStage(std::string(what) + " is only accepted in stage " + std::to_string(stage) +
                       "; session is in stage " + std::to_string(stage_));
  }

  bool has_case(std::string_view id) const {
    if (fixtures_.find_case(id)) return true;
    return std::find(case_ids_.begin(), case_ids_.end(), id) != case_ids_.end();
  }

  template <typename Body>
  void append(Body body) {
    Event e;
    e.seq = transcript_.size();
    e.stage = stage_;
    e.at_ms = clock_();
    e.body = std::move(body);
    transcript_.push_back(std::move(e));
  }

  void serve(const Question& q) {
    append(QuestionServed{q});
    served_.emplace(question_id(q), Served{q, stage_});
    pending_ = question_id(q);
  }

  void build_stage1_queue() {
    std::vector<Question> pairs, groups;
    for (const auto& p : fixtures_.pairs) {
      char id[8];
      std::snprintf(id, sizeof id, "p%02d", p.number);
      pairs.push_back(PairwiseQuestion{id, p.a.id, p.b.id, false, QuestionSource::fixed_fixture, p.number});
    }
    for (auto c : kGroupCriteria)
      for (const auto& a : schema_.sensitive_attributes)
        groups.push_back(GroupFairnessQuestion{"g-" + std::string(to_string(c)) + "-" + a, a, c,
                                               group_question_text(c, a)});
    auto& first = options_.group_questions_first ? groups : pairs;
    auto& second = options_.group_questions_first ? pairs : groups;
    stage1_queue_ = first;
    stage1_queue_.insert(stage1_queue_.end(), second.begin(), second.end());
  }

  // k-th stage-2 pair: uniform over ordered pairs of distinct cases, hence
  // uniform over unordered pairs. Each draw has its own seeded stream so the
  // sequence is a pure function of (seed, k).
  Question random_pair(std::size_t k) const {
    const auto n = case_ids_.size();
    if (n < 2) throw ValidationError("dataset needs at least two cases for random pairs");
    Rng rng({seed_, 2, static_cast<std::uint64_t>(k)});
    const auto i = rng.below(n);
    auto j = rng.below(n - 1);
    if (j >= i) ++j;
    char id[16];
    std::snprintf(id, sizeof id, "r%04zu", k + 1);
    return PairwiseQuestion{id, case_ids_[i], case_ids_[j], true, QuestionSource::random, 0};
  }

  std::string session_id_;
  ParticipantProfile participant_;
  std::string dataset_ref_;
  std::uint64_t seed_ = 0;
  SessionOptions options_;
  Clock clock_;
  FixturePairSet fixtures_;
  FeatureSchema schema_;
  std::vector<CaseId> case_ids_;

  int stage_ = 1;
  std::vector<Event> transcript_;
  std::int64_t created_at_ms_ = 0;
  std::optional<std::int64_t> closed_at_ms_;
  std::optional<WeightVector> elicited_weights_;

  std::vector<Question> stage1_queue_;
  std::size_t stage1_pos_ = 0;
  std::size_t stage2_count_ = 0;
  std::map<std::string, Served> served_;
  std::set<std::string> answered_;
  std::optional<std::string> pending_;
};

// ---------------------------------------------------------------------------
// Session log (JSON)

inline constexpr std::string_view kSessionFormat = "fairlicit-session";
inline constexpr int kSessionVersion = 1;

inline json to_json(const ParticipantProfile& p) {
  json j;
  j["role"] = to_string(p.role);
  j["demographics"] = json::object();
  for (const auto& [k, v] : p.demographics) j["demographics"][k] = v;
  return j;
}

inline ParticipantProfile participant_from_json(const json& j) {
  ParticipantProfile p;
  if (!j.is_object()) throw ValidationError("participant: expected an object");
  p.role = parse_role(j.value("role", std::string("other")));
  if (j.contains("demographics")) {
    if (!j.at("demographics").is_object())
      throw ValidationError("participant.demographics: expected an object");
    for (const auto& [k, v] : j.at("demographics").items()) {
      if (!v.is_string()) throw ValidationError("participant.demographics." + k + ": expected text");
      p.demographics[k] = v.get<std::string>();
    }
  }
  return p;
}

inline json to_json(const Question& q) {
  json j;
  if (const auto* p = std::get_if<PairwiseQuestion>(&q)) {
    j["kind"] = "pairwise";
    j["question_id"] = p->question_id;
    j["case_a"] = p->case_a;
    j["case_b"] = p->case_b;
    j["show_predictions"] = p->show_predictions;
    j["source"] = to_string(p->source);
    j["fixture_number"] = p->fixture_number ? json(p->fixture_number) : json(nullptr);
  } else {
    const auto& g = std::get<GroupFairnessQuestion>(q);
    j["kind"] = "group_fairness";
    j["question_id"] = g.question_id;
    j["attribute"] = g.attribute;
    j["criterion"] = to_string(g.criterion);
    j["text"] = g.text;
  }
  return j;
}

inline json to_json(const NextItem& item) {
  if (const auto* p = std::get_if<StagePrompt>(&item)) {
    json j;
    j["kind"] = "stage_prompt";
    j["stage"] = p->stage;
    j["view"] = p->view;
    j["message"] = p->message;
    j["advance_to"] = p->advance_to ? json(*p->advance_to) : json(nullptr);
    return j;
  }
  if (const auto* p = std::get_if<PairwiseQuestion>(&item)) return to_json(Question(*p));
  return to_json(Question(std::get<GroupFairnessQuestion>(item)));
}

inline json to_json(const Response& r) {
  json j;
  std::visit(
      [&](const auto& x) {
        j["question_id"] = x.question_id;
        j["choice"] = to_string(x.choice);
        j["rationale"] = x.rationale;
      },
      r);
  return j;
}

inline json to_json(const Event& e) {
  json j;
  j["seq"] = e.seq;
  j["stage"] = e.stage;
  j["at_ms"] = e.at_ms;
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, QuestionServed>) {
          j["type"] = "question_served";
          j["question"] = to_json(b.question);
        } else if constexpr (std::is_same_v<T, ResponseRecorded>) {
          j["type"] = "response_recorded";
          j["response"] = to_json(b.response);
        } else if constexpr (std::is_same_v<T, WeightChange>) {
          j["type"] = "weight_change";
          j["weights"] = b.weights.weights;
        } else if constexpr (std::is_same_v<T, SimilarityFlag>) {
          j["type"] = "similarity_flag";
          j["case_a"] = b.case_a;
          j["case_b"] = b.case_b;
          j["reason"] = b.reason;
        } else if constexpr (std::is_same_v<T, GroupQuery>) {
          j["type"] = "group_query";
          j["attributes"] = b.attributes;
          j["metric"] = to_string(b.metric);
        } else {
          j["type"] = "stage_advanced";
          j["from"] = b.from;
          j["to"] = b.to == kClosed ? json("closed") : json(b.to);
        }
      },
      e.body);
  return j;
}

inline json export_session(const Session& s) {
  json j;
  j["format"] = kSessionFormat;
  j["version"] = kSessionVersion;
  j["session_id"] = s.id();
  j["participant"] = to_json(s.participant());
  j["dataset_ref"] = s.dataset_ref();
  j["seed"] = s.seed();
  j["options"] = {{"group_questions_first", s.options().group_questions_first}};
  j["stage"] = s.closed() ? json("closed") : json(s.stage());
  j["created_at_ms"] = s.created_at_ms();
  j["closed_at_ms"] = s.closed_at_ms() ? json(*s.closed_at_ms()) : json(nullptr);
  j["elicited_weights"] = s.elicited_weights() ? json(s.elicited_weights()->weights) : json(nullptr);
  j["transcript"] = json::array();
  for (const auto& e : s.transcript()) j["transcript"].push_back(to_json(e));
  return j;
}

inline std::string serialize(const Session& s) { return export_session(s).dump(2) + "\n"; }

inline ResponseInput response_input_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("response: expected an object");
  ResponseInput in;
  if (!j.contains("question_id") || !j.at("question_id").is_string())
    throw ValidationError("question_id: required text field");
  if (!j.contains("choice") || !j.at("choice").is_string())
    throw ValidationError("choice: required text field");
  in.question_id = j.at("question_id").get<std::string>();
  in.choice = j.at("choice").get<std::string>();
  if (j.contains("rationale") && !j.at("rationale").is_null()) {
    if (!j.at("rationale").is_string()) throw ValidationError("rationale: expected text");
    in.rationale = j.at("rationale").get<std::string>();
  }
  return in;
}

inline Exploration exploration_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw ValidationError("type: required text field");
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "weight_change") return WeightChange{{j.at("weights").get<std::vector<double>>()}};
    if (type == "similarity_flag")
      return SimilarityFlag{j.at("case_a").get<std::string>(), j.at("case_b").get<std::string>(),
                            j.value("reason", std::string())};
    if (type == "group_query")
      return GroupQuery{j.at("attributes").get<std::vector<std::string>>(),
                        parse_metric(j.at("metric").get<std::string>())};
  } catch (const json::exception& e) {
    throw ValidationError(type + ": " + e.what());
  }
  throw ValidationError("type: unknown event type '" + type + "'");
}

// Rebuilds a session from its log by re-driving a fresh session through the
// recorded events with the recorded timestamps. Any divergence between the
// log and the re-driven session is a ValidationError.
inline Session import_session(const json& log, const Dataset& dataset,
                              FixturePairSet fixtures = default_fixture_pairs()) {
  try {
    if (log.value("format", std::string()) != kSessionFormat)
      throw ValidationError("format: not a session log");
    if (log.value("version", 0) != kSessionVersion)
      throw ValidationError("version: unsupported session log version");
    const auto& transcript = log.at("transcript");
    std::vector<std::int64_t> times;
    times.push_back(log.at("created_at_ms").get<std::int64_t>());
    for (const auto& e : transcript) times.push_back(e.at("at_ms").get<std::int64_t>());
    auto cursor = std::make_shared<std::size_t>(0);
    Clock replay = [times, cursor] {
      if (*cursor >= times.size()) throw ValidationError("transcript: clock overrun during replay");
      return times[(*cursor)++];
    };
    SessionOptions opts;
    if (log.contains("options")) opts.group_questions_first = log.at("options").value("group_questions_first", false);
    Session s = Session::start(log.at("session_id").get<std::string>(),
                               participant_from_json(log.at("participant")),
                               log.at("dataset_ref").get<std::string>(), dataset,
                               log.at("seed").get<std::uint64_t>(), opts, replay, std::move(fixtures));

    for (const auto& je : transcript) {
      const auto seq = je.at("seq").get<std::size_t>();
      const auto type = je.at("type").get<std::string>();
      if (seq != s.transcript().size())
        throw ValidationError("transcript: event sequence gap at seq " + std::to_string(seq));
      if (type == "question_served") {
        s.next_question();
      } else if (type == "response_recorded") {
        s.record_response(response_input_from_json(je.at("response")));
      } else if (type == "stage_advanced") {
        s.advance();
      } else {
        s.record_exploration(exploration_from_json(je));
      }
      if (s.transcript().size() != seq + 1 || to_json(s.transcript().back()) != je)
        throw ValidationError("transcript: log diverges from replay at seq " + std::to_string(seq));
    }
    s.set_clock(system_clock());
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("session log: ") + e.what());
  }
}

}  // namespace fairlicit
