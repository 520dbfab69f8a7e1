#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fairlicit/analysis.hpp"
#include "fairlicit/dataset_io.hpp"
#include "fairlicit/elicitation.hpp"
#include "fairlicit/metrics.hpp"
#include "fairlicit/similarity.hpp"
#include "fairlicit/store.hpp"
#include "fairlicit/synthetic.hpp"
#include "fairlicit/training.hpp"

namespace fairlicit {

struct ServiceRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON text, newline-terminated
};

struct ServiceOptions {
  double epsilon_default = kDefaultEpsilon;
  // Clock given to sessions created or loaded by the service.
  std::function<Clock()> clock = [] { return system_clock(); };
};

// Body text shared by the service and the CLI, so equal queries give equal
// bytes.
inline std::string body_text(const json& j) { return j.dump(2) + "\n"; }

inline int status_for(const std::string& error) {
  static const std::map<std::string, int> table = {
      {"UnknownDataset", 404},     {"UnknownSession", 404},   {"UnknownModel", 404},
      {"UnknownCase", 404},        {"UnknownQuestion", 404},  {"NotFound", 404},
      {"MissingPredictions", 409}, {"MissingLabels", 409},    {"WrongStage", 409},
      {"DuplicateResponse", 409},  {"SessionClosed", 409},    {"NonFinite", 422},
      {"IoError", 500},            {"InternalError", 500},
  };
  auto it = table.find(error);
  return it == table.end() ? 400 : it->second;
}

inline ServiceResponse error_response(const std::string& name, const std::string& message) {
  json j;
  j["error"] = name;
  j["message"] = message;
  return {status_for(name), body_text(j)};
}

// Routes requests to the modules. Safe to call from several threads: ids are
// allocated under a lock and each session's load-mutate-save cycle holds that
// session's lock.
class Service {
 public:
  explicit Service(Store& store, ServiceOptions options = {}) : store_(store), options_(std::move(options)) {}

  ServiceResponse handle(const ServiceRequest& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      return error_response(e.name(), e.what());
    } catch (const json::exception& e) {
      return error_response("ValidationError", e.what());
    } catch (const std::exception& e) {
      return error_response("InternalError", e.what());
    }
  }

  double epsilon_default() const noexcept { return options_.epsilon_default; }

 private:
  static ServiceResponse ok(const json& j, int status = 200) { return {status, body_text(j)}; }

  static json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
      return json::parse(body);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("body: ") + e.what());
    }
  }

  static std::optional<std::string> param(const ServiceRequest& r, const std::string& key) {
    auto it = r.query.find(key);
    if (it == r.query.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  static std::string require(const ServiceRequest& r, const std::string& key) {
    auto v = param(r, key);
    if (!v) throw ValidationError(key + ": required query parameter");
    return *v;
  }

  static double number(const std::string& key, const std::string& text) {
    auto v = parse_double(text);
    if (!v) throw ValidationError(key + ": '" + text + "' is not a number");
    return *v;
  }

  ServiceResponse route(const ServiceRequest& req) {
    std::vector<std::string> seg;
    for (auto& s : split(req.path, '/'))
      if (!s.empty()) seg.push_back(s);
    const auto& m = req.method;
    const auto n = seg.size();

    if (n >= 1 && seg[0] == "datasets") {
      if (n == 1 && m == "GET") return list_datasets();
      if (n == 1 && m == "POST") return import_dataset(req);
      if (n == 2 && seg[1] == "synthetic" && m == "POST") return synthetic_dataset(req);
      if (n == 2 && m == "GET") return ok(to_json(store_.dataset(seg[1])));
      if (n == 3 && m == "GET") {
        if (seg[2] == "metrics") return metrics(seg[1], req);
        if (seg[2] == "fairness") return fairness(seg[1], req);
        if (seg[2] == "similarity") return similarity(seg[1], req);
        if (seg[2] == "discordant") return discordant(seg[1], req);
      }
    } else if (n >= 1 && seg[0] == "sessions") {
      if (n == 1 && m == "POST") return create_session(req);
      if (n == 1 && m == "GET") return ok(json{{"sessions", store_.session_ids()}});
      if (n == 3 && m == "GET" && seg[2] == "next") return next(seg[1]);
      if (n == 3 && m == "GET" && seg[2] == "export") return ok(export_session(load(seg[1])));
      if (n == 3 && m == "POST" && seg[2] == "responses") return respond(seg[1], req);
      if (n == 3 && m == "POST" && seg[2] == "events") return explore(seg[1], req);
      if (n == 3 && m == "POST" && seg[2] == "advance") return advance(seg[1]);
    } else if (n == 2 && seg[0] == "analysis" && seg[1] == "summary" && m == "GET") {
      return summary(req);
    } else if (n == 1 && seg[0] == "train" && m == "POST") {
      return train_model(req);
    } else if (n >= 1 && seg[0] == "models") {
      if (n == 1 && m == "POST") return import_model(req);
      if (n == 2 && m == "GET") return ok(to_json(store_.model(seg[1])));
      if (n == 3 && m == "GET" && seg[2] == "report") return model_report(seg[1], req);
    }
    return error_response("NotFound", "no route for " + m + " " + req.path);
  }

  // --- datasets

  ServiceResponse list_datasets() {
    json j;
    j["datasets"] = json::array();
    for (const auto& id : store_.dataset_ids()) {
      const auto d = store_.dataset(id);
      j["datasets"].push_back(
          {{"id", id}, {"cases", d.cases.size()}, {"provenance", to_string(d.provenance)}});
    }
    return ok(j);
  }

  // Body: a dataset document, or {schema, csv, threshold}.
  ServiceResponse import_dataset(const ServiceRequest& req) {
    const auto body = parse_body(req.body);
    Dataset d;
    if (body.contains("csv")) {
      if (!body.contains("schema")) throw SchemaError("schema: required with csv");
      d = parse_dataset_csv(schema_from_json(body.at("schema")), body.at("csv").get<std::string>(),
                            body.value("threshold", 0.5));
    } else {
      d = dataset_from_json(body);
    }
    return ok(json{{"id", store_.add_dataset(d)}}, 201);
  }

  // Body: {n, seed, schema?, marginals?, threshold?, score_noise?, label_noise?}.
  ServiceResponse synthetic_dataset(const ServiceRequest& req) {
    const auto body = parse_body(req.body);
    if (!body.contains("n") || !body.at("n").is_number_unsigned()) throw ValidationError("n: required positive integer");
    if (!body.contains("seed") || !body.at("seed").is_number_unsigned())
      throw ValidationError("seed: required nonnegative integer");
    const auto schema = body.contains("schema") ? schema_from_json(body.at("schema")) : default_schema();
    const auto marginals = body.contains("marginals") ? marginals_from_json(body.at("marginals")) : Marginals{};
    SyntheticConfig cfg;
    cfg.threshold = body.value("threshold", cfg.threshold);
    cfg.score_noise = body.value("score_noise", cfg.score_noise);
    cfg.label_noise = body.value("label_noise", cfg.label_noise);
    const auto d = generate_synthetic(schema, body.at("n").get<std::size_t>(), body.at("seed").get<std::uint64_t>(),
                                      marginals, cfg);
    return ok(json{{"id", store_.add_dataset(d)}}, 201);
  }

  ServiceResponse metrics(const std::string& id, const ServiceRequest& req) {
    const auto d = store_.dataset(id);
    std::vector<std::string> attrs{require(req, "attribute")};
    if (auto a2 = param(req, "attribute2")) attrs.push_back(*a2);
    const auto metric = parse_metric(param(req, "metric").value_or("positive_rate"));
    return ok(to_json(group_view_summary(d, attrs, metric)));
  }

  ServiceResponse fairness(const std::string& id, const ServiceRequest& req) {
    const auto d = store_.dataset(id);
    const auto criterion = parse_criterion(require(req, "criterion"));
    const auto eps = param(req, "epsilon") ? number("epsilon", *param(req, "epsilon")) : options_.epsilon_default;
    return ok(to_json(fairness_report(d, criterion, require(req, "attribute"), eps)));
  }

  static WeightVector weights_param(const ServiceRequest& req, const FeatureSchema& schema) {
    if (auto w = param(req, "weights")) return parse_weights(*w, schema);
    return WeightVector::uniform(schema.size());
  }

  ServiceResponse similarity(const std::string& id, const ServiceRequest& req) {
    const auto d = store_.dataset(id);
    return ok(to_json(rank_by_similarity(d, require(req, "reference"), weights_param(req, d.schema))));
  }

  ServiceResponse discordant(const std::string& id, const ServiceRequest& req) {
    const auto d = store_.dataset(id);
    std::size_t k = 10;
    if (auto t = param(req, "k")) {
      const double v = number("k", *t);
      if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) throw ValidationError("k: must be a positive integer");
      k = static_cast<std::size_t>(v);
    }
    return ok(to_json(nearest_discordant_pairs(d, weights_param(req, d.schema), k)));
  }

  // --- sessions

  Session load(const std::string& id) {
    auto s = store_.session(id);
    s.set_clock(options_.clock());
    return s;
  }

  // Body: {dataset, participant: {role, demographics}, seed, options}.
  ServiceResponse create_session(const ServiceRequest& req) {
    const auto body = parse_body(req.body);
    if (!body.contains("dataset")) throw ValidationError("dataset: required field");
    const auto ref = body.at("dataset").get<std::string>();
    const auto d = store_.dataset(ref);
    const auto participant =
        body.contains("participant") ? participant_from_json(body.at("participant")) : ParticipantProfile{};
    const auto seed = body.value("seed", std::uint64_t{0});
    SessionOptions opts;
    if (body.contains("options")) opts.group_questions_first = body.at("options").value("group_questions_first", false);
    auto s = store_.create_session(
        [&](const std::string& id) { return Session::start(id, participant, ref, d, seed, opts, options_.clock()); });
    return ok(json{{"id", s.id()}}, 201);
  }

  template <class F>
  ServiceResponse mutate(const std::string& id, F&& f) {
    std::lock_guard lock(store_.session_mutex(id));
    auto s = load(id);
    json out = f(s);
    store_.save_session(s);
    return ok(out);
  }

  ServiceResponse next(const std::string& id) {
    return mutate(id, [](Session& s) { return to_json(s.next_question()); });
  }

  ServiceResponse respond(const std::string& id, const ServiceRequest& req) {
    const auto in = response_input_from_json(parse_body(req.body));
    return mutate(id, [&](Session& s) {
      s.record_response(in);
      return to_json(s.transcript().back());
    });
  }

  ServiceResponse explore(const std::string& id, const ServiceRequest& req) {
    const auto e = exploration_from_json(parse_body(req.body));
    return mutate(id, [&](Session& s) {
      s.record_exploration(e);
      return to_json(s.transcript().back());
    });
  }

  ServiceResponse advance(const std::string& id) {
    return mutate(id, [](Session& s) {
      s.advance();
      return json{{"stage", s.closed() ? json("closed") : json(s.stage())}};
    });
  }

  // --- analysis and training

  std::vector<std::string> session_list(const json& v) {
    if (v.is_null()) return store_.session_ids();
    if (v.is_string()) {
      std::vector<std::string> out;
      for (auto& s : split(v.get<std::string>(), ','))
        if (!s.empty()) out.push_back(s);
      return out;
    }
    return v.get<std::vector<std::string>>();
  }

  ResponseMatrix matrix_for(const std::vector<std::string>& ids) {
    std::vector<json> logs;
    for (const auto& id : ids) {
      auto log = store_.session_log(id);
      import_session(log, store_.dataset(log.at("dataset_ref").get<std::string>()));  // validates
      logs.push_back(std::move(log));
    }
    return build_response_matrix(logs);
  }

  ServiceResponse summary(const ServiceRequest& req) {
    const auto p = param(req, "sessions");
    return ok(analysis_summary(matrix_for(session_list(p ? json(*p) : json(nullptr)))));
  }

  // Body: {dataset, sessions, policy, config}. Stores the model and its
  // training report under a new model id.
  ServiceResponse train_model(const ServiceRequest& req) {
    const auto body = parse_body(req.body);
    if (!body.contains("dataset")) throw ValidationError("dataset: required field");
    const auto d = store_.dataset(body.at("dataset").get<std::string>());
    const auto matrix = matrix_for(session_list(body.value("sessions", json(nullptr))));
    const auto policy = parse_policy(body.value("policy", std::string("borda_aggregate")));
    const auto config = body.contains("config") ? training_config_from_json(body.at("config")) : TrainingConfig{};
    const auto data = with_referenced_fixtures(d, matrix.judgments);
    const auto constraints = derive_constraints(matrix.judgments, policy, &data, config.margin);
    const auto result = train(data, constraints, config);
    const auto id = store_.add_model(result.model, to_json(result.report));
    return ok(json{{"id", id}}, 201);
  }

  ServiceResponse import_model(const ServiceRequest& req) {
    const auto m = model_from_json(parse_body(req.body));
    return ok(json{{"id", store_.add_model(m, json(nullptr))}}, 201);
  }

  // Stored training report, or a fresh evaluation on ?dataset=.
  ServiceResponse model_report(const std::string& id, const ServiceRequest& req) {
    if (auto ds = param(req, "dataset")) return ok(to_json(evaluate(store_.model(id), store_.dataset(*ds), {})));
    store_.model(id);
    return ok(store_.report(id));
  }

  Store& store_;
  ServiceOptions options_;
};

}  // namespace fairlicit
