#include <gtest/gtest.h>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <set>
#include <thread>

#include "fairlicit/service_http.hpp"
#include "fixture_builders.hpp"

using namespace fairlicit;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FAIRLICIT_FIXTURE_DIR;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("fairlicit-svc-" + std::to_string(::getpid()) + "-" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    store_ = std::make_unique<Store>(root_);
    ServiceOptions opts;
    opts.clock = [] { return logical_clock(1'700'000'000'000, 1000); };
    service_ = std::make_unique<Service>(*store_, opts);
  }
  void TearDown() override { fs::remove_all(root_); }

  ServiceResponse call(const std::string& method, const std::string& path, const std::string& body = "",
                       std::map<std::string, std::string> query = {}) {
    return service_->handle({method, path, std::move(query), body});
  }
  json ok(const std::string& method, const std::string& path, const std::string& body = "",
          std::map<std::string, std::string> query = {}, int status = 200) {
    const auto r = call(method, path, body, std::move(query));
    EXPECT_EQ(r.status, status) << method << " " << path << ": " << r.body;
    return json::parse(r.body);
  }
  std::string error_of(const ServiceResponse& r) { return json::parse(r.body).at("error").get<std::string>(); }

  // Drives a session to the end of stage 1 with fixed answers.
  void answer_stage1(const std::string& id) {
    for (;;) {
      const auto q = ok("GET", "/sessions/" + id + "/next");
      if (q.at("kind") == "stage_prompt") return;
      const std::string choice = q.at("kind") == "pairwise" ? "prioritize_a" : "no";
      ok("POST", "/sessions/" + id + "/responses", json{{"question_id", q.at("question_id")}, {"choice", choice}}.dump());
    }
  }

  fs::path root_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<Service> service_;
};

}  // namespace

TEST(StatusMapping, ErrorNamesToCodes) {
  EXPECT_EQ(status_for("ValidationError"), 400);
  EXPECT_EQ(status_for("SchemaError"), 400);
  EXPECT_EQ(status_for("UnknownDataset"), 404);
  EXPECT_EQ(status_for("NotFound"), 404);
  EXPECT_EQ(status_for("DuplicateResponse"), 409);
  EXPECT_EQ(status_for("MissingLabels"), 409);
  EXPECT_EQ(status_for("NonFinite"), 422);
  EXPECT_EQ(status_for("IoError"), 500);
  const auto r = error_response("WrongStage", "nope");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(json::parse(r.body).at("message"), "nope");
}

TEST_F(ServiceTest, DatasetsImportGenerateAndList) {
  EXPECT_EQ(ok("POST", "/datasets/synthetic", R"({"n": 40, "seed": 3})", {}, 201).at("id"), "ds-0001");
  const auto text = read_file(kFixtures / "group_view" / "age_odds_violated.json");
  EXPECT_EQ(ok("POST", "/datasets", text, {}, 201).at("id"), "ds-0002");
  const auto list = ok("GET", "/datasets");
  ASSERT_EQ(list.at("datasets").size(), 2u);
  EXPECT_EQ(list["datasets"][0]["provenance"], "synthetic");
  EXPECT_EQ(list["datasets"][1]["cases"], 13);
  EXPECT_EQ(call("GET", "/datasets/ds-0002").body, serialize(load_dataset_json(kFixtures / "group_view" / "age_odds_violated.json")));

  json csv_body;
  csv_body["schema"] = to_json(default_schema());
  csv_body["csv"] = to_csv(fixtures::parity_violated());
  EXPECT_EQ(ok("POST", "/datasets", csv_body.dump(), {}, 201).at("id"), "ds-0003");
  EXPECT_EQ(generate_synthetic(default_schema(), 40, 3), store_->dataset("ds-0001"));
}

TEST_F(ServiceTest, FairnessBodyIsTheLibraryReport) {
  ok("POST", "/datasets", read_file(kFixtures / "group_view" / "age_odds_violated.json"), {}, 201);
  const auto r = call("GET", "/datasets/ds-0001/fairness", "", {{"criterion", "equalized_odds"}, {"attribute", "victim_age"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, body_text(to_json(equalized_odds_report(fixtures::odds_violated(), "victim_age"))));
  const auto loose = ok("GET", "/datasets/ds-0001/fairness", "",
                        {{"criterion", "equalized_odds"}, {"attribute", "victim_age"}, {"epsilon", "0.5"}});
  EXPECT_EQ(loose.at("verdict"), "satisfied");
  const auto m = ok("GET", "/datasets/ds-0001/metrics", "", {{"attribute", "victim_age"}, {"metric", "fpr"}});
  EXPECT_EQ(m.at("rows").size(), 4u);
}

TEST_F(ServiceTest, SimilarityAndDiscordant) {
  ok("POST", "/datasets/synthetic", R"({"n": 60, "seed": 5})", {}, 201);
  const auto d = store_->dataset("ds-0001");
  const auto r = call("GET", "/datasets/ds-0001/similarity", "", {{"reference", "4"}});
  EXPECT_EQ(r.body, body_text(to_json(rank_by_similarity(d, "4", WeightVector::uniform(12)))));
  const auto pairs = ok("GET", "/datasets/ds-0001/discordant", "", {{"k", "3"}, {"weights", "1,1,1,1,1,1,1,1,1,1,1,0"}});
  EXPECT_EQ(pairs.size(), 3u);
  EXPECT_EQ(ok("GET", "/datasets/ds-0001/discordant").size(), 10u);
  EXPECT_EQ(call("GET", "/datasets/ds-0001/discordant", "", {{"k", "0"}}).status, 400);
  EXPECT_EQ(call("GET", "/datasets/ds-0001/discordant", "", {{"k", "2.5"}}).status, 400);
  EXPECT_EQ(error_of(call("GET", "/datasets/ds-0001/similarity", "", {{"reference", "nope"}})), "UnknownCase");
  EXPECT_EQ(error_of(call("GET", "/datasets/ds-0001/similarity", "", {{"reference", "1"}, {"weights", "1,2"}})),
            "InvalidWeights");
}

TEST_F(ServiceTest, ErrorMapping) {
  EXPECT_EQ(call("GET", "/nowhere").status, 404);
  EXPECT_EQ(error_of(call("GET", "/nowhere")), "NotFound");
  EXPECT_EQ(call("DELETE", "/datasets").status, 404);
  auto r = call("GET", "/datasets/ds-9999");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(error_of(r), "UnknownDataset");
  EXPECT_EQ(error_of(call("GET", "/datasets/..%2Fescape")), "ValidationError");
  EXPECT_EQ(error_of(call("POST", "/datasets", "{not json")), "ValidationError");
  EXPECT_EQ(error_of(call("POST", "/datasets/synthetic", R"({"n": -1, "seed": 1})")), "ValidationError");
  EXPECT_EQ(error_of(call("POST", "/datasets/synthetic", R"({"n": 5, "seed": 1, "marginals": {"victim_gender": [1]}})")),
            "BadMarginals");
  ok("POST", "/datasets", read_file(kFixtures / "group_view" / "age_parity_violated.json"), {}, 201);
  r = call("GET", "/datasets/ds-0001/fairness", "", {{"criterion", "equalized_odds"}, {"attribute", "victim_age"}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(error_of(r), "MissingLabels");
  EXPECT_EQ(error_of(call("GET", "/datasets/ds-0001/fairness", "", {{"criterion", "statistical_parity"}})),
            "ValidationError");
  EXPECT_EQ(error_of(call("GET", "/datasets/ds-0001/fairness", "",
                          {{"criterion", "statistical_parity"}, {"attribute", "x"}, {"epsilon", "abc"}})),
            "ValidationError");
  EXPECT_EQ(error_of(call("GET", "/sessions/ses-0042/next")), "UnknownSession");
  EXPECT_EQ(error_of(call("GET", "/models/mdl-0001")), "UnknownModel");
}

TEST_F(ServiceTest, SessionLifecycle) {
  ok("POST", "/datasets/synthetic", R"({"n": 30, "seed": 1})", {}, 201);
  const auto id = ok("POST", "/sessions", R"({"dataset": "ds-0001", "participant": {"role": "parent"}, "seed": 4})",
                     {}, 201)
                      .at("id")
                      .get<std::string>();
  EXPECT_EQ(id, "ses-0001");
  const auto q1 = ok("GET", "/sessions/" + id + "/next");
  EXPECT_EQ(q1.at("question_id"), "p01");
  EXPECT_EQ(ok("GET", "/sessions/" + id + "/next"), q1);  // pending question is re-served
  auto r = call("POST", "/sessions/" + id + "/responses", R"({"question_id": "p01", "choice": "maybe"})");
  EXPECT_EQ(r.status, 400);
  const auto ev = ok("POST", "/sessions/" + id + "/responses", R"({"question_id": "p01", "choice": "equal"})");
  EXPECT_EQ(ev.at("type"), "response_recorded");
  r = call("POST", "/sessions/" + id + "/responses", R"({"question_id": "p01", "choice": "equal"})");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(error_of(r), "DuplicateResponse");
  EXPECT_EQ(error_of(call("POST", "/sessions/" + id + "/responses", R"({"question_id": "zz", "choice": "equal"})")),
            "UnknownQuestion");
  EXPECT_EQ(error_of(call("POST", "/sessions/" + id + "/advance")), "WrongStage");
  answer_stage1(id);
  EXPECT_EQ(ok("POST", "/sessions/" + id + "/advance").at("stage"), 2);
  const auto q = ok("GET", "/sessions/" + id + "/next");
  EXPECT_EQ(q.at("show_predictions"), true);
  ok("POST", "/sessions/" + id + "/responses", json{{"question_id", q.at("question_id")}, {"choice", "prioritize_b"}}.dump());
  ok("POST", "/sessions/" + id + "/advance");
  EXPECT_EQ(error_of(call("POST", "/sessions/" + id + "/events", R"({"type": "group_query", "attributes": ["victim_age"], "metric": "fpr"})")),
            "WrongStage");
  ok("POST", "/sessions/" + id + "/events", R"({"type": "weight_change", "weights": [1,1,1,1,1,1,1,1,1,1,1,3]})");
  ok("POST", "/sessions/" + id + "/events", R"({"type": "similarity_flag", "case_a": "1", "case_b": "2", "reason": "same"})");
  ok("POST", "/sessions/" + id + "/advance");
  ok("POST", "/sessions/" + id + "/events", R"({"type": "group_query", "attributes": ["victim_age"], "metric": "fpr"})");
  EXPECT_EQ(ok("POST", "/sessions/" + id + "/advance").at("stage"), "closed");
  r = call("POST", "/sessions/" + id + "/advance");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(error_of(r), "SessionClosed");

  const auto exported = call("GET", "/sessions/" + id + "/export");
  EXPECT_EQ(exported.body, serialize(import_session(json::parse(exported.body), store_->dataset("ds-0001"))));
  EXPECT_EQ(json::parse(exported.body).at("elicited_weights").back(), 3.0);
  EXPECT_EQ(ok("GET", "/sessions").at("sessions"), json::array({"ses-0001"}));
}

TEST_F(ServiceTest, SummaryTrainAndModels) {
  ok("POST", "/datasets/synthetic", R"({"n": 80, "seed": 2})", {}, 201);
  for (int k = 0; k < 2; ++k) {
    const auto id = ok("POST", "/sessions", R"({"dataset": "ds-0001", "seed": 7})", {}, 201).at("id").get<std::string>();
    answer_stage1(id);
  }
  const auto summary = ok("GET", "/analysis/summary");
  EXPECT_EQ(summary.at("participants"), 2);
  EXPECT_EQ(summary.at("support")[0].at("fraction"), 0.0);
  EXPECT_EQ(ok("GET", "/analysis/summary", "", {{"sessions", "ses-0002"}}).at("participants"), 1);
  EXPECT_EQ(error_of(call("GET", "/analysis/summary", "", {{"sessions", "ses-0009"}})), "UnknownSession");

  const auto mid = ok("POST", "/train", R"({"dataset": "ds-0001", "config": {"max_iterations": 300, "lambda_parity": 1}})",
                      {}, 201)
                       .at("id")
                       .get<std::string>();
  EXPECT_EQ(mid, "mdl-0001");
  const auto model = ok("GET", "/models/" + mid);
  EXPECT_EQ(model.at("format"), "fairlicit-model");
  const auto report = ok("GET", "/models/" + mid + "/report");
  EXPECT_EQ(report.at("strict_constraints"), 14);  // every fixture pair answered prioritize_a twice
  EXPECT_EQ(report.at("convergence").at("iterations"), 300);
  const auto fresh = ok("GET", "/models/" + mid + "/report", "", {{"dataset", "ds-0001"}});
  EXPECT_EQ(fresh.at("convergence"), nullptr);

  EXPECT_EQ(ok("POST", "/models", model.dump(), {}, 201).at("id"), "mdl-0002");
  EXPECT_EQ(ok("GET", "/models/mdl-0002/report"), nullptr);
  EXPECT_EQ(error_of(call("POST", "/models", R"({"format": "x"})")), "ValidationError");
  EXPECT_EQ(error_of(call("POST", "/train", R"({"dataset": "ds-0001", "policy": "vote"})")), "ValidationError");
}

TEST_F(ServiceTest, ConcurrentSessionCreationGivesDistinctIds) {
  ok("POST", "/datasets/synthetic", R"({"n": 20, "seed": 2})", {}, 201);
  std::vector<std::thread> pool;
  std::vector<std::string> ids(8);
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&, t] {
      const auto r = call("POST", "/sessions", R"({"dataset": "ds-0001", "seed": 1})");
      ids[t] = r.status == 201 ? json::parse(r.body).at("id").get<std::string>() : "error";
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 8u);
  EXPECT_EQ(store_->session_ids().size(), 8u);
}

TEST_F(ServiceTest, ConcurrentWritesToOneSessionAreSerialized) {
  ok("POST", "/datasets/synthetic", R"({"n": 20, "seed": 2})", {}, 201);
  ok("POST", "/sessions", R"({"dataset": "ds-0001", "seed": 1})", {}, 201);
  answer_stage1("ses-0001");
  ok("POST", "/sessions/ses-0001/advance");
  ok("POST", "/sessions/ses-0001/advance");
  const auto before = store_->session("ses-0001").transcript().size();
  std::atomic<int> failures{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&] {
      for (int k = 0; k < 10; ++k) {
        const auto r = call("POST", "/sessions/ses-0001/events", R"({"type": "similarity_flag", "case_a": "1", "case_b": "2"})");
        if (r.status != 200) ++failures;
      }
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(failures, 0);
  EXPECT_EQ(store_->session("ses-0001").transcript().size(), before + 40);
}

TEST_F(ServiceTest, HttpRoundTripMatchesHandle) {
  ok("POST", "/datasets", read_file(kFixtures / "group_view" / "age_parity_violated.json"), {}, 201);
  httplib::Server server;
  install(server, *service_);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/datasets/ds-0001/fairness?criterion=statistical_parity&attribute=victim_age");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, call("GET", "/datasets/ds-0001/fairness", "",
                            {{"criterion", "statistical_parity"}, {"attribute", "victim_age"}})
                           .body);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");

  res = client.Post("/datasets/synthetic", R"({"n": 10, "seed": 1})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  res = client.Get("/datasets/ds-7777");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(json::parse(res->body).at("error"), "UnknownDataset");
  res = client.Options("/datasets");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);

  server.stop();
  th.join();
}
