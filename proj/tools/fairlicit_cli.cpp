// Command-line driver: generate data, audit fairness, rank by similarity,
// replay session logs, aggregate responses, train and report.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "fairlicit/analysis.hpp"
#include "fairlicit/dataset_io.hpp"
#include "fairlicit/metrics.hpp"
#include "fairlicit/service.hpp"
#include "fairlicit/similarity.hpp"
#include "fairlicit/store.hpp"
#include "fairlicit/synthetic.hpp"
#include "fairlicit/training.hpp"

namespace fs = std::filesystem;
using namespace fairlicit;

namespace {

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file_atomic(out, text);
}

// A dataset argument is a .json dataset, a .csv table (with --schema, or the
// bundled schema), or a dataset id inside --store.
Dataset load_dataset_arg(const std::string& arg, const std::string& schema_file, const std::string& store_dir,
                         double threshold) {
  const fs::path p(arg);
  if (fs::exists(p)) {
    if (p.extension() == ".csv") {
      const auto schema = schema_file.empty() ? default_schema() : load_schema(schema_file);
      return parse_dataset_csv(schema, read_file(p), threshold);
    }
    return dataset_from_json(read_json(p));
  }
  if (!store_dir.empty()) return Store(store_dir).dataset(arg);
  throw IoError("cannot read '" + arg + "'");
}

// Session logs under dir/sessions, with datasets from dir/datasets or the
// store. Each log is validated by replaying it.
std::vector<json> load_session_logs(const fs::path& dir, const std::string& store_dir) {
  if (!fs::is_directory(dir / "sessions")) throw IoError("no sessions/ directory under '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "sessions"))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return id_less(a.stem().string(), b.stem().string()); });
  std::map<std::string, Dataset> datasets;
  std::vector<json> logs;
  for (const auto& f : files) {
    auto log = read_json(f);
    const auto ref = log.at("dataset_ref").get<std::string>();
    if (!datasets.count(ref)) {
      const auto local = dir / "datasets" / (ref + ".json");
      if (fs::exists(local))
        datasets.emplace(ref, load_dataset_json(local));
      else if (!store_dir.empty())
        datasets.emplace(ref, Store(store_dir).dataset(ref));
      else
        throw UnknownDataset("session " + f.filename().string() + " references unknown dataset '" + ref + "'");
    }
    import_session(log, datasets.at(ref));
    logs.push_back(std::move(log));
  }
  return logs;
}

ResponseMatrix load_matrix(const std::string& sessions_dir, const std::string& matrix_file,
                           const std::string& store_dir) {
  if (!sessions_dir.empty()) return build_response_matrix(load_session_logs(sessions_dir, store_dir));
  if (matrix_file.empty() || matrix_file == "-") {
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    try {
      return matrix_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("matrix: ") + e.what());
    }
  }
  return matrix_from_json(read_json(matrix_file));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairlicit: fairness auditing and elicitation tools"};
  app.require_subcommand(1);

  std::string dataset, schema_file, store_dir, out, marginals_file;
  double threshold = 0.5;
  bool as_json = false, as_csv = false;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string format = "json";
  gen->add_option("--n", n, "number of cases")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--schema", schema_file, "schema JSON (default: bundled schema)");
  gen->add_option("--marginals", marginals_file, "marginals JSON");
  gen->add_option("--threshold", threshold, "decision threshold");
  gen->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  gen->add_option("--out", out, "output file (default stdout)");
  gen->add_option("--store", store_dir, "also add the dataset to this store");

  // audit
  auto* audit = app.add_subcommand("audit", "group fairness report or group view");
  std::string criterion, metric, attribute, attribute2;
  std::optional<double> epsilon;
  for (auto* sc : {audit}) {
    sc->add_option("--dataset", dataset, "dataset file or store id")->required();
    sc->add_option("--schema", schema_file, "schema JSON for CSV input");
    sc->add_option("--store", store_dir, "store directory");
    sc->add_option("--threshold", threshold, "threshold for CSV input");
  }
  audit->add_option("--criterion", criterion, "statistical_parity or equalized_odds");
  audit->add_option("--metric", metric, "group view metric");
  audit->add_option("--attribute", attribute, "sensitive attribute")->required();
  audit->add_option("--attribute2", attribute2, "second attribute for the group view");
  audit->add_option("--epsilon", epsilon, "verdict tolerance");
  audit->add_flag("--json", as_json, "print JSON");
  audit->add_flag("--csv", as_csv, "print CSV");

  // similar
  auto* similar = app.add_subcommand("similar", "rank cases by weighted similarity");
  std::string reference, weights;
  std::size_t limit = 0, discordant_k = 0;
  similar->add_option("--dataset", dataset, "dataset file or store id")->required();
  similar->add_option("--schema", schema_file, "schema JSON for CSV input");
  similar->add_option("--store", store_dir, "store directory");
  similar->add_option("--reference", reference, "reference case id");
  similar->add_option("--weights", weights, "comma-separated feature weights");
  similar->add_option("--limit", limit, "rows to print in text mode");
  similar->add_option("--discordant", discordant_k, "list the K nearest pairs with different predictions");
  similar->add_flag("--json", as_json, "print JSON");

  // replay
  auto* replay = app.add_subcommand("replay", "replay session logs into a response matrix");
  std::string sessions_dir;
  replay->add_option("--sessions", sessions_dir, "directory with sessions/ and datasets/")->required();
  replay->add_option("--store", store_dir, "store used to resolve datasets");
  replay->add_option("--out", out, "output file (default stdout)");

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "summarize a response matrix");
  std::string matrix_file;
  aggregate->add_option("--matrix", matrix_file, "matrix JSON (default stdin)");
  aggregate->add_option("--sessions", sessions_dir, "read session logs instead of a matrix");
  aggregate->add_option("--store", store_dir, "store used to resolve datasets");
  aggregate->add_flag("--json", as_json, "print the JSON summary instead of CSV");

  // train and report
  auto* trainc = app.add_subcommand("train", "train a model under elicited constraints");
  auto* report = app.add_subcommand("report", "evaluate a trained model");
  std::string policy = "borda_aggregate", config_file, model_file;
  TrainingConfig cfg;
  std::vector<std::string> excluded, fairness_attrs;
  for (auto* sc : {trainc, report}) {
    sc->add_option("--dataset", dataset, "dataset file or store id")->required();
    sc->add_option("--schema", schema_file, "schema JSON for CSV input");
    sc->add_option("--store", store_dir, "store directory");
    sc->add_option("--sessions", sessions_dir, "directory of session logs");
    sc->add_option("--matrix", matrix_file, "response matrix JSON");
    sc->add_option("--policy", policy, "per_participant or borda_aggregate");
    sc->add_flag("--json", as_json, "print JSON");
  }
  trainc->add_option("--config", config_file, "training config JSON");
  trainc->add_option("--lambda-pair", cfg.lambda_pair);
  trainc->add_option("--lambda-parity", cfg.lambda_parity);
  trainc->add_option("--lambda-odds", cfg.lambda_odds);
  trainc->add_option("--margin", cfg.margin);
  trainc->add_option("--l2", cfg.l2);
  trainc->add_option("--exclude", excluded, "attribute the model must not use");
  trainc->add_option("--fairness-attribute", fairness_attrs, "attribute whose gaps are penalized");
  trainc->add_option("--seed", cfg.seed);
  trainc->add_option("--max-iterations", cfg.max_iterations);
  trainc->add_option("--tolerance", cfg.tolerance);
  trainc->add_option("--out", out, "model output file")->required();
  report->add_option("--model", model_file, "model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "UsageError: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      const auto schema = schema_file.empty() ? default_schema() : load_schema(schema_file);
      const auto marginals = marginals_file.empty() ? Marginals{} : marginals_from_json(read_json(marginals_file));
      SyntheticConfig sc;
      sc.threshold = threshold;
      const auto d = generate_synthetic(schema, n, seed, marginals, sc);
      if (!store_dir.empty()) std::cerr << Store(store_dir).add_dataset(d) << "\n";
      emit(format == "csv" ? to_csv(d) : serialize(d), out);
    } else if (audit->parsed()) {
      const auto d = load_dataset_arg(dataset, schema_file, store_dir, threshold);
      if (!criterion.empty()) {
        const auto r = fairness_report(d, parse_criterion(criterion), attribute, epsilon.value_or(kDefaultEpsilon));
        std::cout << (as_json ? body_text(to_json(r)) : as_csv ? render_csv(r) : render_text(r));
      } else {
        std::vector<std::string> attrs{attribute};
        if (!attribute2.empty()) attrs.push_back(attribute2);
        const auto g = group_view_summary(d, attrs, parse_metric(metric.empty() ? "positive_rate" : metric));
        std::cout << (as_json ? body_text(to_json(g)) : as_csv ? render_csv(g) : render_text(g));
      }
    } else if (similar->parsed()) {
      const auto d = load_dataset_arg(dataset, schema_file, store_dir, threshold);
      const auto w = weights.empty() ? WeightVector::uniform(d.schema.size()) : parse_weights(weights, d.schema);
      if (discordant_k > 0) {
        const auto pairs = nearest_discordant_pairs(d, w, discordant_k);
        if (as_json) {
          std::cout << body_text(to_json(pairs));
        } else {
          for (const auto& p : pairs) std::cout << p.case_a << "  " << p.case_b << "  " << format_fixed(p.distance, 4) << "\n";
        }
      } else {
        if (reference.empty()) throw ValidationError("reference: required unless --discordant is given");
        const auto r = rank_by_similarity(d, reference, w);
        std::cout << (as_json ? body_text(to_json(r)) : render_text(r, limit));
      }
    } else if (replay->parsed()) {
      emit(body_text(to_json(build_response_matrix(load_session_logs(sessions_dir, store_dir)))), out);
    } else if (aggregate->parsed()) {
      const auto m = load_matrix(sessions_dir, matrix_file, store_dir);
      std::cout << (as_json ? body_text(analysis_summary(m)) : aggregate_csv(m));
    } else if (trainc->parsed() || report->parsed()) {
      const auto d = load_dataset_arg(dataset, schema_file, store_dir, threshold);
      std::vector<PairJudgment> judgments;
      if (!sessions_dir.empty() || !matrix_file.empty())
        judgments = load_matrix(sessions_dir, matrix_file, store_dir).judgments;
      const auto data = with_referenced_fixtures(d, judgments);
      if (trainc->parsed()) {
        TrainingConfig c = config_file.empty() ? cfg : training_config_from_json(read_json(config_file));
        if (!excluded.empty()) c.excluded_attributes = {excluded.begin(), excluded.end()};
        if (!fairness_attrs.empty()) c.fairness_attributes = fairness_attrs;
        const auto constraints = derive_constraints(judgments, parse_policy(policy), &data, c.margin);
        const auto result = train(data, constraints, c);
        write_file_atomic(out, serialize(result.model));
        std::cout << (as_json ? body_text(to_json(result.report)) : render_text(result.report));
      } else {
        const auto model = model_from_json(read_json(model_file));
        const auto constraints = derive_constraints(judgments, parse_policy(policy), &data, model.config.margin);
        const auto r = evaluate(model, data, constraints);
        std::cout << (as_json ? body_text(to_json(r)) : render_text(r));
      }
    }
  } catch (const Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "ValidationError: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
