#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fairlicit/dataset_io.hpp"
#include "fairlicit/elicitation.hpp"
#include "fairlicit/training.hpp"

namespace fairlicit {

// File-backed artifact store:
//   <root>/datasets/<id>.json   <root>/sessions/<id>.json
//   <root>/models/<id>.json     <root>/reports/<id>.json
// Every write goes through write_file_atomic. Ids are derived from the files
// present, so a store is fully described by its directory.
class Store {
 public:
  explicit Store(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    for (const char* sub : {"datasets", "sessions", "models", "reports"}) {
      std::filesystem::create_directories(root_ / sub, ec);
      if (ec) throw IoError("cannot create " + (root_ / sub).string() + ": " + ec.message());
    }
  }

  const std::filesystem::path& root() const noexcept { return root_; }

  // --- datasets

  std::vector<std::string> dataset_ids() const { return list("datasets"); }

  std::string add_dataset(const Dataset& d) {
    std::lock_guard lock(alloc_mutex_);
    const auto id = next_id("datasets", "ds");
    write_file_atomic(path("datasets", id), serialize(d));
    return id;
  }

  Dataset dataset(const std::string& id) const {
    const auto p = path("datasets", checked(id));
    if (!std::filesystem::exists(p)) throw UnknownDataset("unknown dataset '" + id + "'");
    return load_dataset_json(p);
  }

  // --- sessions

  std::vector<std::string> session_ids() const { return list("sessions"); }

  // Allocates an id and persists the session built by `make(id)`.
  template <class Make>
  Session create_session(Make&& make) {
    std::lock_guard lock(alloc_mutex_);
    const auto id = next_id("sessions", "ses");
    Session s = make(id);
    save_session(s);
    return s;
  }

  void save_session(const Session& s) { write_file_atomic(path("sessions", checked(s.id())), serialize(s)); }

  json session_log(const std::string& id) const {
    const auto p = path("sessions", checked(id));
    if (!std::filesystem::exists(p)) throw UnknownSession("unknown session '" + id + "'");
    try {
      return json::parse(read_file(p));
    } catch (const json::parse_error& e) {
      throw ValidationError("session '" + id + "': " + e.what());
    }
  }

  Session session(const std::string& id) const {
    const auto log = session_log(id);
    return import_session(log, dataset(log.at("dataset_ref").get<std::string>()));
  }

  // Serializes mutations of one session.
  std::mutex& session_mutex(const std::string& id) {
    std::lock_guard lock(table_mutex_);
    auto& m = session_locks_[id];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  // --- models and reports

  std::string add_model(const ConstrainedModel& m, const json& report) {
    std::lock_guard lock(alloc_mutex_);
    const auto id = next_id("models", "mdl");
    write_file_atomic(path("reports", id), report.dump(2) + "\n");
    write_file_atomic(path("models", id), serialize(m));
    return id;
  }

  ConstrainedModel model(const std::string& id) const {
    const auto p = path("models", checked(id));
    if (!std::filesystem::exists(p)) throw UnknownModel("unknown model '" + id + "'");
    try {
      return model_from_json(json::parse(read_file(p)));
    } catch (const json::parse_error& e) {
      throw ValidationError("model '" + id + "': " + e.what());
    }
  }

  json report(const std::string& id) const {
    const auto p = path("reports", checked(id));
    if (!std::filesystem::exists(p)) throw UnknownModel("no report for model '" + id + "'");
    return json::parse(read_file(p));
  }

 private:
  // Ids are embedded in file names, so keep them to a safe alphabet.
  static const std::string& checked(const std::string& id) {
    const bool ok = !id.empty() && id.size() <= 128 && id.front() != '.' &&
                    std::all_of(id.begin(), id.end(), [](unsigned char c) {
                      return std::isalnum(c) || c == '-' || c == '_' || c == '.';
                    });
    if (!ok) throw ValidationError("id: '" + id + "' is not a valid identifier");
    return id;
  }

  std::filesystem::path path(const char* kind, const std::string& id) const {
    return root_ / kind / (id + ".json");
  }

  std::vector<std::string> list(const char* kind) const {
    std::vector<std::string> ids;
    for (const auto& e : std::filesystem::directory_iterator(root_ / kind))
      if (e.is_regular_file() && e.path().extension() == ".json") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end(), id_less);
    return ids;
  }

  std::string next_id(const char* kind, const std::string& prefix) const {
    long best = 0;
    for (const auto& id : list(kind)) {
      if (id.rfind(prefix + "-", 0) != 0) continue;
      const auto n = parse_double(id.substr(prefix.size() + 1));
      if (n && *n > best) best = static_cast<long>(*n);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%04ld", prefix.c_str(), best + 1);
    return buf;
  }

  std::filesystem::path root_;
  std::mutex alloc_mutex_;
  std::mutex table_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> session_locks_;
};

}  // namespace fairlicit
