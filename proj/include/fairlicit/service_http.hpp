#pragma once

#include <httplib.h>

#include "fairlicit/service.hpp"

namespace fairlicit {

inline ServiceRequest to_service_request(const httplib::Request& req) {
  ServiceRequest r;
  r.method = req.method;
  r.path = req.path;
  for (const auto& [k, v] : req.params) r.query.emplace(k, v);  // first value wins
  r.body = req.body;
  return r;
}

// Sends every request through Service::handle and adds permissive CORS
// headers for the browser UI.
inline void install(httplib::Server& server, Service& service) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto out = service.handle(to_service_request(req));
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  const char* any = R"(/.*)";
  server.Get(any, handler);
  server.Post(any, handler);
  server.Options(any, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

}  // namespace fairlicit
