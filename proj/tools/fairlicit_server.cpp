// HTTP JSON API over a file-backed store.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "fairlicit/service_http.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fairlicit HTTP service"};
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string store_dir;
  if (const char* env = std::getenv("FAIRLICIT_STORE")) store_dir = env;
  double epsilon = fairlicit::kDefaultEpsilon;
  app.add_option("--port", port, "listen port");
  app.add_option("--host", host, "listen address");
  app.add_option("--store-dir", store_dir, "store directory (default $FAIRLICIT_STORE or ./store)");
  app.add_option("--epsilon-default", epsilon, "verdict tolerance when a request gives none");
  CLI11_PARSE(app, argc, argv);
  if (store_dir.empty()) store_dir = "store";

  try {
    fairlicit::Store store(store_dir);
    fairlicit::ServiceOptions opts;
    opts.epsilon_default = epsilon;
    fairlicit::Service service(store, opts);
    httplib::Server server;
    fairlicit::install(server, service);
    std::cerr << "listening on " << host << ":" << port << " (store " << store_dir << ")\n";
    if (!server.listen(host, port)) {
      std::cerr << "IoError: cannot listen on " << host << ":" << port << "\n";
      return 1;
    }
  } catch (const fairlicit::Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
