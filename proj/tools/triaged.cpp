// SPDX-License-Identifier: Apache-2.0
#include <csignal>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "triage/error.hpp"
#include "triage/service/service.hpp"

namespace {

triage::service::Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Issue assignment service"};
  std::optional<std::string> config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "Server config (JSON)")->check(CLI::ExistingFile);
  app.add_flag("--print-config", print_config, "Print the effective config and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    auto env = [](const char* name) -> std::optional<std::string> {
      if (const char* v = std::getenv(name)) return std::string(v);
      return std::nullopt;
    };
    const auto config = triage::service::load_server_config(config_path, env);
    if (print_config) {
      std::cout << triage::service::to_json(config).dump(2) << '\n';
      return 0;
    }
    triage::service::Service service(config);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "triaged: listening on " << config.host << ':' << config.port << '\n';
    const bool ok = service.listen();
    g_service = nullptr;
    if (!ok && !service.is_running()) {
      std::cerr << "triaged: cannot listen on " << config.host << ':' << config.port << '\n';
    }
    return ok ? 0 : 1;
  } catch (const triage::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& f : e.fields()) std::cerr << "  " << f.field << ": " << f.message << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
