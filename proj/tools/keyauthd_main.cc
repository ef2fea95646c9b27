// Copyright 2026 The KeyAuth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// keyauthd: the authentication server.
//
//   keyauthd [--config FILE]
//
// Settings come from the config file, then KEYAUTH_* environment overrides.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <pthread.h>

#include <exception>
#include <memory>
#include <string>

#include "keyauth/server/config.h"
#include "keyauth/server/http_server.h"
#include "keyauth/server/service.h"

namespace {

const char* mode_name(keyauth::server::RegistrationMode mode) {
  return mode == keyauth::server::RegistrationMode::kOpen ? "open" : "token";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KeyAuth authentication server"};
  std::string config_path;
  app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  // Block the stop signals before any thread starts so that sigwait() below
  // is the only receiver.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  using namespace keyauth::server;
  std::unique_ptr<Service> service;
  ServerConfig config;
  try {
    if (!config_path.empty()) config = load_config_file(config_path);
    apply_env_overrides(config);
    config.validate();
    service = Service::open(config);
  } catch (const std::exception& e) {
    spdlog::critical("startup failed: {}", e.what());
    return 1;
  }

  HttpServer http(*service, config.host(), config.port());
  int port = 0;
  try {
    port = http.start();
  } catch (const std::exception& e) {
    spdlog::critical("cannot listen on {}: {}", config.listen_address, e.what());
    return 1;
  }

  spdlog::info("server key {}", service->server_key_fingerprint().to_base64url());
  spdlog::info("data dir {}, registration {}", config.data_dir.string(),
               mode_name(config.registration_mode));
  spdlog::info("listening on {}:{}", config.host(), port);

  int sig = 0;
  sigwait(&stop_signals, &sig);
  spdlog::info("signal {}, shutting down", sig);
  http.stop();
  return 0;
}
