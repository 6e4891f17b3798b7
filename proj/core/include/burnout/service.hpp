#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "burnout/modelstore.hpp"

namespace httplib {
class Server;
}

namespace burnout::app {

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Request handlers over an immutable, swappable bundle. Each handler takes one
// snapshot of the bundle pointer, so a concurrent reload never mixes two bundles
// within a request.
class PredictionService {
 public:
  PredictionService() = default;
  explicit PredictionService(std::shared_ptr<const store::ModelBundle> bundle) : bundle_(std::move(bundle)) {}

  void set_bundle(std::shared_ptr<const store::ModelBundle> bundle);
  std::shared_ptr<const store::ModelBundle> bundle() const;

  HttpResponse handle_predict(std::string_view body) const;
  HttpResponse handle_model_info() const;
  HttpResponse handle_health() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const store::ModelBundle> bundle_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8600;  // 0 picks a free port
  std::string static_dir;  // served at "/" when non-empty
};

// HTTP front end: /api/v1/predict, /api/v1/model, /api/v1/health and static files.
class HttpServer {
 public:
  HttpServer(PredictionService& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the listening socket; returns the bound port. Throws IoError on failure.
  int bind();
  // Blocks until stop() is called. bind() must have succeeded.
  void listen();
  void stop();
  int port() const noexcept { return port_; }

 private:
  PredictionService& service_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = 0;
};

}  // namespace burnout::app
