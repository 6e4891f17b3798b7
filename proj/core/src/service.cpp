#include "burnout/service.hpp"

#include <httplib.h>

#include <filesystem>

#include "burnout/error.hpp"
#include "burnout/pipeline.hpp"

namespace burnout::app {

namespace {

HttpResponse no_bundle() {
  return {503, "application/json", R"({"error":"no model bundle loaded"})"};
}

}  // namespace

void PredictionService::set_bundle(std::shared_ptr<const store::ModelBundle> bundle) {
  std::lock_guard lock(mutex_);
  bundle_ = std::move(bundle);
}

std::shared_ptr<const store::ModelBundle> PredictionService::bundle() const {
  std::lock_guard lock(mutex_);
  return bundle_;
}

HttpResponse PredictionService::handle_predict(std::string_view body) const {
  const auto snapshot = bundle();
  if (!snapshot) return no_bundle();
  try {
    const PredictRequest request = parse_predict_request(body);
    return {200, "application/json", to_json(predict_pipeline(*snapshot, request))};
  } catch (const ValidationError& e) {
    return {400, "application/json", validation_error_json(e)};
  } catch (const Error& e) {
    return {500, "application/json", std::string(R"({"error":"internal error"})")};
  }
}

HttpResponse PredictionService::handle_model_info() const {
  const auto snapshot = bundle();
  if (!snapshot) return no_bundle();
  return {200, "application/json", model_info_json(*snapshot)};
}

HttpResponse PredictionService::handle_health() const { return {200, "text/plain", "ok"}; }

HttpServer::HttpServer(PredictionService& service, ServerOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server_->Post("/api/v1/predict", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.handle_predict(req.body));
  });
  server_->Get("/api/v1/model", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service_.handle_model_info());
  });
  server_->Get("/api/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service_.handle_health());
  });
  if (!options_.static_dir.empty()) {
    if (!std::filesystem::is_directory(options_.static_dir) || !server_->set_mount_point("/", options_.static_dir)) {
      throw IoError(options_.static_dir, "static directory not found");
    }
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ <= 0) {
    throw IoError(options_.host + ":" + std::to_string(options_.port), "cannot bind listening socket");
  }
  return port_;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace burnout::app
