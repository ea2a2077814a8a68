#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "geocode/fit.hpp"

namespace geocode::service {

struct Request {
  std::string method;  // "GET" or "POST"
  std::string path;
  std::string body;
  std::string accept;
  std::map<std::string, std::string> query;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Stateless request handling over the program registry and an optional,
/// read-only fit index.
class Service {
 public:
  Service() = default;
  /// Loads the manifest under `dataset` and builds its fit index.
  explicit Service(const std::filesystem::path& dataset);

  Response handle(const Request& req) const;
  bool has_index() const noexcept { return index_ != nullptr; }

 private:
  std::shared_ptr<const fit::FitIndex> index_;
};

/// HTTP front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  /// Throws IoError when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace geocode::service
