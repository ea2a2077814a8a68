#pragma once

#include <exception>
#include <string>

#include <nlohmann/json.hpp>

#include "geocode/mesh.hpp"

namespace geocode::api {

/// Error codes shared by the CLI and the HTTP service.
enum class ErrorCode { bad_request, unknown_program, invalid_params, eval_failed, not_found };

std::string_view to_string(ErrorCode code) noexcept;

struct ApiError {
  ErrorCode code = ErrorCode::bad_request;
  std::string message;
  nlohmann::json detail;  // null when absent

  nlohmann::json to_json() const;
};

/// Thrown by request handlers that already know the error to report.
class RequestError : public std::exception {
 public:
  RequestError(ErrorCode code, std::string message, nlohmann::json detail = nullptr)
      : error_{code, std::move(message), std::move(detail)} {}
  const char* what() const noexcept override { return error_.message.c_str(); }
  const ApiError& error() const noexcept { return error_; }

 private:
  ApiError error_;
};

/// Maps library exceptions onto the catalog. Call from inside a catch block.
ApiError from_current_exception();

int http_status(ErrorCode code) noexcept;
/// 3 for eval_failed, 2 for everything else.
int exit_code(ErrorCode code) noexcept;

/// {"vertices": [x0, y0, z0, ...], "faces": [i0, j0, k0, ...],
///  "face_part": [p0, ...], "parts": [names]}
nlohmann::json mesh_to_json(const geom::LabeledMesh& m);

}  // namespace geocode::api
