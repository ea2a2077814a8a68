#include "api.hpp"

#include <filesystem>

#include "geocode/error.hpp"

namespace geocode::api {

using nlohmann::json;

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::bad_request: return "bad_request";
    case ErrorCode::unknown_program: return "unknown_program";
    case ErrorCode::invalid_params: return "invalid_params";
    case ErrorCode::eval_failed: return "eval_failed";
    case ErrorCode::not_found: return "not_found";
  }
  return "bad_request";
}

json ApiError::to_json() const {
  json out{{"code", std::string(to_string(code))}, {"message", message}};
  if (!detail.is_null()) out["detail"] = detail;
  return out;
}

ApiError from_current_exception() {
  try {
    throw;
  } catch (const RequestError& e) {
    return e.error();
  } catch (const UnknownProgramError& e) {
    return {ErrorCode::unknown_program, e.what(), {{"program", e.id()}}};
  } catch (const ValidationError& e) {
    json detail = e.subject().empty() ? json(nullptr) : json{{"parameter", e.subject()}};
    return {ErrorCode::invalid_params, e.what(), std::move(detail)};
  } catch (const EvalError& e) {
    return {ErrorCode::eval_failed, e.what(), {{"node", e.node_id()}}};
  } catch (const GeometryError& e) {
    return {ErrorCode::eval_failed, e.what(), nullptr};
  } catch (const ParseError& e) {
    return {ErrorCode::bad_request, e.what(), nullptr};
  } catch (const IoError& e) {
    return {ErrorCode::not_found, e.what(), nullptr};
  } catch (const std::filesystem::filesystem_error& e) {
    return {ErrorCode::not_found, e.what(), nullptr};
  } catch (const json::exception& e) {
    return {ErrorCode::bad_request, e.what(), nullptr};
  } catch (const std::exception& e) {
    return {ErrorCode::eval_failed, e.what(), nullptr};
  }
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::bad_request:
    case ErrorCode::invalid_params: return 400;
    case ErrorCode::unknown_program:
    case ErrorCode::not_found: return 404;
    case ErrorCode::eval_failed: return 422;
  }
  return 400;
}

int exit_code(ErrorCode code) noexcept { return code == ErrorCode::eval_failed ? 3 : 2; }

json mesh_to_json(const geom::LabeledMesh& m) {
  std::vector<double> vertices;
  vertices.reserve(m.vertices.size() * 3);
  for (const auto& v : m.vertices) vertices.insert(vertices.end(), {v.x(), v.y(), v.z()});
  std::vector<std::uint32_t> faces;
  faces.reserve(m.faces.size() * 3);
  for (const auto& f : m.faces) faces.insert(faces.end(), f.begin(), f.end());
  return {{"vertices", vertices}, {"faces", faces}, {"face_part", m.face_part}, {"parts", m.parts}};
}

}  // namespace geocode::api
