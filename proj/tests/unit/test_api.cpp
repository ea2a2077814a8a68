#include <gtest/gtest.h>

#include <filesystem>

#include "api.hpp"
#include "geocode/error.hpp"
#include "geocode/mesh.hpp"

using namespace geocode;
using api::ErrorCode;

namespace {

api::ApiError map(const std::function<void()>& f) {
  try {
    f();
  } catch (...) {
    return api::from_current_exception();
  }
  return {};
}

}  // namespace

TEST(Api, ExceptionMapping) {
  EXPECT_EQ(map([] { throw UnknownProgramError("table"); }).code, ErrorCode::unknown_program);
  const auto v = map([] { throw ValidationError("seat_width", "out of range"); });
  EXPECT_EQ(v.code, ErrorCode::invalid_params);
  EXPECT_EQ(v.detail["parameter"], "seat_width");
  EXPECT_EQ(map([] { throw EvalError("n", "boom"); }).code, ErrorCode::eval_failed);
  EXPECT_EQ(map([] { throw GeometryError("flat"); }).code, ErrorCode::eval_failed);
  EXPECT_EQ(map([] { throw ParseError("bad"); }).code, ErrorCode::bad_request);
  EXPECT_EQ(map([] { (void)nlohmann::json::parse("{"); }).code, ErrorCode::bad_request);
  EXPECT_EQ(map([] { throw IoError("gone"); }).code, ErrorCode::not_found);
  EXPECT_EQ(map([] { throw std::filesystem::filesystem_error("x", std::error_code()); }).code, ErrorCode::not_found);
  EXPECT_EQ(map([] { throw api::RequestError(ErrorCode::bad_request, "m", {{"key", "k"}}); }).detail["key"], "k");
}

TEST(Api, StatusAndExitCodes) {
  EXPECT_EQ(api::http_status(ErrorCode::bad_request), 400);
  EXPECT_EQ(api::http_status(ErrorCode::invalid_params), 400);
  EXPECT_EQ(api::http_status(ErrorCode::unknown_program), 404);
  EXPECT_EQ(api::http_status(ErrorCode::not_found), 404);
  EXPECT_EQ(api::http_status(ErrorCode::eval_failed), 422);
  EXPECT_EQ(api::exit_code(ErrorCode::eval_failed), 3);
  EXPECT_EQ(api::exit_code(ErrorCode::unknown_program), 2);
  const auto doc = api::ApiError{ErrorCode::invalid_params, "msg", nullptr}.to_json();
  EXPECT_EQ(doc["code"], "invalid_params");
  EXPECT_EQ(doc["message"], "msg");
}

TEST(Api, MeshJsonIsFlat) {
  const auto box = geom::make_box(geom::Vec3(0, 0, 0), geom::Vec3(1, 2, 3), "body");
  const auto doc = api::mesh_to_json(box);
  EXPECT_EQ(doc["vertices"].size(), 3 * box.vertex_count());
  EXPECT_EQ(doc["faces"].size(), 3 * box.face_count());
  EXPECT_EQ(doc["face_part"].size(), box.face_count());
  EXPECT_EQ(doc["parts"], nlohmann::json::array({"body"}));
}
