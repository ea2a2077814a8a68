#include <optional>

#include "geocode/graph_builder.hpp"
#include "geocode/programs.hpp"

namespace geocode::programs {

using geom::Vec3;
using graph::FrameH;
using graph::GraphBuilder;
using graph::MeshH;
using graph::Num;
using graph::PathH;
using graph::ProfileH;
using graph::V3;
using params::ParameterSpec;

namespace {

ParameterSpec cont(std::string name, double min, double max, int granularity, int default_index, std::string part) {
  return ParameterSpec::continuous(std::move(name), min, max, granularity,
                                   params::grid_value(min, max, granularity, default_index), std::move(part));
}

}  // namespace

std::shared_ptr<const params::ParameterSchema> chair_schema() {
  static const auto schema = [] {
    std::vector<ParameterSpec> specs{
        cont("seat_width", 0.40, 0.60, 5, 2, "seat").describe("seat extent along x"),
        cont("seat_depth", 0.38, 0.55, 5, 2, "seat").describe("seat extent along y"),
        cont("seat_thickness", 0.03, 0.07, 5, 2, "seat"),
        cont("seat_height", 0.40, 0.55, 4, 1, "seat").describe("height of the seat top above the ground"),
        cont("seat_roundness", 0.0, 1.0, 5, 1, "seat").describe("0 rectangular seat, 1 elliptic seat"),
        cont("leg_thickness", 0.025, 0.06, 4, 1, "leg").invisible(),
        cont("leg_bottom_scale", 0.7, 1.6, 4, 1, "leg").invisible().describe("leg cross-section scale at the floor"),
        cont("frame_width", 0.02, 0.05, 4, 1, "frame").describe("edge length of the square back posts"),
        cont("frame_height", 0.35, 0.60, 5, 2, "frame").describe("backrest height above the seat"),
        cont("backrest_slant", 0.0, 0.35, 5, 1, "frame").describe("backward offset per unit of frame height"),
        cont("backrest_curvature", 0.0, 1.0, 5, 1, "frame"),
        cont("top_rail_thickness", 0.03, 0.10, 4, 1, "top_rail"),
        ParameterSpec::discrete("cross_rail_count", 0, 4, 2, "cross_rail"),
        ParameterSpec::discrete("vertical_rail_count", 0, 6, 3, "vertical_rail"),
        ParameterSpec::boolean("armrests_exist", true, "armrest"),
        cont("armrest_height", 0.3, 0.8, 5, 2, "armrest").invisible().describe("fraction of the backrest height"),
        cont("armrest_thickness", 0.02, 0.05, 4, 1, "armrest").invisible(),
        ParameterSpec::boolean("is_swivel", false, "leg").describe("single column with five feet instead of legs"),
    };
    std::vector<params::VisibilityRule> rules{
        {"armrests_exist", params::CompareOp::eq, 0.0, {"armrest_height", "armrest_thickness"}},
        {"is_swivel", params::CompareOp::eq, 1.0, {"leg_thickness", "leg_bottom_scale"}},
    };
    return std::make_shared<const params::ParameterSchema>("chair", std::move(specs), std::move(rules));
  }();
  return schema;
}

const std::vector<std::string>& chair_parts() {
  static const std::vector<std::string> parts{"seat",       "leg",           "frame",  "top_rail",
                                              "cross_rail", "vertical_rail", "armrest"};
  return parts;
}

graph::ProgramGraph build_chair() {
  GraphBuilder b(chair_schema());
  const Num zero = b.number(0.0);
  const Num one = b.number(1.0);
  const Vec3 origin = Vec3::Zero();

  const Num W = b.param("seat_width");
  const Num D = b.param("seat_depth");
  const Num T = b.param("seat_thickness");
  const Num H = b.param("seat_height");
  const Num R = b.param("seat_roundness");
  const Num leg_t = b.param("leg_thickness");
  const Num leg_s = b.param("leg_bottom_scale");
  const Num w = b.param("frame_width");
  const Num FH = b.param("frame_height");
  const Num slant = b.param("backrest_slant");
  const Num curv = b.param("backrest_curvature");
  const Num rail_t = b.param("top_rail_thickness");
  const Num n_cross = b.param("cross_rail_count");
  const Num n_vert = b.param("vertical_rail_count");
  const Num arms = b.param("armrests_exist");
  const Num arm_h = b.param("armrest_height");
  const Num arm_t = b.param("armrest_thickness");
  const Num swivel = b.param("is_swivel");

  // Seat: the seat profile pushed up through its thickness.
  const ProfileH seat_profile = b.profile(R, W * 0.5, D * 0.5);
  const Num mid_z = H - T * 0.5;
  const MeshH seat = b.sweep(seat_profile, b.line(b.vec(zero, zero, H - T), b.vec(zero, zero, H)), std::nullopt, "seat");

  // Anchor on the seat rim at 45 degrees; legs and posts hang off it.
  const V3 rim = b.sample_profile(seat_profile, b.number(0.125));
  const Num px = b.x(rim);
  const Num py = b.y(rim);

  // Legs (right back leg, mirrored to the front), thicker toward the floor.
  const Num lx = px - leg_t * 0.5;
  const Num ly = py - leg_t * 0.5;
  const PathH leg_path = b.line(b.vec(lx, ly, mid_z), b.vec(lx, ly, zero));
  const ProfileH leg_profile = b.profile(zero, leg_t * 0.5, leg_t * 0.5);
  const MeshH leg = b.sweep(leg_profile, leg_path, b.scale_fn(false, {{zero, one}, {one, leg_s}}), "leg");
  const MeshH legs = b.gate(b.logical_not(swivel), b.mirror(leg, origin, Vec3::UnitY()));

  // Back post: a stub buried in the seat, then a cubic rising by the frame
  // height, slanting back and bowing with the curvature.
  const Num fx = px - w * 0.5;
  const Num fy = py - w * 0.5;
  const Num back = slant * FH;
  const Num bow = curv * FH * 0.15;
  const Num z1 = H + FH / 3.0;
  const Num z2 = H + FH * (2.0 / 3.0);
  const Num z3 = H + FH;
  const Num y2 = fy + back + bow;
  const Num y3 = fy + back;
  const PathH post_full = b.curve({"line", "cubic"}, {b.vec(fx, fy, mid_z), b.vec(fx, fy, H), b.vec(fx, fy, z1),
                                                      b.vec(fx, y2, z2), b.vec(fx, y3, z3)});
  const PathH post_upper =
      b.curve({"cubic"}, {b.vec(fx, fy, H), b.vec(fx, fy, z1), b.vec(fx, y2, z2), b.vec(fx, y3, z3)});
  const MeshH post = b.sweep(b.profile(zero, w * 0.5, w * 0.5), post_full, std::nullopt, "frame");

  // Armrest: forward from the post, then down onto the seat above the front leg.
  const FrameH arm_frame = b.sample(post_upper, arm_h);
  const V3 arm_o = b.origin(arm_frame);
  const Num az = b.z(arm_o);
  const Num bend = (az - H) * 0.5;
  const Num by = fy * -0.5;
  const Num front = -fy;
  const Num k = b.number(0.552);
  const PathH arm_path = b.curve(
      {"line", "cubic", "line"},
      {b.vec(fx, b.y(arm_o), az), b.vec(fx, by, az), b.vec(fx, by + (front - by) * k, az),
       b.vec(fx, front, az - bend + bend * k), b.vec(fx, front, az - bend), b.vec(fx, front, mid_z)});
  const Num arm_half = arm_t * 0.5;
  const MeshH armrest = b.gate(arms, b.sweep(b.profile(b.number(0.5), arm_half, arm_half), arm_path, std::nullopt, "armrest"));

  const MeshH right = b.join({legs, post, armrest});
  const MeshH sides = b.mirror(right, origin, Vec3::UnitX());

  // Rails are unit-length sweeps along x, fitted between the post centerlines.
  const PathH unit = b.line(b.vec(-0.5, 0.0, 0.0), b.vec(0.5, 0.0, 0.0));
  const V3 x_axis = b.vec(1.0, 0.0, 0.0);
  const Num span = fx * 2.0;
  auto rail_target = [&](FrameH f) {
    const V3 o = b.origin(f);
    return b.frame(b.vec(zero, b.y(o), b.z(o)), x_axis, b.binormal(f));
  };

  const MeshH top_rail_element = b.sweep(b.profile(zero, w * 0.5, rail_t * 0.5), unit, std::nullopt, "top_rail");
  const MeshH top_rail = b.attach(top_rail_element, std::nullopt, rail_target(b.sample(post_upper, one)), span);

  std::vector<MeshH> pieces{seat, sides, top_rail};

  const Num cross_half = w * 0.3;
  const MeshH cross_element = b.sweep(b.profile(zero, cross_half, cross_half), unit, std::nullopt, "cross_rail");
  for (int j = 1; j <= 4; ++j) {
    const Num t = b.clamp(b.number(j) / (n_cross + 1.0), zero, one);
    const MeshH rail = b.attach(cross_element, std::nullopt, rail_target(b.sample(post_upper, t)), span);
    pieces.push_back(b.gate(b.ge(n_cross, b.number(j)), rail));
  }

  const ProfileH vert_profile = b.profile(zero, w * 0.25, w * 0.25);
  for (int k_slot = 1; k_slot <= 6; ++k_slot) {
    const Num xk = fx * (b.number(2.0 * k_slot) / (n_vert + 1.0) - 1.0);
    const PathH path = b.curve({"cubic"}, {b.vec(xk, fy, H), b.vec(xk, fy, z1), b.vec(xk, y2, z2), b.vec(xk, y3, z3)});
    const MeshH rail = b.sweep(vert_profile, path, std::nullopt, "vertical_rail");
    pieces.push_back(b.gate(b.ge(n_vert, b.number(k_slot)), rail));
  }

  // Swivel base: a round column and five feet starting along +y.
  const Num hub_z = b.number(0.06);
  const MeshH column = b.sweep(b.profile(one, b.number(0.03), b.number(0.03)),
                               b.line(b.vec(zero, zero, mid_z), b.vec(zero, zero, hub_z)), std::nullopt, "leg");
  const MeshH foot = b.sweep(b.profile(b.number(0.5), b.number(0.02), b.number(0.015)),
                             b.line(b.vec(zero, zero, hub_z), b.vec(0.0, 0.30, 0.015)), std::nullopt, "leg");
  const MeshH feet = b.rotate_replicate(foot, b.number(5.0), origin, Vec3::UnitZ());
  pieces.push_back(b.gate(swivel, b.join({column, feet})));

  return b.build(b.join(pieces));
}

}  // namespace geocode::programs
