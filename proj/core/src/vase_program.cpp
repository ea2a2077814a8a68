#include <optional>

#include "geocode/graph_builder.hpp"
#include "geocode/programs.hpp"

namespace geocode::programs {

using geom::Vec3;
using graph::GraphBuilder;
using graph::MeshH;
using graph::Num;
using graph::ProfileH;
using graph::ScaleH;
using params::ParameterSpec;

namespace {

ParameterSpec cont(std::string name, double min, double max, int granularity, int default_index, std::string part) {
  return ParameterSpec::continuous(std::move(name), min, max, granularity,
                                   params::grid_value(min, max, granularity, default_index), std::move(part));
}

}  // namespace

std::shared_ptr<const params::ParameterSchema> vase_schema() {
  static const auto schema = [] {
    std::vector<ParameterSpec> specs{
        cont("body_height", 0.20, 0.45, 5, 2, "body"),
        cont("base_radius", 0.05, 0.12, 4, 1, "body").describe("body radius at the bottom"),
        cont("belly_radius", 0.08, 0.16, 5, 2, "body"),
        cont("neck_radius", 0.03, 0.10, 4, 1, "body"),
        cont("belly_position", 0.3, 0.7, 5, 2, "body").describe("height fraction of the widest section"),
        cont("body_roundness", 0.0, 1.0, 5, 4, "body").describe("0 square section, 1 circular section"),
        ParameterSpec::discrete("handle_count", 0, 4, 0, "handle"),
        cont("handle_attach_low", 0.15, 0.45, 4, 1, "handle").invisible(),
        cont("handle_attach_high", 0.55, 0.9, 4, 2, "handle").invisible(),
        cont("handle_thickness", 0.01, 0.025, 4, 1, "handle").invisible(),
        cont("base_thickness", 0.01, 0.03, 3, 1, "base"),
    };
    std::vector<params::VisibilityRule> rules{
        {"handle_count", params::CompareOp::lt, 1.0, {"handle_attach_low", "handle_attach_high", "handle_thickness"}},
    };
    return std::make_shared<const params::ParameterSchema>("vase", std::move(specs), std::move(rules));
  }();
  return schema;
}

const std::vector<std::string>& vase_parts() {
  static const std::vector<std::string> parts{"body", "base", "handle"};
  return parts;
}

graph::ProgramGraph build_vase() {
  GraphBuilder b(vase_schema());
  const Num zero = b.number(0.0);
  const Num one = b.number(1.0);

  const Num h = b.param("body_height");
  const Num r_base = b.param("base_radius");
  const Num r_belly = b.param("belly_radius");
  const Num r_neck = b.param("neck_radius");
  const Num belly_at = b.param("belly_position");
  const Num roundness = b.param("body_roundness");
  const Num count = b.param("handle_count");
  const Num t_low = b.param("handle_attach_low");
  const Num t_high = b.param("handle_attach_high");
  const Num thick = b.param("handle_thickness");
  const Num bt = b.param("base_thickness");

  // Unit section scaled to the radius along the body.
  const ProfileH section = b.profile(roundness, one, one);

  const Num base_r = r_base * 1.05;
  const MeshH base = b.sweep(section, b.line(b.vec(zero, zero, zero), b.vec(zero, zero, bt)),
                             b.scale_fn(false, {{zero, base_r}, {one, base_r}}), "base");

  const Num z0 = bt * 0.5;
  const Num body_len = bt * 0.5 + h;
  const ScaleH radius = b.scale_fn(true, {{zero, r_base}, {belly_at, r_belly}, {one, r_neck}});
  const MeshH body = b.sweep(section, b.line(b.vec(zero, zero, z0), b.vec(zero, zero, bt + h)), radius, "body");

  // Handle in the xz plane: starts and ends inside the wall, bulges past the
  // widest section.
  auto radius_at = [&](Num t) { return b.sample_scale(radius, t); };
  const Num z_low = z0 + t_low * body_len;
  const Num z_high = z0 + t_high * body_len;
  const Num widest = b.max(r_base, b.max(r_belly, r_neck));
  const Num out = widest + (z_high - z_low) * 0.3;
  const Num inner_low = radius_at(t_low) * 0.8;
  const Num inner_high = radius_at(t_high) * 0.8;
  const auto path = b.curve({"cubic"}, {b.vec(inner_low, zero, z_low), b.vec(out, zero, z_low),
                                        b.vec(out, zero, z_high), b.vec(inner_high, zero, z_high)});
  const Num half = thick * 0.5;
  const MeshH handle = b.sweep(b.profile(one, half, half), path, std::nullopt, "handle");
  const MeshH handles = b.gate(b.ge(count, one), b.rotate_replicate(handle, b.max(count, one), Vec3::Zero(), Vec3::UnitZ()));

  return b.build(b.join({base, body, handles}));
}

}  // namespace geocode::programs
