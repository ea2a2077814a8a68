#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geocode/program_graph.hpp"

namespace geocode::graph {

class GraphBuilder;

/// Typed handle to a node's output while a graph is being assembled.
template <ValueType T>
struct Handle {
  GraphBuilder* builder = nullptr;
  std::string id;
};

using Num = Handle<ValueType::number>;
using V3 = Handle<ValueType::vec3>;
using PathH = Handle<ValueType::path>;
using ProfileH = Handle<ValueType::profile>;
using FrameH = Handle<ValueType::frame>;
using MeshH = Handle<ValueType::mesh>;
using ScaleH = Handle<ValueType::scale>;

/// Assembles a ProgramGraph with readable, typed calls. build() prunes nodes
/// that do not reach the output and validates the result.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::shared_ptr<const params::ParameterSchema> schema);

  /// Generic node insertion; returns the new id.
  std::string add(std::string_view kind, nlohmann::json attrs,
                  std::initializer_list<std::pair<std::string_view, std::string_view>> inputs);
  void connect(std::string_view source, std::string_view target, std::string_view port);

  Num number(double x);
  V3 vec(double x, double y, double z);
  V3 vec(Num x, Num y, Num z);
  Num param(std::string_view name);

  Num math(std::string_view op, Num a);
  Num math(std::string_view op, Num a, Num b);
  Num lerp(Num a, Num b, Num t);
  Num clamp(Num a, Num lo, Num hi);
  Num min(Num a, Num b) { return math("min", a, b); }
  Num max(Num a, Num b) { return math("max", a, b); }
  /// 1 when a >= b, else 0.
  Num ge(Num a, Num b) { return math("ge", a, b); }
  Num eq(Num a, Num b) { return math("eq", a, b); }
  Num logical_not(Num a) { return math("not", a); }

  Num x(V3 v);
  Num y(V3 v);
  Num z(V3 v);
  V3 add(V3 a, V3 b);
  V3 sub(V3 a, V3 b);
  V3 scale(V3 a, Num s);
  V3 origin(FrameH f);
  V3 tangent(FrameH f);
  V3 normal(FrameH f);
  V3 binormal(FrameH f);

  /// segments: "line" (one more point) or "cubic" (three more points).
  PathH curve(const std::vector<std::string>& segments, const std::vector<V3>& points);
  PathH line(V3 a, V3 b) { return curve({"line"}, {a, b}); }
  ProfileH profile(Num roundness, Num half_width, Num half_depth);
  FrameH sample(PathH path, Num t);
  V3 sample_profile(ProfileH profile, Num t);
  ScaleH scale_fn(bool smooth, const std::vector<std::pair<Num, Num>>& knots);
  Num sample_scale(ScaleH scale, Num t);
  FrameH frame(V3 origin, V3 x_axis, V3 y_hint);

  MeshH sweep(ProfileH profile, PathH path, std::optional<ScaleH> scale, std::string_view part,
              int profile_samples = geom::kDefaultProfileSamples, int path_samples = geom::kDefaultPathSamples);
  MeshH attach(MeshH element, std::optional<FrameH> anchor, FrameH target, std::optional<Num> fit_width);
  MeshH mirror(MeshH m, const geom::Vec3& point, const geom::Vec3& normal);
  MeshH rotate_replicate(MeshH m, Num count, const geom::Vec3& point, const geom::Vec3& axis);
  MeshH join(const std::vector<MeshH>& parts);
  /// The mesh when gate > 0.5, otherwise an empty mesh.
  MeshH gate(Num gate, MeshH m);
  MeshH tag(MeshH m, std::string_view part);
  MeshH box(const geom::Vec3& min, const geom::Vec3& max, std::string_view part);

  /// Adds the output node. Throws ValidationError if the result is invalid.
  ProgramGraph build(MeshH output);

  const params::ParameterSchema& schema() const { return *schema_; }

 private:
  std::string fresh_id(std::string_view kind);

  std::shared_ptr<const params::ParameterSchema> schema_;
  ProgramGraph graph_;
  std::size_t counter_ = 0;
  std::map<std::string, std::string, std::less<>> param_nodes_;
  std::map<std::uint64_t, std::string> number_nodes_;
};

// Arithmetic sugar over number and vector handles.
Num operator+(Num a, Num b);
Num operator-(Num a, Num b);
Num operator*(Num a, Num b);
Num operator/(Num a, Num b);
Num operator+(Num a, double b);
Num operator-(Num a, double b);
Num operator*(Num a, double b);
Num operator/(Num a, double b);
Num operator+(double a, Num b);
Num operator-(double a, Num b);
Num operator*(double a, Num b);
Num operator-(Num a);
V3 operator+(V3 a, V3 b);
V3 operator-(V3 a, V3 b);
V3 operator*(V3 a, Num s);
V3 operator*(Num s, V3 a);

}  // namespace geocode::graph
