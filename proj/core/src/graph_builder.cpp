#include "geocode/graph_builder.hpp"

#include <bit>
#include <set>

#include <fmt/format.h>

#include "geocode/error.hpp"

namespace geocode::graph {

using nlohmann::json;

namespace {

json vec_json(const geom::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

GraphBuilder::GraphBuilder(std::shared_ptr<const params::ParameterSchema> schema)
    : schema_(schema), graph_(std::move(schema)) {}

std::string GraphBuilder::fresh_id(std::string_view kind) { return fmt::format("{}_{:04d}", kind, counter_++); }

std::string GraphBuilder::add(std::string_view kind, json attrs,
                              std::initializer_list<std::pair<std::string_view, std::string_view>> inputs) {
  auto id = fresh_id(kind);
  graph_.add_node({id, std::string(kind), std::move(attrs)});
  for (const auto& [port, source] : inputs) connect(source, id, port);
  return id;
}

void GraphBuilder::connect(std::string_view source, std::string_view target, std::string_view port) {
  graph_.add_edge({std::string(source), std::string(target), std::string(port)});
}

Num GraphBuilder::number(double x) {
  const auto key = std::bit_cast<std::uint64_t>(x);
  auto it = number_nodes_.find(key);
  if (it != number_nodes_.end()) return {this, it->second};
  auto id = add("constant", {{"number", x}}, {});
  number_nodes_.emplace(key, id);
  return {this, id};
}

V3 GraphBuilder::vec(double x, double y, double z) {
  return {this, add("constant", {{"vec3", json::array({x, y, z})}}, {})};
}

V3 GraphBuilder::vec(Num x, Num y, Num z) {
  return {this, add("vector", {{"op", "make"}}, {{"x", x.id}, {"y", y.id}, {"z", z.id}})};
}

Num GraphBuilder::param(std::string_view name) {
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) return {this, it->second};
  schema_->require(name);
  std::string id = "param_" + std::string(name);
  graph_.add_node({id, "parameter", {{"name", std::string(name)}}});
  param_nodes_.emplace(std::string(name), id);
  return {this, id};
}

Num GraphBuilder::math(std::string_view op, Num a) { return {this, add("math", {{"op", op}}, {{"a", a.id}})}; }

Num GraphBuilder::math(std::string_view op, Num a, Num b) {
  return {this, add("math", {{"op", op}}, {{"a", a.id}, {"b", b.id}})};
}

Num GraphBuilder::lerp(Num a, Num b, Num t) {
  return {this, add("math", {{"op", "lerp"}}, {{"a", a.id}, {"b", b.id}, {"t", t.id}})};
}

Num GraphBuilder::clamp(Num a, Num lo, Num hi) {
  return {this, add("math", {{"op", "clamp"}}, {{"a", a.id}, {"lo", lo.id}, {"hi", hi.id}})};
}

Num GraphBuilder::x(V3 v) { return {this, add("vector", {{"op", "x"}}, {{"a", v.id}})}; }
Num GraphBuilder::y(V3 v) { return {this, add("vector", {{"op", "y"}}, {{"a", v.id}})}; }
Num GraphBuilder::z(V3 v) { return {this, add("vector", {{"op", "z"}}, {{"a", v.id}})}; }

V3 GraphBuilder::add(V3 a, V3 b) { return {this, add("vector", {{"op", "add"}}, {{"a", a.id}, {"b", b.id}})}; }
V3 GraphBuilder::sub(V3 a, V3 b) { return {this, add("vector", {{"op", "sub"}}, {{"a", a.id}, {"b", b.id}})}; }
V3 GraphBuilder::scale(V3 a, Num s) {
  return {this, add("vector", {{"op", "scale"}}, {{"a", a.id}, {"s", s.id}})};
}
V3 GraphBuilder::origin(FrameH f) { return {this, add("vector", {{"op", "origin"}}, {{"f", f.id}})}; }
V3 GraphBuilder::tangent(FrameH f) { return {this, add("vector", {{"op", "tangent"}}, {{"f", f.id}})}; }
V3 GraphBuilder::normal(FrameH f) { return {this, add("vector", {{"op", "normal"}}, {{"f", f.id}})}; }
V3 GraphBuilder::binormal(FrameH f) { return {this, add("vector", {{"op", "binormal"}}, {{"f", f.id}})}; }

PathH GraphBuilder::curve(const std::vector<std::string>& segments, const std::vector<V3>& points) {
  auto id = add("curve", {{"segments", segments}}, {});
  for (std::size_t i = 0; i < points.size(); ++i) connect(points[i].id, id, "p" + std::to_string(i));
  return {this, id};
}

ProfileH GraphBuilder::profile(Num roundness, Num half_width, Num half_depth) {
  return {this, add("profile", json::object(),
                    {{"roundness", roundness.id}, {"half_width", half_width.id}, {"half_depth", half_depth.id}})};
}

FrameH GraphBuilder::sample(PathH path, Num t) {
  return {this, add("sample-curve", json::object(), {{"path", path.id}, {"t", t.id}})};
}

V3 GraphBuilder::sample_profile(ProfileH profile, Num t) {
  return {this, add("sample-profile", json::object(), {{"profile", profile.id}, {"t", t.id}})};
}

ScaleH GraphBuilder::scale_fn(bool smooth, const std::vector<std::pair<Num, Num>>& knots) {
  auto id = add("scale", {{"mode", smooth ? "smooth" : "linear"}, {"knots", knots.size()}}, {});
  for (std::size_t i = 0; i < knots.size(); ++i) {
    connect(knots[i].first.id, id, "t" + std::to_string(i));
    connect(knots[i].second.id, id, "s" + std::to_string(i));
  }
  return {this, id};
}

Num GraphBuilder::sample_scale(ScaleH scale, Num t) {
  return {this, add("scale-sample", json::object(), {{"scale", scale.id}, {"t", t.id}})};
}

FrameH GraphBuilder::frame(V3 origin, V3 x_axis, V3 y_hint) {
  return {this, add("frame-builder", json::object(),
                    {{"origin", origin.id}, {"x_axis", x_axis.id}, {"y_hint", y_hint.id}})};
}

MeshH GraphBuilder::sweep(ProfileH profile, PathH path, std::optional<ScaleH> scale, std::string_view part,
                          int profile_samples, int path_samples) {
  json attrs{{"part", part}};
  if (profile_samples != geom::kDefaultProfileSamples) attrs["profile_samples"] = profile_samples;
  if (path_samples != geom::kDefaultPathSamples) attrs["path_samples"] = path_samples;
  auto id = add("sweep", std::move(attrs), {{"profile", profile.id}, {"path", path.id}});
  if (scale) connect(scale->id, id, "scale");
  return {this, id};
}

MeshH GraphBuilder::attach(MeshH element, std::optional<FrameH> anchor, FrameH target, std::optional<Num> fit_width) {
  auto id = add("attach", {{"fit", fit_width.has_value()}}, {{"element", element.id}, {"target", target.id}});
  if (anchor) connect(anchor->id, id, "anchor");
  if (fit_width) connect(fit_width->id, id, "width");
  return {this, id};
}

MeshH GraphBuilder::mirror(MeshH m, const geom::Vec3& point, const geom::Vec3& normal) {
  return {this, add("mirror", {{"point", vec_json(point)}, {"normal", vec_json(normal)}}, {{"mesh", m.id}})};
}

MeshH GraphBuilder::rotate_replicate(MeshH m, Num count, const geom::Vec3& point, const geom::Vec3& axis) {
  return {this, add("rotate-replicate", {{"point", vec_json(point)}, {"axis", vec_json(axis)}},
                    {{"mesh", m.id}, {"count", count.id}})};
}

MeshH GraphBuilder::join(const std::vector<MeshH>& parts) {
  auto id = add("join", {{"inputs", parts.size()}}, {});
  for (std::size_t i = 0; i < parts.size(); ++i) connect(parts[i].id, id, "in" + std::to_string(i));
  return {this, id};
}

MeshH GraphBuilder::gate(Num gate, MeshH m) {
  return {this, add("switch", json::object(), {{"gate", gate.id}, {"mesh", m.id}})};
}

MeshH GraphBuilder::tag(MeshH m, std::string_view part) {
  return {this, add("part-tag", {{"part", part}}, {{"mesh", m.id}})};
}

MeshH GraphBuilder::box(const geom::Vec3& min, const geom::Vec3& max, std::string_view part) {
  return {this, add("constant", {{"box", {{"min", vec_json(min)}, {"max", vec_json(max)}, {"part", part}}}}, {})};
}

ProgramGraph GraphBuilder::build(MeshH output) {
  const auto out_id = add("output", json::object(), {{"mesh", output.id}});

  // Keep only what the output depends on.
  std::map<std::string, std::vector<std::string>> preds;
  for (const auto& e : graph_.edges()) preds[e.target].push_back(e.source);
  std::set<std::string> live{out_id};
  std::vector<std::string> stack{out_id};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    for (const auto& p : preds[id])
      if (live.insert(p).second) stack.push_back(p);
  }
  ProgramGraph g(schema_);
  for (const auto& n : graph_.nodes())
    if (live.count(n.id)) g.add_node(n);
  for (const auto& e : graph_.edges())
    if (live.count(e.target)) g.add_edge(e);

  const auto rep = g.validate();
  if (!rep.ok()) throw ValidationError("graph", rep.summary());
  return g;
}

Num operator+(Num a, Num b) { return a.builder->math("add", a, b); }
Num operator-(Num a, Num b) { return a.builder->math("sub", a, b); }
Num operator*(Num a, Num b) { return a.builder->math("mul", a, b); }
Num operator/(Num a, Num b) { return a.builder->math("div", a, b); }
Num operator+(Num a, double b) { return a + a.builder->number(b); }
Num operator-(Num a, double b) { return a - a.builder->number(b); }
Num operator*(Num a, double b) { return a * a.builder->number(b); }
Num operator/(Num a, double b) { return a / a.builder->number(b); }
Num operator+(double a, Num b) { return b.builder->number(a) + b; }
Num operator-(double a, Num b) { return b.builder->number(a) - b; }
Num operator*(double a, Num b) { return b.builder->number(a) * b; }
Num operator-(Num a) { return a.builder->math("neg", a); }
V3 operator+(V3 a, V3 b) { return a.builder->add(a, b); }
V3 operator-(V3 a, V3 b) { return a.builder->sub(a, b); }
V3 operator*(V3 a, Num s) { return a.builder->scale(a, s); }
V3 operator*(Num s, V3 a) { return a.builder->scale(a, s); }

}  // namespace geocode::graph
