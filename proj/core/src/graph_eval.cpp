#include <cmath>
#include <unordered_map>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "geocode/error.hpp"
#include "geocode/program_graph.hpp"

namespace geocode::graph {

using geom::Frame;
using geom::LabeledMesh;
using geom::PathCurve;
using geom::ProfileCurve;
using geom::ScaleFunction;
using geom::Vec3;
using nlohmann::json;

namespace {

Vec3 vec_attr(const json& a) { return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}; }

double numeric(const params::ParamValue& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return 0.0;
}

/// Inputs of one node, looked up by port name.
class Inputs {
 public:
  Inputs(const std::vector<std::pair<std::string, const Value*>>& ports) : ports_(ports) {}

  const Value* find(std::string_view port) const {
    for (const auto& [name, v] : ports_)
      if (name == port) return v;
    return nullptr;
  }
  template <class T>
  const T& get(std::string_view port) const {
    const Value* v = find(port);
    if (!v) throw GeometryError(fmt::format("port '{}' is not connected", port));
    return std::get<T>(*v);
  }
  double num(std::string_view port) const { return get<double>(port); }
  const Vec3& vec(std::string_view port) const { return get<Vec3>(port); }
  const LabeledMesh& mesh(std::string_view port) const { return get<LabeledMesh>(port); }

 private:
  const std::vector<std::pair<std::string, const Value*>>& ports_;
};

double eval_math(const std::string& op, const Inputs& in) {
  const double a = in.num("a");
  if (op == "neg") return -a;
  if (op == "abs") return std::abs(a);
  if (op == "sqrt") {
    if (a < 0.0) throw GeometryError("sqrt of a negative number");
    return std::sqrt(a);
  }
  if (op == "sin") return std::sin(a);
  if (op == "cos") return std::cos(a);
  if (op == "floor") return std::floor(a);
  if (op == "not") return a > 0.5 ? 0.0 : 1.0;
  if (op == "clamp") return std::clamp(a, in.num("lo"), in.num("hi"));
  const double b = in.num("b");
  if (op == "add") return a + b;
  if (op == "sub") return a - b;
  if (op == "mul") return a * b;
  if (op == "div") {
    if (b == 0.0) throw GeometryError("division by zero");
    return a / b;
  }
  if (op == "min") return std::min(a, b);
  if (op == "max") return std::max(a, b);
  if (op == "ge") return a >= b ? 1.0 : 0.0;
  if (op == "gt") return a > b ? 1.0 : 0.0;
  if (op == "le") return a <= b ? 1.0 : 0.0;
  if (op == "lt") return a < b ? 1.0 : 0.0;
  if (op == "eq") return a == b ? 1.0 : 0.0;
  if (op == "ne") return a != b ? 1.0 : 0.0;
  if (op == "and") return (a > 0.5 && b > 0.5) ? 1.0 : 0.0;
  if (op == "or") return (a > 0.5 || b > 0.5) ? 1.0 : 0.0;
  if (op == "lerp") return a + in.num("t") * (b - a);
  throw GeometryError("unknown math op " + op);
}

Value eval_vector(const std::string& op, const Inputs& in) {
  if (op == "make") return Vec3(in.num("x"), in.num("y"), in.num("z"));
  if (op == "origin") return in.get<Frame>("f").origin;
  if (op == "tangent") return in.get<Frame>("f").tangent;
  if (op == "normal") return in.get<Frame>("f").normal;
  if (op == "binormal") return in.get<Frame>("f").binormal;
  const Vec3& a = in.vec("a");
  if (op == "x") return a.x();
  if (op == "y") return a.y();
  if (op == "z") return a.z();
  if (op == "length") return a.norm();
  if (op == "normalize") {
    const double len = a.norm();
    if (!(len > 1e-15)) throw GeometryError("cannot normalize a zero vector");
    return Vec3(a / len);
  }
  if (op == "scale") return Vec3(a * in.num("s"));
  const Vec3& b = in.vec("b");
  if (op == "add") return Vec3(a + b);
  if (op == "sub") return Vec3(a - b);
  if (op == "cross") return Vec3(a.cross(b));
  if (op == "dot") return a.dot(b);
  if (op == "lerp") return Vec3(a + in.num("t") * (b - a));
  throw GeometryError("unknown vector op " + op);
}

Value eval_node(const Node& n, const Inputs& in, const params::ParameterVector& v,
                const params::ParameterSchema& schema) {
  const auto& k = n.kind;
  const auto& at = n.attrs;
  if (k == "constant") {
    if (at.contains("number")) return at["number"].get<double>();
    if (at.contains("vec3")) return vec_attr(at["vec3"]);
    const auto& b = at["box"];
    return geom::make_box(vec_attr(b["min"]), vec_attr(b["max"]), b.value("part", std::string("box")));
  }
  if (k == "parameter") {
    const auto i = schema.require(at["name"].get<std::string>());
    const auto& value = v.values[i];
    // Labeled entries cannot reach the geometry: they read as the default.
    return numeric(params::is_hidden(value) ? schema.spec(i).default_value : value);
  }
  if (k == "math") return eval_math(at["op"].get<std::string>(), in);
  if (k == "vector") return eval_vector(at["op"].get<std::string>(), in);
  if (k == "curve") {
    std::vector<geom::BezierSegment> segs;
    std::size_t p = 0;
    auto pt = [&](std::size_t i) { return in.vec("p" + std::to_string(i)); };
    for (const auto& s : at["segments"]) {
      if (s == "line") {
        segs.push_back(geom::BezierSegment::line(pt(p), pt(p + 1)));
        p += 1;
      } else {
        segs.push_back({{pt(p), pt(p + 1), pt(p + 2), pt(p + 3)}});
        p += 3;
      }
    }
    return PathCurve(std::move(segs));
  }
  if (k == "profile") {
    ProfileCurve c{in.num("roundness"), in.num("half_width"), in.num("half_depth")};
    c.check();
    return c;
  }
  if (k == "sample-curve") {
    const double t = in.num("t");
    if (!(t >= 0.0 && t <= 1.0)) throw GeometryError(fmt::format("attachment position {} outside [0, 1]", t));
    return in.get<PathCurve>("path").frame_at(t);
  }
  if (k == "sample-profile") {
    const auto q = in.get<ProfileCurve>("profile").eval(in.num("t"));
    return Vec3(q.x(), q.y(), 0.0);
  }
  if (k == "scale") {
    const auto count = at["knots"].get<int>();
    std::vector<geom::Vec2> knots;
    for (int i = 0; i < count; ++i)
      knots.emplace_back(in.num("t" + std::to_string(i)), in.num("s" + std::to_string(i)));
    return ScaleFunction(at["mode"] == "smooth" ? ScaleFunction::Mode::smooth : ScaleFunction::Mode::linear,
                         std::move(knots));
  }
  if (k == "scale-sample") return in.get<ScaleFunction>("scale")(in.num("t"));
  if (k == "frame-builder") return Frame::from_axes(in.vec("origin"), in.vec("x_axis"), in.vec("y_hint"));
  if (k == "sweep") {
    const Value* s = in.find("scale");
    return geom::sweep(in.get<ProfileCurve>("profile"), in.get<PathCurve>("path"),
                       s ? std::get<ScaleFunction>(*s) : ScaleFunction::constant(1.0),
                       at.value("profile_samples", geom::kDefaultProfileSamples),
                       at.value("path_samples", geom::kDefaultPathSamples), at["part"].get<std::string>());
  }
  if (k == "attach") {
    const auto& element = in.mesh("element");
    if (element.empty()) return element;
    const Value* anchor = in.find("anchor");
    std::optional<double> width;
    if (at.value("fit", false)) width = in.num("width");
    return geom::attach(element, anchor ? std::get<Frame>(*anchor) : Frame::identity(), in.get<Frame>("target"),
                        width);
  }
  if (k == "mirror") return geom::mirror(in.mesh("mesh"), vec_attr(at["point"]), vec_attr(at["normal"]));
  if (k == "rotate-replicate") {
    const double c = in.num("count");
    if (!(std::abs(c - std::round(c)) < 1e-9)) throw GeometryError(fmt::format("replicate count {} is not integral", c));
    return geom::rotational_replicate(in.mesh("mesh"), vec_attr(at["point"]), vec_attr(at["axis"]),
                                      static_cast<int>(std::lround(c)));
  }
  if (k == "join") {
    const auto count = at["inputs"].get<int>();
    std::vector<LabeledMesh> parts;
    parts.reserve(count);
    for (int i = 0; i < count; ++i) parts.push_back(in.mesh("in" + std::to_string(i)));
    return geom::join(parts);
  }
  if (k == "switch") return in.num("gate") > 0.5 ? in.mesh("mesh") : LabeledMesh{};
  if (k == "part-tag") return geom::tag_part(in.mesh("mesh"), at["part"].get<std::string>());
  if (k == "output") return in.mesh("mesh");
  throw GeometryError("unknown node kind " + k);
}

}  // namespace

LabeledMesh ProgramGraph::evaluate(const params::ParameterVector& v, EvalStats* stats) const {
  const auto rep = validate();
  if (!rep.ok()) throw ValidationError("graph", rep.summary());
  params::validate(v, *schema_);
  const auto canonical = params::canonicalize(v, *schema_);

  const auto order = topo_order();
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < order.size(); ++i) slot.emplace(order[i], i);
  std::vector<const Node*> node_at(order.size());
  for (const auto& n : nodes_) node_at[slot.at(n.id)] = &n;
  std::vector<std::vector<std::pair<std::string, std::size_t>>> sources(order.size());
  for (const auto& e : edges_) sources[slot.at(e.target)].emplace_back(e.port, slot.at(e.source));

  std::vector<Value> results(order.size());
  std::vector<std::pair<std::string, const Value*>> ports;
  std::size_t evaluated = 0;
  std::size_t output_slot = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = *node_at[i];
    ports.clear();
    for (const auto& [port, src] : sources[i]) ports.emplace_back(port, &results[src]);
    try {
      results[i] = eval_node(n, Inputs(ports), canonical, *schema_);
    } catch (const EvalError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvalError(n.id, e.what());
    }
    ++evaluated;
    if (n.kind == "output") output_slot = i;
  }
  if (stats) stats->nodes_evaluated = evaluated;
  auto mesh = std::get<LabeledMesh>(std::move(results[output_slot]));
  return mesh;
}

}  // namespace geocode::graph
