#include "geocode/program_graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "geocode/error.hpp"

namespace geocode::graph {

using nlohmann::json;

std::string_view to_string(ValueType t) noexcept {
  switch (t) {
    case ValueType::number: return "number";
    case ValueType::vec3: return "vec3";
    case ValueType::path: return "path";
    case ValueType::profile: return "profile";
    case ValueType::frame: return "frame";
    case ValueType::mesh: return "mesh";
    case ValueType::scale: return "scale";
  }
  return "?";
}

ValueType type_of(const Value& v) noexcept {
  return std::visit(
      [](const auto& x) -> ValueType {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) return ValueType::number;
        else if constexpr (std::is_same_v<T, geom::Vec3>) return ValueType::vec3;
        else if constexpr (std::is_same_v<T, geom::PathCurve>) return ValueType::path;
        else if constexpr (std::is_same_v<T, geom::ProfileCurve>) return ValueType::profile;
        else if constexpr (std::is_same_v<T, geom::Frame>) return ValueType::frame;
        else if constexpr (std::is_same_v<T, geom::LabeledMesh>) return ValueType::mesh;
        else return ValueType::scale;
      },
      v);
}

const std::vector<std::string>& node_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> k{"attach",       "constant",      "curve",     "frame-builder",  "join",
                               "math",         "mirror",        "output",    "parameter",      "part-tag",
                               "profile",      "rotate-replicate", "sample-curve", "sample-profile", "scale",
                               "scale-sample", "sweep",         "switch",    "vector"};
    std::sort(k.begin(), k.end());
    return k;
  }();
  return kinds;
}

namespace {

using VT = ValueType;

[[noreturn]] void bad_attr(const Node& n, const std::string& msg) { throw ValidationError(n.id, msg); }

const json& attr(const Node& n, const char* key) {
  if (!n.attrs.is_object() || !n.attrs.contains(key)) bad_attr(n, fmt::format("missing attribute '{}'", key));
  return n.attrs.at(key);
}

std::string attr_string(const Node& n, const char* key) {
  const auto& a = attr(n, key);
  if (!a.is_string()) bad_attr(n, fmt::format("attribute '{}' must be a string", key));
  return a.get<std::string>();
}

long long attr_int(const Node& n, const char* key, long long lo) {
  const auto& a = attr(n, key);
  if (!a.is_number_integer() || a.get<long long>() < lo)
    bad_attr(n, fmt::format("attribute '{}' must be an integer >= {}", key, lo));
  return a.get<long long>();
}

bool is_vec3(const json& a) {
  return a.is_array() && a.size() == 3 && std::all_of(a.begin(), a.end(), [](const json& x) { return x.is_number(); });
}

void require_vec3(const Node& n, const char* key) {
  if (!is_vec3(attr(n, key))) bad_attr(n, fmt::format("attribute '{}' must be [x, y, z]", key));
}

std::vector<PortSpec> ports(std::initializer_list<std::pair<const char*, VT>> list) {
  std::vector<PortSpec> out;
  for (const auto& [name, type] : list) out.push_back({name, type, false});
  return out;
}

NodeSignature math_signature(const Node& n) {
  static const std::set<std::string> unary{"neg", "abs", "sqrt", "sin", "cos", "floor", "not"};
  static const std::set<std::string> binary{"add", "sub", "mul", "div", "min", "max", "ge", "gt",
                                            "le",  "lt",  "eq",  "ne",  "and", "or"};
  const auto op = attr_string(n, "op");
  if (unary.count(op)) return {ports({{"a", VT::number}}), VT::number};
  if (binary.count(op)) return {ports({{"a", VT::number}, {"b", VT::number}}), VT::number};
  if (op == "lerp") return {ports({{"a", VT::number}, {"b", VT::number}, {"t", VT::number}}), VT::number};
  if (op == "clamp") return {ports({{"a", VT::number}, {"lo", VT::number}, {"hi", VT::number}}), VT::number};
  bad_attr(n, "unknown math op '" + op + "'");
}

NodeSignature vector_signature(const Node& n) {
  const auto op = attr_string(n, "op");
  if (op == "make") return {ports({{"x", VT::number}, {"y", VT::number}, {"z", VT::number}}), VT::vec3};
  if (op == "add" || op == "sub" || op == "cross") return {ports({{"a", VT::vec3}, {"b", VT::vec3}}), VT::vec3};
  if (op == "dot") return {ports({{"a", VT::vec3}, {"b", VT::vec3}}), VT::number};
  if (op == "scale") return {ports({{"a", VT::vec3}, {"s", VT::number}}), VT::vec3};
  if (op == "x" || op == "y" || op == "z" || op == "length") return {ports({{"a", VT::vec3}}), VT::number};
  if (op == "normalize") return {ports({{"a", VT::vec3}}), VT::vec3};
  if (op == "lerp") return {ports({{"a", VT::vec3}, {"b", VT::vec3}, {"t", VT::number}}), VT::vec3};
  if (op == "origin" || op == "tangent" || op == "normal" || op == "binormal")
    return {ports({{"f", VT::frame}}), VT::vec3};
  bad_attr(n, "unknown vector op '" + op + "'");
}

}  // namespace

NodeSignature signature(const Node& n) {
  const auto& k = n.kind;
  if (k == "constant") {
    if (!n.attrs.is_object() || n.attrs.size() != 1) bad_attr(n, "constant needs exactly one of number, vec3, box");
    if (n.attrs.contains("number")) {
      if (!n.attrs["number"].is_number()) bad_attr(n, "attribute 'number' must be numeric");
      return {{}, VT::number};
    }
    if (n.attrs.contains("vec3")) {
      require_vec3(n, "vec3");
      return {{}, VT::vec3};
    }
    if (n.attrs.contains("box")) {
      const auto& b = n.attrs["box"];
      if (!b.is_object() || !b.contains("min") || !b.contains("max") || !is_vec3(b["min"]) || !is_vec3(b["max"]))
        bad_attr(n, "box needs min and max as [x, y, z]");
      return {{}, VT::mesh};
    }
    bad_attr(n, "constant needs exactly one of number, vec3, box");
  }
  if (k == "parameter") {
    attr_string(n, "name");
    return {{}, VT::number};
  }
  if (k == "math") return math_signature(n);
  if (k == "vector") return vector_signature(n);
  if (k == "curve") {
    const auto& segs = attr(n, "segments");
    if (!segs.is_array() || segs.empty()) bad_attr(n, "segments must be a nonempty list");
    std::size_t count = 1;
    for (const auto& s : segs) {
      if (s == "line") count += 1;
      else if (s == "cubic") count += 3;
      else bad_attr(n, "segment kinds are 'line' and 'cubic'");
    }
    NodeSignature sig{{}, VT::path};
    for (std::size_t i = 0; i < count; ++i) sig.inputs.push_back({"p" + std::to_string(i), VT::vec3, false});
    return sig;
  }
  if (k == "profile")
    return {ports({{"roundness", VT::number}, {"half_width", VT::number}, {"half_depth", VT::number}}), VT::profile};
  if (k == "sample-curve") return {ports({{"path", VT::path}, {"t", VT::number}}), VT::frame};
  if (k == "sample-profile") return {ports({{"profile", VT::profile}, {"t", VT::number}}), VT::vec3};
  if (k == "scale") {
    const auto mode = attr_string(n, "mode");
    if (mode != "linear" && mode != "smooth") bad_attr(n, "scale mode must be 'linear' or 'smooth'");
    const auto knots = attr_int(n, "knots", 2);
    NodeSignature sig{{}, VT::scale};
    for (long long i = 0; i < knots; ++i) {
      sig.inputs.push_back({"t" + std::to_string(i), VT::number, false});
      sig.inputs.push_back({"s" + std::to_string(i), VT::number, false});
    }
    return sig;
  }
  if (k == "scale-sample") return {ports({{"scale", VT::scale}, {"t", VT::number}}), VT::number};
  if (k == "frame-builder")
    return {ports({{"origin", VT::vec3}, {"x_axis", VT::vec3}, {"y_hint", VT::vec3}}), VT::frame};
  if (k == "sweep") {
    attr_string(n, "part");
    if (n.attrs.contains("profile_samples")) attr_int(n, "profile_samples", 3);
    if (n.attrs.contains("path_samples")) attr_int(n, "path_samples", 2);
    return {{{"profile", VT::profile, false}, {"path", VT::path, false}, {"scale", VT::scale, true}}, VT::mesh};
  }
  if (k == "attach") {
    const bool fit = n.attrs.value("fit", false);
    NodeSignature sig{{{"element", VT::mesh, false}, {"anchor", VT::frame, true}, {"target", VT::frame, false}},
                      VT::mesh};
    if (fit) sig.inputs.push_back({"width", VT::number, false});
    return sig;
  }
  if (k == "mirror") {
    require_vec3(n, "point");
    require_vec3(n, "normal");
    return {ports({{"mesh", VT::mesh}}), VT::mesh};
  }
  if (k == "rotate-replicate") {
    require_vec3(n, "point");
    require_vec3(n, "axis");
    return {ports({{"mesh", VT::mesh}, {"count", VT::number}}), VT::mesh};
  }
  if (k == "join") {
    const auto count = attr_int(n, "inputs", 1);
    NodeSignature sig{{}, VT::mesh};
    for (long long i = 0; i < count; ++i) sig.inputs.push_back({"in" + std::to_string(i), VT::mesh, false});
    return sig;
  }
  if (k == "switch") return {ports({{"gate", VT::number}, {"mesh", VT::mesh}}), VT::mesh};
  if (k == "part-tag") {
    if (attr_string(n, "part").empty()) bad_attr(n, "part name must not be empty");
    return {ports({{"mesh", VT::mesh}}), VT::mesh};
  }
  if (k == "output") return {ports({{"mesh", VT::mesh}}), VT::mesh};
  throw ValidationError(n.id, "unknown node kind '" + k + "'");
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += '\n';
    out += i.code + ": " + i.message;
  }
  return out;
}

ProgramGraph::ProgramGraph(std::shared_ptr<const params::ParameterSchema> schema) : schema_(std::move(schema)) {
  if (!schema_) throw ValidationError("", "program graph needs a schema");
}

void ProgramGraph::add_node(Node node) { nodes_.push_back(std::move(node)); }

void ProgramGraph::add_edge(Edge edge) { edges_.push_back(std::move(edge)); }

const Node* ProgramGraph::find(std::string_view id) const {
  for (const auto& n : nodes_)
    if (n.id == id) return &n;
  return nullptr;
}

namespace {

/// Kahn's algorithm over the given index-based adjacency; ties go to the
/// smallest id. Returns the processed prefix (shorter than n on a cycle).
std::vector<std::size_t> kahn(const std::vector<Node>& nodes, const std::vector<std::vector<std::size_t>>& succ) {
  const std::size_t n = nodes.size();
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& s : succ)
    for (auto t : s) ++indeg[t];
  auto cmp = [&](std::size_t a, std::size_t b) { return nodes[a].id > nodes[b].id; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const auto i = ready.top();
    ready.pop();
    order.push_back(i);
    for (auto t : succ[i])
      if (--indeg[t] == 0) ready.push(t);
  }
  return order;
}

struct Indexed {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::vector<std::size_t>> pred;
};

Indexed index_graph(const std::vector<Node>& nodes, const std::vector<Edge>& edges) {
  Indexed g;
  for (std::size_t i = 0; i < nodes.size(); ++i) g.index.emplace(nodes[i].id, i);
  g.succ.resize(nodes.size());
  g.pred.resize(nodes.size());
  for (const auto& e : edges) {
    auto s = g.index.find(e.source);
    auto t = g.index.find(e.target);
    if (s == g.index.end() || t == g.index.end()) continue;
    g.succ[s->second].push_back(t->second);
    g.pred[t->second].push_back(s->second);
  }
  return g;
}

}  // namespace

ValidationReport ProgramGraph::validate() const {
  ValidationReport rep;
  auto add = [&](std::string code, std::string msg, std::vector<std::string> ids = {}, std::string port = {}) {
    rep.issues.push_back({std::move(code), std::move(msg), std::move(ids), std::move(port)});
  };

  if (!schema_) add("no_schema", "graph is not bound to a parameter schema");

  std::set<std::string> seen;
  for (const auto& n : nodes_)
    if (!seen.insert(n.id).second) add("duplicate_id", "node id '" + n.id + "' is used twice", {n.id});

  std::unordered_map<std::string, NodeSignature> sigs;
  for (const auto& n : nodes_) {
    try {
      sigs.emplace(n.id, signature(n));
    } catch (const ValidationError& e) {
      add("bad_node", e.what(), {n.id});
      continue;
    }
    if (n.kind == "parameter" && schema_) {
      const auto name = n.attrs["name"].get<std::string>();
      if (!schema_->index_of(name)) add("unknown_param", "node '" + n.id + "' references unknown parameter '" + name + "'", {n.id});
    }
  }

  std::map<std::pair<std::string, std::string>, const Edge*> fed;
  for (const auto& e : edges_) {
    const Node* src = find(e.source);
    const Node* dst = find(e.target);
    if (!src || !dst) {
      add("unknown_node", fmt::format("edge {} -> {}.{} references a missing node", e.source, e.target, e.port),
          {e.source, e.target}, e.port);
      continue;
    }
    if (!fed.emplace(std::make_pair(e.target, e.port), &e).second)
      add("duplicate_port", fmt::format("port '{}' of node '{}' has more than one incoming edge", e.port, e.target),
          {e.target}, e.port);
    auto ds = sigs.find(e.target);
    auto ss = sigs.find(e.source);
    if (ds == sigs.end() || ss == sigs.end()) continue;
    auto p = std::find_if(ds->second.inputs.begin(), ds->second.inputs.end(),
                          [&](const PortSpec& ps) { return ps.name == e.port; });
    if (p == ds->second.inputs.end()) {
      add("unknown_port", fmt::format("node '{}' ({}) has no port '{}'", e.target, dst->kind, e.port), {e.target},
          e.port);
      continue;
    }
    if (p->type != ss->second.output)
      add("type_mismatch",
          fmt::format("port '{}' of node '{}' expects {} but '{}' produces {}", e.port, e.target,
                      to_string(p->type), e.source, to_string(ss->second.output)),
          {e.source, e.target}, e.port);
  }
  for (const auto& n : nodes_) {
    auto s = sigs.find(n.id);
    if (s == sigs.end()) continue;
    for (const auto& p : s->second.inputs)
      if (!p.optional && !fed.count({n.id, p.name}))
        add("missing_port", fmt::format("port '{}' of node '{}' is not connected", p.name, n.id), {n.id}, p.name);
  }

  std::vector<std::string> outputs;
  for (const auto& n : nodes_)
    if (n.kind == "output") outputs.push_back(n.id);
  if (outputs.size() != 1)
    add("output_count", fmt::format("graph must have exactly one output node, found {}", outputs.size()), outputs);

  const auto g = index_graph(nodes_, edges_);
  const auto order = kahn(nodes_, g.succ);
  bool cyclic = false;
  if (order.size() != nodes_.size() && seen.size() == nodes_.size()) {
    cyclic = true;
    // Strip nodes that merely hang off a cycle: what remains lies on one.
    std::vector<bool> alive(nodes_.size(), true);
    for (auto i : order) alive[i] = false;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!alive[i]) continue;
        const bool has_succ = std::any_of(g.succ[i].begin(), g.succ[i].end(), [&](std::size_t t) { return alive[t]; });
        const bool has_pred = std::any_of(g.pred[i].begin(), g.pred[i].end(), [&](std::size_t t) { return alive[t]; });
        if (!has_succ || !has_pred) {
          alive[i] = false;
          changed = true;
        }
      }
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (alive[i]) ids.push_back(nodes_[i].id);
    std::sort(ids.begin(), ids.end());
    std::string joined;
    for (const auto& id : ids) joined += (joined.empty() ? "" : ", ") + id;
    add("cycle", "cycle through nodes: " + joined, ids);
  }

  if (outputs.size() == 1 && !cyclic && seen.size() == nodes_.size()) {
    std::vector<bool> live(nodes_.size(), false);
    std::vector<std::size_t> stack{g.index.at(outputs.front())};
    live[stack.back()] = true;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (auto p : g.pred[i])
        if (!live[p]) {
          live[p] = true;
          stack.push_back(p);
        }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!live[i]) add("dead_node", "node '" + nodes_[i].id + "' does not reach the output", {nodes_[i].id});
  }
  return rep;
}

std::vector<std::string> ProgramGraph::topo_order() const {
  const auto g = index_graph(nodes_, edges_);
  const auto order = kahn(nodes_, g.succ);
  if (order.size() != nodes_.size()) {
    const auto rep = validate();
    throw ValidationError("", rep.has("cycle") ? rep.summary() : "graph contains a cycle");
  }
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (auto i : order) ids.push_back(nodes_[i].id);
  return ids;
}

json ProgramGraph::to_json() const {
  json doc;
  doc["format"] = kGraphFormat;
  doc["program"] = schema_ ? schema_->id() : "";
  json nodes = json::array();
  for (const auto& n : nodes_) nodes.push_back({{"id", n.id}, {"kind", n.kind}, {"attrs", n.attrs}});
  json edges = json::array();
  for (const auto& e : edges_) edges.push_back({{"from", e.source}, {"to", e.target}, {"port", e.port}});
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc;
}

ProgramGraph ProgramGraph::from_json(const json& doc, std::shared_ptr<const params::ParameterSchema> schema) {
  if (!doc.is_object()) throw ParseError("graph document must be a JSON object");
  if (!doc.contains("format") || doc["format"] != kGraphFormat)
    throw ParseError(fmt::format("unsupported graph format (expected {})", kGraphFormat));
  if (doc.contains("program") && schema && doc["program"] != schema->id())
    throw ValidationError("program", "graph is for program '" + doc["program"].get<std::string>() + "'");
  ProgramGraph g(std::move(schema));
  try {
    for (const auto& n : doc.at("nodes"))
      g.add_node({n.at("id").get<std::string>(), n.at("kind").get<std::string>(), n.value("attrs", json::object())});
    for (const auto& e : doc.at("edges"))
      g.add_edge({e.at("from").get<std::string>(), e.at("to").get<std::string>(), e.at("port").get<std::string>()});
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed graph document: ") + e.what());
  }
  return g;
}

}  // namespace geocode::graph
