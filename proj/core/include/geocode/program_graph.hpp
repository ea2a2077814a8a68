#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "geocode/curve.hpp"
#include "geocode/mesh.hpp"
#include "geocode/param_space.hpp"

namespace geocode::graph {

enum class ValueType { number, vec3, path, profile, frame, mesh, scale };

std::string_view to_string(ValueType t) noexcept;

using Value = std::variant<double, geom::Vec3, geom::PathCurve, geom::ProfileCurve, geom::Frame,
                           geom::LabeledMesh, geom::ScaleFunction>;

ValueType type_of(const Value& v) noexcept;

/// One operation. `attrs` holds the static, kind-specific configuration.
struct Node {
  std::string id;
  std::string kind;
  nlohmann::json attrs = nlohmann::json::object();
};

/// Value flow from `source` into the named input port of `target`.
struct Edge {
  std::string source;
  std::string target;
  std::string port;
};

struct PortSpec {
  std::string name;
  ValueType type = ValueType::number;
  bool optional = false;
};

struct NodeSignature {
  std::vector<PortSpec> inputs;
  ValueType output = ValueType::mesh;
};

/// Every supported node kind, sorted.
const std::vector<std::string>& node_kinds();

/// Input ports and output type of a node, derived from kind and attrs.
/// Throws ValidationError (subject = node id) on unknown kinds or bad attrs.
NodeSignature signature(const Node& node);

struct Issue {
  std::string code;  // cycle, output_count, type_mismatch, missing_port, ...
  std::string message;
  std::vector<std::string> nodes;
  std::string port;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const noexcept { return issues.empty(); }
  bool has(std::string_view code) const;
  /// One issue per line.
  std::string summary() const;
};

/// Instrumentation filled in by evaluate.
struct EvalStats {
  std::size_t nodes_evaluated = 0;
};

/// A typed DAG of operations bound to a parameter schema, with a single
/// mesh-valued output node.
class ProgramGraph {
 public:
  ProgramGraph() = default;
  explicit ProgramGraph(std::shared_ptr<const params::ParameterSchema> schema);

  const params::ParameterSchema& schema() const { return *schema_; }
  const std::shared_ptr<const params::ParameterSchema>& schema_ptr() const noexcept { return schema_; }

  void add_node(Node node);
  void add_edge(Edge edge);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Node* find(std::string_view id) const;

  ValidationReport validate() const;

  /// Kahn order with ties broken by smallest id. Throws ValidationError on a
  /// cycle.
  std::vector<std::string> topo_order() const;

  /// Canonicalizes `v`, then evaluates every node once in topological order.
  /// Throws ValidationError for an invalid graph or vector and EvalError
  /// (carrying the node id) for runtime geometry failures.
  geom::LabeledMesh evaluate(const params::ParameterVector& v, EvalStats* stats = nullptr) const;

  nlohmann::json to_json() const;
  static ProgramGraph from_json(const nlohmann::json& doc, std::shared_ptr<const params::ParameterSchema> schema);

 private:
  std::shared_ptr<const params::ParameterSchema> schema_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

inline constexpr int kGraphFormat = 1;

}  // namespace geocode::graph
