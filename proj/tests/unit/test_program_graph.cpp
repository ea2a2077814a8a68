#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <thread>

#include "geocode/error.hpp"
#include "geocode/obj_io.hpp"
#include "geocode/program_graph.hpp"
#include "geocode/programs.hpp"

using namespace geocode;
using namespace geocode::graph;
using nlohmann::json;

namespace {

json box_attrs() { return {{"box", {{"min", {0, 0, 0}}, {"max", {1, 1, 1}}}}}; }

ProgramGraph passthrough() {
  ProgramGraph g(programs::chair_schema());
  g.add_node({"cube", "constant", box_attrs()});
  g.add_node({"tag", "part-tag", {{"part", "body"}}});
  g.add_node({"out", "output", json::object()});
  g.add_edge({"cube", "tag", "mesh"});
  g.add_edge({"tag", "out", "mesh"});
  return g;
}

std::size_t position(const std::vector<std::string>& order, const std::string& id) {
  return static_cast<std::size_t>(std::find(order.begin(), order.end(), id) - order.begin());
}

}  // namespace

TEST(Validate, PassthroughIsClean) {
  const auto r = passthrough().validate();
  EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(Validate, TwoNodeCycle) {
  ProgramGraph g(programs::chair_schema());
  g.add_node({"a", "part-tag", {{"part", "x"}}});
  g.add_node({"b", "part-tag", {{"part", "y"}}});
  g.add_node({"out", "output", json::object()});
  g.add_edge({"a", "b", "mesh"});
  g.add_edge({"b", "a", "mesh"});
  g.add_edge({"b", "out", "mesh"});
  const auto r = g.validate();
  ASSERT_TRUE(r.has("cycle"));
  const auto it = std::find_if(r.issues.begin(), r.issues.end(), [](const Issue& i) { return i.code == "cycle"; });
  const std::set<std::string> ids(it->nodes.begin(), it->nodes.end());
  EXPECT_TRUE(ids.count("a") && ids.count("b"));
  EXPECT_THROW(g.topo_order(), ValidationError);
}

TEST(Validate, TwoOutputs) {
  auto g = passthrough();
  g.add_node({"out2", "output", json::object()});
  g.add_edge({"tag", "out2", "mesh"});
  EXPECT_TRUE(g.validate().has("output_count"));
}

TEST(Validate, MeshIntoMathPort) {
  auto g = passthrough();
  g.add_node({"sum", "math", {{"op", "add"}}});
  g.add_edge({"cube", "sum", "a"});
  const auto r = g.validate();
  ASSERT_TRUE(r.has("type_mismatch")) << r.summary();
  const auto it =
      std::find_if(r.issues.begin(), r.issues.end(), [](const Issue& i) { return i.code == "type_mismatch"; });
  EXPECT_EQ(it->port, "a");
}

TEST(Validate, MissingPortAndUnknownParameter) {
  ProgramGraph g(programs::chair_schema());
  g.add_node({"tag", "part-tag", {{"part", "x"}}});
  g.add_node({"p", "parameter", {{"name", "seat_hight"}}});
  g.add_node({"out", "output", json::object()});
  g.add_edge({"tag", "out", "mesh"});
  const auto r = g.validate();
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.has("missing_port")) << r.summary();
}

TEST(Evaluate, PassthroughLabelsEveryFace) {
  EvalStats stats;
  const auto m = passthrough().evaluate(programs::default_params("chair"), &stats);
  EXPECT_EQ(m.face_count(), 12u);
  for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_EQ(m.part_of(f), "body");
  EXPECT_EQ(stats.nodes_evaluated, 3u);
}

TEST(Evaluate, SwitchGatedOffGivesNoFaces) {
  ProgramGraph g(programs::chair_schema());
  g.add_node({"cube", "constant", box_attrs()});
  g.add_node({"gate", "parameter", {{"name", "armrests_exist"}}});
  g.add_node({"sw", "switch", json::object()});
  g.add_node({"out", "output", json::object()});
  g.add_edge({"cube", "sw", "mesh"});
  g.add_edge({"gate", "sw", "gate"});
  g.add_edge({"sw", "out", "mesh"});
  ASSERT_TRUE(g.validate().ok()) << g.validate().summary();
  auto v = programs::default_params("chair");
  EXPECT_EQ(g.evaluate(v).face_count(), 12u);
  v.values[g.schema().require("armrests_exist")] = false;
  EXPECT_EQ(g.evaluate(v).face_count(), 0u);
}

TEST(Evaluate, ZeroLengthPathReportsNode) {
  ProgramGraph g(programs::chair_schema());
  g.add_node({"p0", "constant", {{"vec3", {0, 0, 0}}}});
  g.add_node({"line", "curve", {{"segments", {"line"}}}});
  g.add_node({"r", "constant", {{"number", 1.0}}});
  g.add_node({"w", "constant", {{"number", 0.1}}});
  g.add_node({"prof", "profile", json::object()});
  g.add_node({"body", "sweep", {{"part", "body"}}});
  g.add_node({"out", "output", json::object()});
  g.add_edge({"p0", "line", "p0"});
  g.add_edge({"p0", "line", "p1"});
  g.add_edge({"r", "prof", "roundness"});
  g.add_edge({"w", "prof", "half_width"});
  g.add_edge({"w", "prof", "half_depth"});
  g.add_edge({"prof", "body", "profile"});
  g.add_edge({"line", "body", "path"});
  g.add_edge({"body", "out", "mesh"});
  ASSERT_TRUE(g.validate().ok()) << g.validate().summary();
  try {
    g.evaluate(programs::default_params("chair"));
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.node_id(), "line");
  }
}

TEST(TopoOrder, ChainAndDiamond) {
  EXPECT_EQ(passthrough().topo_order(), (std::vector<std::string>{"cube", "tag", "out"}));

  ProgramGraph g(programs::chair_schema());
  g.add_node({"d", "join", {{"inputs", 2}}});
  g.add_node({"c", "part-tag", {{"part", "c"}}});
  g.add_node({"b", "part-tag", {{"part", "b"}}});
  g.add_node({"a", "constant", box_attrs()});
  g.add_node({"e", "output", json::object()});
  g.add_edge({"a", "b", "mesh"});
  g.add_edge({"a", "c", "mesh"});
  g.add_edge({"b", "d", "in0"});
  g.add_edge({"c", "d", "in1"});
  g.add_edge({"d", "e", "mesh"});
  const auto order = g.topo_order();
  EXPECT_EQ(order.front(), "a");
  EXPECT_EQ(order.back(), "e");
  EXPECT_GT(position(order, "d"), position(order, "b"));
  EXPECT_GT(position(order, "d"), position(order, "c"));
  for (const auto& e : g.edges()) EXPECT_LT(position(order, e.source), position(order, e.target));
}

TEST(TopoOrder, ChairStableAcrossBuilds) {
  const auto a = programs::build_chair().topo_order();
  const auto b = programs::build_chair().topo_order();
  EXPECT_EQ(a, b);
  const auto g = programs::build_chair();
  for (const auto& e : g.edges()) EXPECT_LT(position(a, e.source), position(a, e.target));
}

TEST(ChairGraph, DefaultLabelsEqualDeclaredParts) {
  const auto& p = programs::get_program("chair");
  ASSERT_TRUE(p.graph.validate().ok());
  EvalStats stats;
  const auto m = p.graph.evaluate(programs::default_params("chair"), &stats);
  std::set<std::string> used;
  for (std::size_t f = 0; f < m.face_count(); ++f) used.insert(m.part_of(f));
  EXPECT_EQ(used, std::set<std::string>(p.parts.begin(), p.parts.end()));
  EXPECT_EQ(stats.nodes_evaluated, p.graph.nodes().size());
}

TEST(ChairGraph, HiddenEntriesCannotChangeOutput) {
  const auto& p = programs::get_program("chair");
  const auto& s = *p.schema;
  auto v = programs::default_params("chair");
  v.values[s.require("armrests_exist")] = false;
  auto w = v;
  v.values[s.require("armrest_height")] = s.spec(s.require("armrest_height")).min;
  w.values[s.require("armrest_height")] = s.spec(s.require("armrest_height")).max;
  EXPECT_EQ(p.graph.evaluate(v), p.graph.evaluate(w));
}

TEST(ChairGraph, EvaluationDeterministicAcrossThreads) {
  const auto& p = programs::get_program("chair");
  const auto v = programs::default_params("chair");
  const auto ref = geom::write_obj(p.graph.evaluate(v));
  std::vector<std::string> got(4);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < got.size(); ++i)
    threads.emplace_back([&, i] { got[i] = geom::write_obj(p.graph.evaluate(v)); });
  for (auto& t : threads) t.join();
  for (const auto& g : got) EXPECT_EQ(g, ref);
}

TEST(Serialization, RoundTripEvaluatesIdentically) {
  const auto& p = programs::get_program("vase");
  const auto doc = p.graph.to_json();
  EXPECT_EQ(doc["format"], kGraphFormat);
  const auto back = ProgramGraph::from_json(doc, p.schema);
  EXPECT_EQ(back.to_json(), doc);
  auto v = programs::default_params("vase");
  v.values[p.schema->require("handle_count")] = std::int64_t{2};
  v = params::canonicalize(v, *p.schema);
  EXPECT_EQ(back.evaluate(v), p.graph.evaluate(v));
  json bad = doc;
  bad["format"] = 2;
  EXPECT_THROW(ProgramGraph::from_json(bad, p.schema), Error);
}

TEST(NodeKinds, EverySignatureResolves) {
  EXPECT_FALSE(node_kinds().empty());
  EXPECT_THROW(signature(Node{"x", "teleport", json::object()}), ValidationError);
}
