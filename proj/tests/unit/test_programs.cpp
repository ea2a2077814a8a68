#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fixtures.hpp"
#include "geocode/chamfer.hpp"
#include "geocode/error.hpp"
#include "geocode/programs.hpp"
#include "geocode/stability.hpp"

using namespace geocode;
using geom::LabeledMesh;
using geom::Vec3;

namespace {

const programs::Program& chair() { return programs::get_program("chair"); }
const programs::Program& vase() { return programs::get_program("vase"); }

params::ParameterVector with(params::ParameterVector v, const programs::Program& p, const std::string& name,
                             params::ParamValue value) {
  v.values[p.schema->require(name)] = value;
  return params::canonicalize(v, *p.schema);
}

std::size_t components(const LabeledMesh& m) {
  std::size_t n = 0;
  geom::face_components(m, &n);
  return n;
}

double contact_eps(const LabeledMesh& m) { return 1e-3 * geom::bounds(m).diagonal(); }

}  // namespace

TEST(Registry, IdsAndUnknownProgram) {
  EXPECT_EQ(programs::program_ids(), (std::vector<std::string>{"chair", "vase"}));
  EXPECT_EQ(chair().schema->size(), 18u);
  EXPECT_EQ(vase().schema->size(), 11u);
  EXPECT_THROW(programs::get_program("table"), UnknownProgramError);
  EXPECT_THROW(programs::default_params("table"), UnknownProgramError);
}

TEST(Chair, DefaultIsStableAndConnected) {
  const auto m = chair().graph.evaluate(programs::default_params("chair"));
  const auto r = metrics::stability(m);
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.detached_components, 0u);
  EXPECT_EQ(metrics::connected_components(m, contact_eps(m)).count, 1u);
}

TEST(Chair, FourCrossRails) {
  const auto v = with(programs::default_params("chair"), chair(), "cross_rail_count", std::int64_t{4});
  const auto m = chair().graph.evaluate(v);
  EXPECT_EQ(components(m.extract_part("cross_rail")), 4u);
  for (std::int64_t n = 0; n <= 4; ++n) {
    const auto mn = chair().graph.evaluate(with(v, chair(), "cross_rail_count", n));
    EXPECT_EQ(components(mn.extract_part("cross_rail")), static_cast<std::size_t>(n));
  }
}

TEST(Chair, NoArmrestsNoArmrestFaces) {
  const auto v = with(programs::default_params("chair"), chair(), "armrests_exist", false);
  const auto m = chair().graph.evaluate(v);
  for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_NE(m.part_of(f), "armrest");
  EXPECT_TRUE(metrics::stability(m).stable);
}

TEST(Chair, RoundnessNarrowsDefault) {
  const auto& s = *chair().schema;
  const auto& spec = s.spec(s.require("seat_roundness"));
  double prev = 1e9;
  for (int k = 0; k < spec.granularity; ++k) {
    const auto m =
        chair().graph.evaluate(with(programs::default_params("chair"), chair(), "seat_roundness", params::grid_value(spec, k)));
    const double w = geom::bounds(m).extent().x();
    EXPECT_LE(w, prev);
    prev = w;
  }
}

TEST(Chair, SeatHeightMovesSeatRigidly) {
  const auto& s = *chair().schema;
  const auto& spec = s.spec(s.require("seat_height"));
  const auto base = programs::default_params("chair");
  const auto a = chair().graph.evaluate(with(base, chair(), "seat_height", params::grid_value(spec, 0))).extract_part("seat");
  const auto b = chair().graph.evaluate(with(base, chair(), "seat_height", params::grid_value(spec, 3))).extract_part("seat");
  ASSERT_EQ(a.vertex_count(), b.vertex_count());
  const Vec3 shift = b.vertices[0] - a.vertices[0];
  EXPECT_NEAR(shift.z(), spec.max - spec.min, 1e-12);
  for (std::size_t i = 0; i < a.vertex_count(); ++i) EXPECT_LT((b.vertices[i] - a.vertices[i] - shift).norm(), 1e-9);
}

TEST(Chair, RandomChairsSymmetricLabeledAndAttached) {
  Rng rng(17);
  const std::set<std::string> declared(chair().parts.begin(), chair().parts.end());
  for (int i = 0; i < 12; ++i) {
    const auto v = testing_support::random_vector(*chair().schema, rng);
    const auto m = chair().graph.evaluate(v);
    for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_TRUE(declared.count(m.part_of(f)));
    // mirror symmetry about x = 0
    const metrics::CloudIndex index(m.vertices);
    double worst = 0.0;
    for (const auto& p : m.vertices) worst = std::max(worst, index.nearest_squared(Vec3(-p.x(), p.y(), p.z())));
    EXPECT_LT(std::sqrt(worst), 1e-6);
    // legs, posts and rails all touch
    EXPECT_EQ(metrics::connected_components(m, contact_eps(m)).count, 1u) << params::canonical_key(v);
  }
}

TEST(Chair, SwivelHidesLegParameters) {
  const auto v = with(programs::default_params("chair"), chair(), "is_swivel", true);
  EXPECT_TRUE(params::is_hidden(v.values[chair().schema->require("leg_thickness")]));
  const auto m = chair().graph.evaluate(v);
  EXPECT_TRUE(metrics::stability(m).stable);
}

TEST(Vase, DefaultHasNoHandles) {
  const auto v = programs::default_params("vase");
  const auto& s = *vase().schema;
  EXPECT_EQ(std::get<std::int64_t>(v.values[s.require("handle_count")]), 0);
  EXPECT_TRUE(params::is_hidden(v.values[s.require("handle_thickness")]));
  const auto m = vase().graph.evaluate(v);
  EXPECT_TRUE(m.extract_part("handle").empty());
  EXPECT_TRUE(metrics::stability(m).stable);
}

TEST(Vase, ThreeHandlesAt120Degrees) {
  const auto v = with(programs::default_params("vase"), vase(), "handle_count", std::int64_t{3});
  const auto handles = vase().graph.evaluate(v).extract_part("handle");
  std::vector<std::uint32_t> comp = geom::face_components(handles);
  std::vector<Vec3> centroid(3, Vec3::Zero());
  std::vector<int> n(3, 0);
  ASSERT_EQ(*std::max_element(comp.begin(), comp.end()), 2u);
  for (std::size_t f = 0; f < handles.face_count(); ++f)
    for (auto i : handles.faces[f]) {
      centroid[comp[f]] += handles.vertices[i];
      ++n[comp[f]];
    }
  std::vector<double> angles;
  for (int c = 0; c < 3; ++c) {
    const Vec3 p = centroid[c] / n[c];
    angles.push_back(std::atan2(p.y(), p.x()));
  }
  std::sort(angles.begin(), angles.end());
  EXPECT_NEAR(angles[1] - angles[0], 2 * std::numbers::pi / 3, 1e-9);
  EXPECT_NEAR(angles[2] - angles[1], 2 * std::numbers::pi / 3, 1e-9);
}

TEST(Vase, CircularSectionsEquidistantFromAxis) {
  auto v = programs::default_params("vase");
  for (const char* n : {"base_radius", "belly_radius", "neck_radius"}) v = with(v, vase(), n, 0.1);
  v = with(v, vase(), "body_roundness", 1.0);
  const auto body = vase().graph.evaluate(v).extract_part("body");
  for (const auto& p : body.vertices) {
    const double r = std::hypot(p.x(), p.y());
    if (r < 1e-9) continue;  // cap centres
    EXPECT_NEAR(r, 0.1, 1e-6);
  }
}

TEST(Vase, HandlesStayAttachedWhileNeckChanges) {
  const auto& s = *vase().schema;
  const auto& neck = s.spec(s.require("neck_radius"));
  for (std::int64_t count = 1; count <= 4; ++count) {
    auto v = with(programs::default_params("vase"), vase(), "handle_count", count);
    for (int k = 0; k < neck.granularity; ++k) {
      const auto m = vase().graph.evaluate(with(v, vase(), "neck_radius", params::grid_value(neck, k)));
      EXPECT_EQ(metrics::connected_components(m, contact_eps(m)).count, 1u) << count << " " << k;
    }
  }
}
