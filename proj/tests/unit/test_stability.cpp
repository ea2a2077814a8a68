#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "geocode/mesh.hpp"
#include "geocode/programs.hpp"
#include "geocode/stability.hpp"

using namespace geocode;
using geom::LabeledMesh;
using geom::Vec3;

namespace {

LabeledMesh join2(const LabeledMesh& a, const LabeledMesh& b) {
  const std::vector<LabeledMesh> parts{a, b};
  return geom::join(parts);
}

// Triangular prism along x resting on its apex edge.
LabeledMesh knife_edge() {
  LabeledMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(0, -0.1, 2), Vec3(0, 0.1, 2), Vec3(1, 0, 0), Vec3(1, -0.1, 2), Vec3(1, 0.1, 2)};
  m.faces = {{0, 2, 1}, {3, 4, 5}, {0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}, {2, 0, 3}, {2, 3, 5}};
  const auto p = m.intern_part("slab");
  m.face_part.assign(m.faces.size(), p);
  return m;
}

LabeledMesh transformed(const LabeledMesh& m, double angle, const Vec3& shift) {
  LabeledMesh out = m;
  const Eigen::AngleAxisd rot(angle, Vec3::UnitZ());
  for (auto& v : out.vertices) v = rot * v + shift;
  return out;
}

}  // namespace

TEST(Components, SingleSweepAndSeparatedCubes) {
  const auto tube = geom::sweep(geom::ProfileCurve{1.0, 0.05, 0.05}, geom::PathCurve::line(Vec3(0, 0, 0), Vec3(0, 0, 1)),
                                geom::ScaleFunction::constant(1.0), 16, 8, "t");
  EXPECT_EQ(metrics::connected_components(tube, 1e-3).count, 1u);
  const double eps = 1e-3;
  const auto a = geom::make_box(Vec3(0, 0, 0), Vec3(1, 1, 1), "a");
  const auto b = geom::make_box(Vec3(1 + 10 * eps, 0, 0), Vec3(2, 1, 1), "b");
  EXPECT_EQ(metrics::connected_components(join2(a, b), eps).count, 2u);
  const auto touching = geom::make_box(Vec3(1 + 0.5 * eps, 0.2, 0.2), Vec3(2, 0.8, 0.8), "b");
  EXPECT_EQ(metrics::connected_components(join2(a, touching), eps).count, 1u);
}

TEST(Components, NestedBoxMerges) {
  const auto outer = geom::make_box(Vec3(0, 0, 0), Vec3(1, 1, 1), "outer");
  const auto inner = geom::make_box(Vec3(0.4, 0.4, 0.4), Vec3(0.6, 0.6, 0.6), "inner");
  EXPECT_EQ(metrics::connected_components(join2(outer, inner), 1e-3).count, 1u);
}

TEST(Stability, UnitCubeOnGround) {
  const auto r = metrics::stability(geom::make_box(Vec3(0, 0, 0), Vec3(1, 1, 1), "body"));
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.detached_components, 0u);
  EXPECT_NEAR(r.com_margin, 0.5, 1e-12);
  EXPECT_NEAR(r.margin_tolerance, 0.01 * std::sqrt(3.0), 1e-15);
  EXPECT_TRUE(r.volume_weighted);
  EXPECT_LT((r.center_of_mass - Vec3(0.5, 0.5, 0.5)).norm(), 1e-12);
}

TEST(Stability, FloatingCubeIsDetached) {
  const auto ground = geom::make_box(Vec3(0, 0, 0), Vec3(1, 1, 1), "a");
  const auto floating = geom::make_box(Vec3(0, 0, 2), Vec3(1, 1, 3), "b");
  const auto r = metrics::stability(join2(ground, floating));
  EXPECT_FALSE(r.stable);
  EXPECT_EQ(r.detached_components, 1u);
  EXPECT_EQ(r.components, 2u);
}

TEST(Stability, KnifeEdgeFalls) {
  const auto r = metrics::stability(knife_edge());
  EXPECT_FALSE(r.stable);
  EXPECT_LE(r.com_margin, 0.0);
  EXPECT_EQ(r.detached_components, 0u);
}

TEST(Stability, OverhangTipsOver) {
  // A slab cantilevered far past a narrow foot.
  const auto foot = geom::make_box(Vec3(0, 0, 0), Vec3(0.1, 0.1, 1), "foot");
  const auto slab = geom::make_box(Vec3(0, 0, 1), Vec3(3, 0.1, 1.2), "slab");
  const auto r = metrics::stability(join2(foot, slab));
  EXPECT_FALSE(r.stable);
  EXPECT_LT(r.com_margin, 0.0);
}

TEST(Stability, EmptyMeshUnstable) { EXPECT_FALSE(metrics::stability(LabeledMesh{}).stable); }

TEST(Stability, InvariantUnderVerticalRotationAndShift) {
  const auto m = programs::get_program("chair").graph.evaluate(programs::default_params("chair"));
  const auto ref = metrics::stability(m);
  for (double angle : {0.3, 1.1, 2.5}) {
    const auto r = metrics::stability(transformed(m, angle, Vec3(3.0, -2.0, 0.0)));
    EXPECT_EQ(r.stable, ref.stable);
    EXPECT_EQ(r.detached_components, ref.detached_components);
    EXPECT_NEAR(r.com_margin, ref.com_margin, 1e-9);
  }
}

TEST(Stability, JsonReport) {
  const auto doc = metrics::to_json(metrics::stability(geom::make_box(Vec3(0, 0, 0), Vec3(1, 1, 1), "b")));
  EXPECT_EQ(doc["stable"], true);
  EXPECT_EQ(doc["detached_components"], 0);
  EXPECT_TRUE(doc.contains("com_margin"));
}
