#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "geocode/error.hpp"
#include "geocode/point_cloud.hpp"
#include "geocode/programs.hpp"

using namespace geocode;
using geom::LabeledMesh;
using geom::Vec3;

namespace {

LabeledMesh unit_square() {
  LabeledMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  const auto p = m.intern_part("sq");
  m.face_part = {p, p};
  return m;
}

LabeledMesh triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  LabeledMesh m;
  m.vertices = {a, b, c};
  m.faces = {{0, 1, 2}};
  m.face_part = {m.intern_part("t")};
  return m;
}

}  // namespace

TEST(SurfaceSample, UnitSquareMean) {
  const auto c = pc::surface_sample(unit_square(), 100000, 7);
  Vec3 mean = Vec3::Zero();
  for (const auto& p : c.points) mean += p;
  mean /= static_cast<double>(c.size());
  EXPECT_NEAR(mean.x(), 0.5, 0.01);
  EXPECT_NEAR(mean.y(), 0.5, 0.01);
  EXPECT_EQ(c.seed, 7u);
}

TEST(SurfaceSample, PointsInsideTriangle) {
  const Vec3 a(0.1, 0.2, 0.3), b(1.2, -0.4, 0.5), c(0.3, 0.9, -0.2);
  const auto cloud = pc::surface_sample(triangle(a, b, c), 5000, 3);
  const Vec3 n = (b - a).cross(c - a);
  for (const auto& p : cloud.points) {
    const double area = n.squaredNorm();
    const double u = (b - p).cross(c - p).dot(n) / area;
    const double v = (c - p).cross(a - p).dot(n) / area;
    const double w = 1.0 - u - v;
    EXPECT_GE(u, -1e-12);
    EXPECT_GE(v, -1e-12);
    EXPECT_GE(w, -1e-12);
    EXPECT_NEAR((p - a).dot(n.normalized()), 0.0, 1e-12);
  }
}

TEST(SurfaceSample, DeterministicAndSeedSensitive) {
  const auto m = programs::get_program("vase").graph.evaluate(programs::default_params("vase"));
  EXPECT_EQ(pc::surface_sample(m, 500, 11), pc::surface_sample(m, 500, 11));
  EXPECT_NE(pc::surface_sample(m, 500, 11).points, pc::surface_sample(m, 500, 12).points);
}

TEST(SurfaceSample, AreaProportional) {
  // Two disjoint triangles, the second with 3x the area.
  LabeledMesh m = triangle(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
  m.vertices.insert(m.vertices.end(), {Vec3(5, 0, 0), Vec3(8, 0, 0), Vec3(5, 1, 0)});
  m.faces.push_back({3, 4, 5});
  m.face_part.push_back(0);
  const auto c = pc::surface_sample(m, 40000, 1);
  const auto far = std::count_if(c.points.begin(), c.points.end(), [](const Vec3& p) { return p.x() >= 5.0; });
  EXPECT_NEAR(static_cast<double>(far) / 40000.0, 0.75, 0.01);
}

TEST(SurfaceSample, Errors) {
  EXPECT_THROW(pc::surface_sample(LabeledMesh{}, 10, 0), GeometryError);
  EXPECT_THROW(pc::surface_sample(unit_square(), 0, 0), ValidationError);
}

TEST(Fps, CollinearPoints) {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(10, 0, 0)};
  EXPECT_EQ(pc::fps(pts, 2, 0), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(pc::fps(pts, 3, 0), (std::vector<std::size_t>{0, 2, 1}));
}

TEST(Fps, SquareCornersDiagonal) {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)};
  EXPECT_EQ(pc::fps(pts, 2, 0)[1], 3u);
  auto all = pc::fps(pts, 4, 0);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Fps, MatchesNaiveReplay) {
  Rng rng(99);
  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) pts.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
  for (std::size_t start : {0u, 17u}) {
    EXPECT_EQ(pc::fps(pts, 60, start), oracle::naive_fps(testing_support::to_p3(pts), 60, start));
  }
}

TEST(Fps, Errors) {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  EXPECT_THROW(pc::fps(pts, 0, 0), ValidationError);
  EXPECT_THROW(pc::fps(pts, 3, 0), ValidationError);
  EXPECT_THROW(pc::fps(pts, 1, 2), ValidationError);
}

TEST(TrainingCloud, SizesAndSubset) {
  const auto m = programs::get_program("chair").graph.evaluate(programs::default_params("chair"));
  const auto t = pc::make_training_clouds(m, 5);
  EXPECT_EQ(t.fps.size(), 1500u);
  EXPECT_EQ(t.random.size(), 1500u);
  ASSERT_EQ(t.picks.size(), 800u);
  EXPECT_EQ(std::set<std::size_t>(t.picks.begin(), t.picks.end()).size(), 800u);
  ASSERT_EQ(t.combined.size(), 2300u);
  for (std::size_t i = 0; i < 800; ++i) EXPECT_EQ(t.combined.points[1500 + i], t.random.points[t.picks[i]]);
  EXPECT_EQ(pc::make_training_cloud(m, 5), t.combined);
  EXPECT_EQ(t.fps.provenance, pc::Provenance::fps);
}

TEST(TrainingCloud, SeedsChangeBothParts) {
  const auto m = programs::get_program("vase").graph.evaluate(programs::default_params("vase"));
  const auto a = pc::make_training_clouds(m, 1);
  const auto b = pc::make_training_clouds(m, 2);
  EXPECT_NE(a.picks, b.picks);
  EXPECT_NE(a.random.points, b.random.points);
  EXPECT_NE(a.fps.points, b.fps.points);
}

TEST(Noise, ZeroMeanWithRequestedSpread) {
  pc::PointCloud c;
  c.points.assign(20000, Vec3(1, 2, 3));
  const auto n = pc::add_gaussian_noise(c, 0.05, 4);
  Vec3 mean = Vec3::Zero();
  double var = 0.0;
  for (const auto& p : n.points) mean += p;
  mean /= 20000.0;
  for (const auto& p : n.points) var += (p - Vec3(1, 2, 3)).squaredNorm();
  var /= 3.0 * 20000.0;
  EXPECT_LT((mean - Vec3(1, 2, 3)).norm(), 2e-3);
  EXPECT_NEAR(std::sqrt(var), 0.05, 2e-3);
}

TEST(Pcxyz, RoundTripAndSidecar) {
  testing_support::TempDir dir("pc");
  pc::PointCloud c;
  c.points = {Vec3(0.5, -1.25, 3.0), Vec3(1e-3, 2.0, -7.5)};
  c.provenance = pc::Provenance::fps;
  c.seed = 1234;
  const auto bytes = pc::encode_pcxyz(c);
  EXPECT_EQ(bytes.size(), 8u + 2 * 12);
  EXPECT_EQ(bytes.substr(0, 8), "PCXYZ001");
  const auto back = pc::decode_pcxyz(bytes);
  ASSERT_EQ(back.size(), 2u);
  for (int i = 0; i < 2; ++i) EXPECT_LT((back.points[i] - c.points[i]).norm(), 1e-6);

  const auto file = dir.path() / "a.pcxyz";
  pc::save_pcxyz(c, file);
  const auto side = nlohmann::json::parse(testing_support::slurp(dir.path() / "a.json"));
  EXPECT_EQ(side["count"], 2);
  EXPECT_EQ(side["seed"], 1234);
  EXPECT_EQ(side["provenance"], "fps");
  const auto loaded = pc::load_pcxyz(file);
  EXPECT_EQ(loaded.seed, 1234u);
  EXPECT_EQ(loaded.provenance, pc::Provenance::fps);
}

TEST(Pcxyz, CorruptInput) {
  EXPECT_THROW(pc::decode_pcxyz("PCXYZ002"), ParseError);
  EXPECT_THROW(pc::decode_pcxyz(std::string("PCXYZ001") + std::string(13, '\0')), ParseError);
  EXPECT_THROW(pc::decode_pcxyz("PC"), ParseError);
}
