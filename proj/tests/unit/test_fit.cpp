#include <gtest/gtest.h>

#include <memory>

#include "fixtures.hpp"
#include "geocode/dataset.hpp"
#include "geocode/error.hpp"
#include "geocode/fit.hpp"
#include "geocode/programs.hpp"

using namespace geocode;
using testing_support::TempDir;

namespace {

// The toy chair dataset, generated once for the whole suite.
class FitSuite : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<TempDir>("fit");
    const auto recipe = params::load_recipe(testing_support::slurp(testing_support::recipes_dir() / "chair_toy.json"),
                                            *programs::chair_schema());
    manifest_ = std::make_unique<dataset::DatasetManifest>(dataset::generate(recipe, dir_->path()).manifest);
    index_ = std::make_unique<fit::FitIndex>(fit::build_index(*manifest_, dir_->path()));
  }
  static void TearDownTestSuite() {
    index_.reset();
    manifest_.reset();
    dir_.reset();
  }

  static pc::PointCloud member_cloud(std::size_t i) {
    return pc::load_pcxyz(dir_->path() / manifest_->entries[i].pc_fps);
  }

  static std::unique_ptr<TempDir> dir_;
  static std::unique_ptr<dataset::DatasetManifest> manifest_;
  static std::unique_ptr<fit::FitIndex> index_;
};

std::unique_ptr<TempDir> FitSuite::dir_;
std::unique_ptr<dataset::DatasetManifest> FitSuite::manifest_;
std::unique_ptr<fit::FitIndex> FitSuite::index_;

}  // namespace

TEST_F(FitSuite, IndexCardinalityAndDeterminism) {
  ASSERT_EQ(index_->entries.size(), 12u);
  EXPECT_EQ(index_->program, "chair");
  EXPECT_GT(index_->floor, 0.0);
  const auto again = fit::build_index(*manifest_, dir_->path());
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(index_->entries[i].signature->size(), fit::kSignaturePoints);
    EXPECT_EQ(index_->entries[i].signature->points(), again.entries[i].signature->points());
    EXPECT_EQ(index_->entries[i].params, manifest_->entries[i].params);
  }
  EXPECT_EQ(again.floor, index_->floor);
}

TEST_F(FitSuite, IndexErrors) {
  dataset::DatasetManifest empty = *manifest_;
  empty.entries.clear();
  EXPECT_THROW(fit::build_index(empty, dir_->path()), ValidationError);
  EXPECT_THROW(fit::build_index(*manifest_, dir_->path() / "elsewhere"), IoError);
}

TEST_F(FitSuite, SelfRetrievalRankOne) {
  for (std::size_t i = 0; i < index_->entries.size(); ++i) {
    const auto matches = fit::retrieve(member_cloud(i), *index_, 3);
    ASSERT_EQ(matches.size(), 3u);
    EXPECT_EQ(matches[0].entry, i);
    EXPECT_LE(matches[0].distance, matches[1].distance);
    EXPECT_LE(matches[1].distance, matches[2].distance);
  }
}

TEST_F(FitSuite, RetrieveBounds) {
  fit::FitIndex single{index_->program, {index_->entries[4]}, index_->floor};
  const auto m = fit::retrieve(member_cloud(0), single, 1);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].entry, 0u);
  EXPECT_THROW(fit::retrieve(member_cloud(0), single, 2), ValidationError);
  EXPECT_THROW(fit::retrieve(member_cloud(0), *index_, 0), ValidationError);
  EXPECT_THROW(fit::retrieve(member_cloud(0), fit::FitIndex{"chair", {}, 0.0}, 1), ValidationError);
}

TEST_F(FitSuite, SelfFitIsExactAndDeterministic) {
  for (std::size_t i : {0u, 5u, 11u}) {
    const auto r = fit::fit(member_cloud(i), *index_);
    EXPECT_EQ(r.params, manifest_->entries[i].params) << i;
    EXPECT_FALSE(r.low_confidence);
    const auto again = fit::fit(member_cloud(i), *index_);
    EXPECT_EQ(again.params, r.params);
    EXPECT_EQ(again.objective, r.objective);
    EXPECT_EQ(again.evaluations, r.evaluations);
  }
}

TEST_F(FitSuite, VaseAgainstChairIndexIsLowConfidence) {
  auto v = programs::default_params("vase");
  const auto& vs = *programs::vase_schema();
  v.values[vs.require("handle_count")] = std::int64_t{2};
  v = params::canonicalize(v, vs);
  const auto mesh = programs::get_program("vase").graph.evaluate(v);
  fit::RefineOptions opts;
  opts.budget = 40;
  const auto r = fit::fit(pc::make_training_clouds(mesh, 1).fps, *index_, opts);
  EXPECT_TRUE(r.low_confidence);
  EXPECT_GT(r.objective, fit::kLowConfidenceFactor * index_->floor);
  EXPECT_LE(r.evaluations, 40u);
}

TEST(Refine, GroundTruthIsFixpoint) {
  const auto& chair = programs::get_program("chair");
  const auto truth = programs::default_params("chair");
  const auto target = pc::make_training_clouds(chair.graph.evaluate(truth), 3).fps;
  const auto r = fit::refine(target, truth, chair);
  EXPECT_EQ(r.params, truth);
  EXPECT_LE(r.objective, r.start_objective);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front(), r.start_objective);
}

TEST(Refine, RecoversSeatHeightStep) {
  const auto& chair = programs::get_program("chair");
  const auto& s = *chair.schema;
  const auto h = s.require("seat_height");
  const auto& spec = s.spec(h);
  Rng rng(2024);
  for (int c = 0; c < 10; ++c) {
    const auto truth = testing_support::random_vector(s, rng);
    const double value = std::get<double>(truth.values[h]);
    int k = 0;
    while (params::grid_value(spec, k) != value) ++k;
    const int off = k == 0 ? 1 : (k == spec.granularity - 1 ? k - 1 : (c % 2 ? k + 1 : k - 1));
    auto start = truth;
    start.values[h] = params::grid_value(spec, off);
    const auto target = pc::make_training_clouds(chair.graph.evaluate(truth), 100 + c).fps;
    const auto r = fit::refine(target, start, chair);
    EXPECT_EQ(std::get<double>(r.params.values[h]), value) << c;
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LT(r.trace[i], r.trace[i - 1]);
    EXPECT_LE(r.objective, r.start_objective);
  }
}

TEST(Refine, Preconditions) {
  const auto& chair = programs::get_program("chair");
  const auto truth = programs::default_params("chair");
  const auto target = pc::make_training_clouds(chair.graph.evaluate(truth), 3).fps;
  fit::RefineOptions zero;
  zero.budget = 0;
  EXPECT_THROW(fit::refine(target, truth, chair, zero), ValidationError);
  auto raw = truth;
  raw.values[chair.schema->require("armrests_exist")] = false;  // armrest entries still set
  EXPECT_THROW(fit::refine(target, raw, chair), ValidationError);
  fit::RefineOptions one;
  one.budget = 1;
  const auto r = fit::refine(target, truth, chair, one);
  EXPECT_EQ(r.evaluations, 1u);
}
