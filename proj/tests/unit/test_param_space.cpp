#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "geocode/error.hpp"
#include "geocode/param_space.hpp"
#include "geocode/programs.hpp"

using namespace geocode;
using namespace geocode::params;

namespace {

// c: continuous [0.2, 0.8] on 3 points; d: discrete 2..6; flag gates arm.
ParameterSchema toy_schema() {
  return ParameterSchema(
      "toy",
      {ParameterSpec::continuous("c", 0.2, 0.8, 3, 0.5, "body"), ParameterSpec::discrete("d", 2, 6, 4, "body"),
       ParameterSpec::boolean("flag", true, "arm"),
       ParameterSpec::continuous("arm_len", 0.0, 1.0, 4, grid_value(0.0, 1.0, 4, 1), "arm").invisible()},
      {{"flag", CompareOp::eq, 0.0, {"arm_len"}}});
}

ParameterVector vec(std::initializer_list<ParamValue> v) { return ParameterVector{std::vector<ParamValue>(v)}; }

}  // namespace

TEST(Schema, ClassCounts) {
  const auto s = toy_schema();
  EXPECT_EQ(s.spec(0).class_count(), 3);
  EXPECT_EQ(s.spec(1).class_count(), 5);
  EXPECT_EQ(s.spec(2).class_count(), 2);
  EXPECT_EQ(s.spec(3).class_count(), 5);  // 4 grid values + existence
  EXPECT_EQ(s.encoding_length(), 15u);
}

TEST(Schema, RejectsBadDeclarations) {
  using PS = ParameterSpec;
  EXPECT_THROW(ParameterSchema("x", {PS::continuous("a", 0, 1, 2, 0, "p"), PS::continuous("a", 0, 1, 2, 0, "p")}, {}),
               ValidationError);
  EXPECT_THROW(ParameterSchema("x", {PS::continuous("a", 1, 0, 2, 0.5, "p")}, {}), ValidationError);
  EXPECT_THROW(ParameterSchema("x", {PS::continuous("a", 0, 1, 1, 0, "p")}, {}), ValidationError);
  EXPECT_THROW(ParameterSchema("x", {PS::boolean("a", true, "p")}, {{"a", CompareOp::eq, 0, {"ghost"}}}),
               ValidationError);
  // a hides b, b hides a
  EXPECT_THROW(ParameterSchema("x",
                               {PS::discrete("a", 0, 2, 1, "p").invisible(), PS::discrete("b", 0, 2, 1, "p").invisible()},
                               {{"a", CompareOp::eq, 0, {"b"}}, {"b", CompareOp::eq, 0, {"a"}}}),
               ValidationError);
}

TEST(Normalize, SpecExamples) {
  const auto s = toy_schema();
  const auto n = normalize(vec({0.5, std::int64_t{4}, true, grid_value(0.0, 1.0, 4, 2)}), s);
  EXPECT_DOUBLE_EQ(n.values[0], 0.5);
  EXPECT_EQ(n.values[1], 2.0);
  EXPECT_EQ(n.values[2], 1.0);
  EXPECT_NEAR(n.values[3], 2.0 / 3.0, 1e-15);

  const auto hidden = normalize(vec({0.5, std::int64_t{4}, false, existence_label}), s);
  EXPECT_EQ(hidden.values[3], kNormalizedLabel);
}

TEST(Normalize, OutOfRangeRejected) {
  const auto s = toy_schema();
  EXPECT_THROW(normalize(vec({0.9, std::int64_t{4}, true, 0.0}), s), ValidationError);
  EXPECT_THROW(normalize(vec({0.5, std::int64_t{7}, true, 0.0}), s), ValidationError);
}

TEST(Denormalize, SpecExamples) {
  const auto s = toy_schema();
  const auto v = denormalize(NormalizedVector{{0.0, 0.0, 0.0, kNormalizedLabel}}, s);
  EXPECT_DOUBLE_EQ(std::get<double>(v.values[0]), 0.2);
  EXPECT_EQ(std::get<std::int64_t>(v.values[1]), 2);
  EXPECT_TRUE(is_hidden(v.values[3]));
  EXPECT_THROW(denormalize(NormalizedVector{{1.5, 0.0, 0.0, 0.0}}, s), ValidationError);
  EXPECT_THROW(denormalize(NormalizedVector{{0.5, 0.5, 0.0, 0.0}}, s), ValidationError);
}

TEST(Denormalize, RoundTripRandomVectors) {
  const auto& chair = *programs::chair_schema();
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    // Off-grid continuous values exercise the pure linear maps.
    auto v = testing_support::random_vector(chair, rng);
    for (std::size_t k = 0; k < chair.size(); ++k) {
      const auto& sp = chair.spec(k);
      if (sp.kind == ParamKind::continuous && !is_hidden(v.values[k])) v.values[k] = rng.uniform(sp.min, sp.max);
    }
    const auto back = denormalize(normalize(v, chair), chair);
    for (std::size_t k = 0; k < chair.size(); ++k) {
      if (chair.spec(k).kind == ParamKind::continuous && !is_hidden(v.values[k]))
        EXPECT_NEAR(std::get<double>(back.values[k]), std::get<double>(v.values[k]), 1e-12);
      else
        EXPECT_EQ(back.values[k], v.values[k]);
    }
  }
}

TEST(Canonicalize, HidesArmrests) {
  const auto& chair = *programs::chair_schema();
  auto v = programs::default_params("chair");
  v.values[chair.require("armrests_exist")] = false;
  const auto c = canonicalize(v, chair);
  EXPECT_TRUE(is_hidden(c.values[chair.require("armrest_height")]));
  EXPECT_TRUE(is_hidden(c.values[chair.require("armrest_thickness")]));
  EXPECT_FALSE(is_hidden(c.values[chair.require("seat_width")]));
  EXPECT_EQ(canonicalize(c, chair), c);
}

TEST(Canonicalize, NoRuleFiresLeavesVector) {
  const auto& chair = *programs::chair_schema();
  const auto v = programs::default_params("chair");
  ASSERT_TRUE(std::get<bool>(v.values[chair.require("armrests_exist")]));
  EXPECT_EQ(canonicalize(v, chair), v);
}

TEST(Canonicalize, VaseWithoutHandles) {
  const auto& vase = *programs::vase_schema();
  auto v = programs::default_params("vase");
  v.values[vase.require("handle_count")] = std::int64_t{0};
  const auto c = canonicalize(v, vase);
  for (const char* n : {"handle_attach_low", "handle_attach_high", "handle_thickness"})
    EXPECT_TRUE(is_hidden(c.values[vase.require(n)])) << n;
}

TEST(Canonicalize, Idempotent) {
  const auto& chair = *programs::chair_schema();
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    ParameterVector v = testing_support::random_vector(chair, rng);
    EXPECT_EQ(canonicalize(canonicalize(v, chair), chair), v);
    EXPECT_TRUE(is_canonical(v, chair));
  }
}

TEST(OneHot, SpecExamples) {
  const auto s = toy_schema();
  const auto e = encode_onehot(NormalizedVector{{0.5, 2.0, 1.0, 1.0 / 3.0}}, s);
  EXPECT_EQ(e.blocks[0], (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_EQ(e.blocks[1], (std::vector<std::uint8_t>{0, 0, 1, 0, 0}));
  EXPECT_EQ(e.blocks[2], (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(e.blocks[3], (std::vector<std::uint8_t>{0, 1, 0, 0, 0}));
  EXPECT_EQ(e.flatten().size(), s.encoding_length());

  const auto hidden = encode_onehot(NormalizedVector{{0.5, 2.0, 0.0, kNormalizedLabel}}, s);
  EXPECT_EQ(hidden.blocks[3], (std::vector<std::uint8_t>{0, 0, 0, 0, 1}));
  EXPECT_TRUE(is_hidden(decode_onehot(hidden, s).values[3]));
  EXPECT_EQ(std::get<std::int64_t>(decode_onehot(e, s).values[1]), 4);
}

TEST(OneHot, OffGridAndBadBlocks) {
  const auto s = toy_schema();
  EXPECT_THROW(encode_onehot(NormalizedVector{{0.3, 2.0, 1.0, 0.0}}, s), ValidationError);
  auto e = encode_onehot(NormalizedVector{{0.5, 2.0, 1.0, 0.0}}, s);
  e.blocks[1] = {0, 1, 1, 0, 0};
  EXPECT_THROW(decode_onehot(e, s), ValidationError);
  e.blocks[1] = {0, 0, 0, 0, 0};
  EXPECT_THROW(decode_onehot(e, s), ValidationError);
}

TEST(OneHot, RoundTripExhaustiveToy) {
  // one 3-class discrete, one boolean: all 6 combinations
  const ParameterSchema s("pair", {ParameterSpec::discrete("k", 0, 2, 0, "a"), ParameterSpec::boolean("b", false, "a")},
                          {});
  for (std::int64_t k = 0; k <= 2; ++k)
    for (bool b : {false, true}) {
      const auto v = vec({k, b});
      EXPECT_EQ(decode_onehot(encode_onehot(normalize(v, s), s), s), v);
    }
}

TEST(OneHot, RoundTripChairGrid) {
  const auto& chair = *programs::chair_schema();
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto v = testing_support::random_vector(chair, rng);
    EXPECT_EQ(decode_onehot(encode_onehot(normalize(v, chair), chair), chair), v);
  }
}

TEST(Interpolate, Endpoints) {
  const auto& chair = *programs::chair_schema();
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto a = testing_support::random_vector(chair, rng);
    const auto b = testing_support::random_vector(chair, rng);
    EXPECT_EQ(interpolate(a, b, 0.0, chair), a);
    EXPECT_EQ(interpolate(a, b, 1.0, chair), b);
    for (double alpha : {0.2, 0.5, 0.8}) EXPECT_EQ(interpolate(a, a, alpha, chair), a);
  }
}

TEST(Interpolate, ContinuousMidpoint) {
  const auto s = toy_schema();
  const auto r = interpolate(vec({0.2, std::int64_t{2}, true, 0.0}), vec({0.6, std::int64_t{2}, true, 0.0}), 0.5, s);
  EXPECT_NEAR(std::get<double>(r.values[0]), 0.4, 1e-15);
}

TEST(Interpolate, DiscreteRoundHalfEven) {
  const auto& chair = *programs::chair_schema();
  const auto idx = chair.require("cross_rail_count");
  auto a = programs::default_params("chair");
  auto b = a;
  a.values[idx] = std::int64_t{1};
  b.values[idx] = std::int64_t{4};
  // blend 1 + 3 alpha, ties to even at 2.5
  const std::int64_t expected[] = {1, 2, 2, 3, 3, 4};
  for (int j = 0; j <= 5; ++j) {
    const double alpha = j * 0.2;
    const auto r = interpolate(a, b, alpha, chair);
    EXPECT_EQ(std::get<std::int64_t>(r.values[idx]), expected[j]) << alpha;
  }
  EXPECT_EQ(std::get<std::int64_t>(interpolate(a, b, 0.5, chair).values[idx]), 2);
  EXPECT_EQ(round_half_even(2.5), 2);
  EXPECT_EQ(round_half_even(3.5), 4);
  EXPECT_EQ(round_half_even(-0.5), 0);
}

TEST(Interpolate, BooleanAndExistenceSwitchAtHalf) {
  const auto& chair = *programs::chair_schema();
  auto a = programs::default_params("chair");
  auto b = a;
  b.values[chair.require("armrests_exist")] = false;
  b = canonicalize(b, chair);
  const auto h = chair.require("armrest_height");
  EXPECT_FALSE(is_hidden(interpolate(a, b, 0.49, chair).values[h]));
  EXPECT_TRUE(is_hidden(interpolate(a, b, 0.5, chair).values[h]));
}

TEST(Interpolate, Errors) {
  const auto s = toy_schema();
  const auto a = default_vector(s);
  EXPECT_THROW(interpolate(a, a, 1.5, s), ValidationError);
  EXPECT_THROW(interpolate(a, vec({0.5}), 0.5, s), ValidationError);
}

TEST(Mix, EmptyAndTotalSelection) {
  const auto& chair = *programs::chair_schema();
  Rng rng(8);
  const auto src = testing_support::random_vector(chair, rng);
  const auto donor = testing_support::random_vector(chair, rng);
  EXPECT_EQ(mix(src, donor, {}, chair), src);
  std::vector<std::string> all;
  for (const auto& sp : chair.specs()) all.push_back(sp.name);
  EXPECT_EQ(mix(src, donor, all, chair), donor);
}

TEST(Mix, HandlesAddedFromDonor) {
  const auto& vase = *programs::vase_schema();
  auto src = programs::default_params("vase");
  ASSERT_EQ(std::get<std::int64_t>(src.values[vase.require("handle_count")]), 0);
  auto donor = src;
  donor.values[vase.require("handle_count")] = std::int64_t{2};
  donor.values[vase.require("handle_attach_low")] = vase.spec(vase.require("handle_attach_low")).min;
  donor.values[vase.require("handle_attach_high")] = vase.spec(vase.require("handle_attach_high")).max;
  donor.values[vase.require("handle_thickness")] = vase.spec(vase.require("handle_thickness")).max;
  donor = canonicalize(donor, vase);
  const std::vector<std::string> group{"handle_count", "handle_attach_low", "handle_attach_high", "handle_thickness"};
  const auto r = mix(src, donor, group, vase);
  for (const auto& n : group) EXPECT_EQ(r.values[vase.require(n)], donor.values[vase.require(n)]) << n;
  EXPECT_EQ(r.values[vase.require("body_height")], src.values[vase.require("body_height")]);
}

TEST(Mix, SelectionMustBeClosed) {
  const auto& vase = *programs::vase_schema();
  const auto v = programs::default_params("vase");
  const std::vector<std::string> open{"handle_thickness"};
  EXPECT_THROW(mix(v, v, open, vase), ValidationError);
  const std::vector<std::string> unknown{"handle_colour"};
  EXPECT_THROW(mix(v, v, unknown, vase), ValidationError);
}

TEST(Mix, DisjointSelectionsCommute) {
  const auto& chair = *programs::chair_schema();
  Rng rng(21);
  const std::vector<std::string> g1{"armrests_exist", "armrest_height", "armrest_thickness"};
  const std::vector<std::string> g2{"seat_width", "cross_rail_count", "is_swivel", "leg_thickness"};
  for (int i = 0; i < 30; ++i) {
    const auto src = testing_support::random_vector(chair, rng);
    const auto d1 = testing_support::random_vector(chair, rng);
    const auto d2 = testing_support::random_vector(chair, rng);
    EXPECT_EQ(mix(mix(src, d1, g1, chair), d2, g2, chair), mix(mix(src, d2, g2, chair), d1, g1, chair));
  }
}

TEST(Json, VectorRoundTripAndLabel) {
  const auto& chair = *programs::chair_schema();
  auto v = programs::default_params("chair");
  v.values[chair.require("armrests_exist")] = false;
  v = canonicalize(v, chair);
  const auto doc = to_json(v, chair);
  EXPECT_EQ(doc["armrest_height"].get<double>(), -1.0);
  EXPECT_EQ(vector_from_json(doc, chair), v);
  EXPECT_THROW(vector_from_json(nlohmann::json{{"seat_hight", 0.5}}, chair, true), ValidationError);
  EXPECT_THROW(vector_from_json(nlohmann::json{{"seat_width", 0.5}}, chair, false), ValidationError);
}

TEST(Json, SchemaDocumentListsSpecsAndRules) {
  const auto doc = schema_to_json(*programs::chair_schema());
  EXPECT_EQ(doc["id"], "chair");
  EXPECT_EQ(doc["params"].size(), 18u);
  EXPECT_EQ(doc["visibility_rules"].size(), 2u);
}

TEST(Hash, KeyDistinguishesVectors) {
  const auto& chair = *programs::chair_schema();
  auto a = programs::default_params("chair");
  auto b = a;
  b.values[chair.require("seat_width")] = chair.spec(chair.require("seat_width")).max;
  EXPECT_NE(canonical_key(a), canonical_key(b));
  EXPECT_NE(vector_hash(a), vector_hash(b));
  EXPECT_EQ(vector_hash(a), vector_hash(programs::default_params("chair")));
}
