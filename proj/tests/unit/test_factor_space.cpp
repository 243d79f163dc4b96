#include <gtest/gtest.h>

#include <set>

#include "../support/expect_errc.hpp"
#include "../support/spaces.hpp"
#include "biasforge/factor_space.hpp"
#include "biasforge/samplers.hpp"

using namespace biasforge;
using namespace bftest;

TEST(FactorSpace, RoutesDimensionsByKindInOrder) {
  const FactorSpace s = reference_space(10);
  ASSERT_EQ(s.visual_dims().size(), 2u);
  ASSERT_EQ(s.context_dims().size(), 3u);
  EXPECT_EQ(s.visual_dims()[0].name, "color");
  EXPECT_EQ(s.visual_dims()[1].name, "camera_pose");
  EXPECT_EQ(s.context_dims()[0].name, "position");
  EXPECT_TRUE(s.is_visual("color"));
  EXPECT_TRUE(s.is_context("shape"));
  EXPECT_FALSE(s.is_visual("shape"));
  EXPECT_EQ(s.find("nope"), nullptr);
  EXPECT_ERRC(s.at("nope"), Errc::MissingDimension);
  EXPECT_EQ(s.dimension_with(PayloadKind::shape)->name, "shape");
}

TEST(FactorSpace, Baselines) {
  const FactorSpace s = reference_space(0);
  const auto vb = visual_baselines(s);
  EXPECT_EQ(vb.at("color"), "red");
  EXPECT_EQ(vb.at("camera_pose"), "ring1_cam0");
  const auto cb = context_baseline(s);
  EXPECT_EQ(cb.at("position"), "p0");
  EXPECT_EQ(cb.at("shape"), "cube");
  EXPECT_EQ(cb.at("instruction"), "i0");
}

TEST(FactorSpace, Validation) {
  auto shape = shape_dim({"cube", "sphere"});
  auto empty = shape;
  empty.values.clear();
  EXPECT_ERRC(build_space({empty}), Errc::EmptyDimension);

  auto bad_base = shape;
  bad_base.baseline_index = 5;
  EXPECT_ERRC(build_space({bad_base}), Errc::BadBaselineIndex);

  auto dup_value = shape;
  dup_value.values.push_back(dup_value.values[0]);
  EXPECT_ERRC(build_space({dup_value}), Errc::DuplicateValueId);

  EXPECT_ERRC(build_space({shape, shape}), Errc::DuplicateDimensionName);

  auto mixed = shape;
  mixed.values.push_back({"x", "x", InstructionPayload{"do it"}});
  EXPECT_ERRC(build_space({mixed}), Errc::InvalidPayload);

  auto color = synthetic_colors("color", 2);
  std::get<ColorPayload>(color.values[1].payload).rgb.g = 300;
  EXPECT_ERRC(build_space({color}), Errc::InvalidPayload);

  auto other_shape = shape_dim({"a"});
  other_shape.name = "shape2";
  EXPECT_ERRC(build_space({shape, other_shape}), Errc::InvalidPayload);

  auto scale = make_dimension(distance_level_sampler("dist", 0.05, 2), DimensionKind::visual, "d0");
  std::get<ScaleLevelPayload>(scale.values[1].payload).step_m = 0.0;
  EXPECT_ERRC(build_space({scale}), Errc::InvalidPayload);
}

TEST(Samplers, IdsAndCounts) {
  const auto colors = named_color_sampler("color").generate();
  EXPECT_EQ(colors.size(), 141u);
  const auto euler = euler_grid_sampler("e", 6).generate();
  ASSERT_EQ(euler.size(), 9u);
  EXPECT_EQ(euler[0].id, "y-6_p-6");
  EXPECT_EQ(euler[4].id, "y+0_p+0");
  EXPECT_EQ(euler[8].id, "y+6_p+6");
  const auto dist = distance_level_sampler("d", 0.05, 8).generate();
  ASSERT_EQ(dist.size(), 9u);
  EXPECT_EQ(dist.back().id, "d8");
  const auto poses = pose_dim().values;
  ASSERT_EQ(poses.size(), 21u);
  EXPECT_EQ(poses[0].id, "ring0_cam0");
  EXPECT_EQ(poses[20].id, "ring2_cam6");
  const auto grid = grid_position_sampler("p", {0, 0, 0}, 0.1, 0.2, 2, 3).generate();
  ASSERT_EQ(grid.size(), 6u);
  const auto& p5 = std::get<PositionPayload>(grid[5].payload).xyz;
  EXPECT_NEAR(p5.x, 0.1, 1e-12);  // row 1
  EXPECT_NEAR(p5.y, 0.4, 1e-12);  // col 2
  EXPECT_ERRC(make_dimension(euler_grid_sampler("e"), DimensionKind::visual, "nope"), Errc::BadBaselineIndex);
}

TEST(Samplers, DeterministicAcrossCalls) {
  const auto s = orbit_camera_sampler("cam", {0.5, 0, 0}, {{0.4, 0.5}}, 5, 10);
  EXPECT_EQ(s.generate(), s.generate());
}

TEST(FactorSpaceIo, RoundTripThroughJson) {
  const FactorSpace s = reference_space(12);
  const std::string text = serialize_space(s);
  const FactorSpace back = parse_space(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(serialize_space(back), text);
}

TEST(FactorSpaceIo, ShippedExampleSpace) {
  const FactorSpace s = load_space(BIASFORGE_DATA_DIR "/example_space.json");
  EXPECT_EQ(s.at("color").values.size(), 141u);
  EXPECT_EQ(s.at("camera_pose").values.size(), 21u);
  EXPECT_EQ(s.at("camera_euler").values.size(), 9u);
  EXPECT_EQ(s.at("dist_scale").values.size(), 9u);
  EXPECT_EQ(s.at("position").values.size(), 4u);
  EXPECT_EQ(s.at("shape").values.size(), 4u);
  EXPECT_EQ(s.at("instruction").values.size(), 3u);
  EXPECT_EQ(parse_space(serialize_space(s)), s);
}

TEST(FactorSpaceIo, SchemaErrorsNameTheField) {
  EXPECT_ERRC(parse_space("{"), Errc::SchemaError);
  EXPECT_ERRC(parse_space(R"({"format":"biasforge/factorspace/v2","visual_dims":[],"context_dims":[]})"),
              Errc::UnsupportedFormat);
  EXPECT_ERRC(parse_space(R"({"format":"other/factorspace/v1","visual_dims":[],"context_dims":[]})"),
              Errc::UnsupportedFormat);
  try {
    parse_space(R"({"format":"biasforge/factorspace/v1","visual_dims":[
      {"name":"shape","kind":"visual","baseline":"a","values":[{"id":"a"}]}],"context_dims":[]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaError);
    EXPECT_NE(std::string(e.what()).find("visual_dims[0]"), std::string::npos) << e.what();
  }
  EXPECT_ERRC(parse_space(R"({"format":"biasforge/factorspace/v1","visual_dims":[
      {"name":"c","kind":"context","baseline":"a","values":[{"id":"a","shape":{"label":"a"}}]}],"context_dims":[]})"),
              Errc::SchemaError);
  EXPECT_ERRC(parse_space(R"({"format":"biasforge/factorspace/v1","visual_dims":[
      {"name":"c","kind":"visual","baseline":"zzz","sampler":{"type":"euler_grid"}}],"context_dims":[]})"),
              Errc::BadBaselineIndex);
  EXPECT_ERRC(load_space("/nonexistent/space.json"), Errc::IoError);
}
