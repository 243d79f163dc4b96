#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "../support/expect_errc.hpp"
#include "../support/spaces.hpp"
#include "biasforge/context_builder.hpp"
#include "biasforge/sim_harness.hpp"

using namespace biasforge;
using namespace bftest;

TEST(SimHarness, LogisticIsStable) {
  EXPECT_DOUBLE_EQ(logistic(0.0), 0.5);
  EXPECT_NEAR(logistic(2.0) + logistic(-2.0), 1.0, 1e-15);
  EXPECT_EQ(logistic(-1000.0), 0.0);
  EXPECT_EQ(logistic(1000.0), 1.0);
  EXPECT_FALSE(std::isnan(logistic(-800.0)));
}

TEST(SimHarness, SuccessProbabilitySumsBoundEffects) {
  PlantedBiasModel m;
  m.base_logit = 0.3;
  m.main_effects[{"color", "red"}] = 1.0;
  m.main_effects[{"color", "blue"}] = -5.0;
  m.interaction_effects[{{"color", "red"}, {"shape", "cube"}}] = -0.7;
  EXPECT_DOUBLE_EQ(success_probability(m, {{"color", "red"}, {"shape", "cube"}}), logistic(0.3 + 1.0 - 0.7));
  EXPECT_DOUBLE_EQ(success_probability(m, {{"color", "red"}, {"shape", "sphere"}}), logistic(1.3));
  EXPECT_DOUBLE_EQ(success_probability(m, {{"color", "green"}, {"shape", "cube"}}), logistic(0.3));
  EXPECT_ERRC(success_probability(m, {{"color", "red"}}), Errc::UnknownValue);
}

TEST(SimHarness, ValidateModelAgainstSpace) {
  const FactorSpace s = reference_space(0);
  PlantedBiasModel m;
  m.main_effects[{"color", "red"}] = 1.0;
  EXPECT_NO_THROW(validate_model(m, s));
  m.main_effects[{"color", "ultraviolet"}] = 1.0;
  EXPECT_ERRC(validate_model(m, s), Errc::UnknownValue);
  PlantedBiasModel n;
  n.interaction_effects[{{"nope", "x"}, {"color", "red"}}] = 1.0;
  EXPECT_ERRC(validate_model(n, s), Errc::UnknownValue);
}

TEST(SimHarness, UniformIsCounterBased) {
  EXPECT_EQ(trial_uniform(1, "abc", 0), trial_uniform(1, "abc", 0));
  EXPECT_NE(trial_uniform(1, "abc", 0), trial_uniform(2, "abc", 0));
  EXPECT_NE(trial_uniform(1, "abc", 0), trial_uniform(1, "abd", 0));
  EXPECT_NE(trial_uniform(1, "abc", 0), trial_uniform(1, "abc", 1));
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = trial_uniform(9, "x", i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(SimHarness, ThreadCountDoesNotChangeOutput) {
  const FactorSpace s = reference_space(20);
  PlantedBiasModel m;
  m.base_logit = 0.2;
  m.main_effects[{"camera_pose", "ring2_cam3"}] = -1.5;
  SimRunSpec spec{m, task_subspace(s, "camera_pose"), 7, 42, "p", 1};
  const auto one = simulate_trials(spec);
  spec.threads = 8;
  EXPECT_EQ(simulate_trials(spec), one);
  spec.threads = 3;
  EXPECT_EQ(simulate_trials(spec), one);
  EXPECT_EQ(one.size(), spec.subspace.size() * 7);
  EXPECT_TRUE(std::is_sorted(one.begin(), one.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.instance_id, a.repetition) < std::tie(b.instance_id, b.repetition);
  }));
  spec.repetitions = 0;
  EXPECT_ERRC(simulate_trials(spec), Errc::InvalidSpec);
}

TEST(SimHarness, AnalyticRatesAreTrueProbabilities) {
  const FactorSpace s = reference_space(5);
  PlantedBiasModel m;
  m.base_logit = -0.4;
  const auto insts = task_subspace(s, "color");
  const RateTable t = analytic_rates(m, insts);
  EXPECT_EQ(t.size(), insts.size());
  for (const auto& [k, p] : t) EXPECT_DOUBLE_EQ(p, logistic(-0.4));
  const BiasReport r = analytic_metrics(m, insts, s, {});
  EXPECT_EQ(r.agents[0].agent_id, "analytic");
  EXPECT_EQ(*r.agents[0].dims[0].cv_sr, 0.0);
}

TEST(SimHarness, ModelJsonRoundTrip) {
  PlantedBiasModel m;
  m.base_logit = 1.25;
  m.main_effects[{"color", "red"}] = -0.5;
  m.interaction_effects[{{"camera_pose", "ring0_cam0"}, {"color", "red"}}] = 2.0;
  const std::string text = serialize_model(m);
  const PlantedBiasModel back = parse_model(text);
  EXPECT_EQ(back.base_logit, m.base_logit);
  EXPECT_EQ(back.main_effects, m.main_effects);
  EXPECT_EQ(back.interaction_effects, m.interaction_effects);
  EXPECT_ERRC(parse_model(R"({"base_logit":0,"interactions":[{"a":{"dim":"c","value":"x"},"b":{"dim":"c","value":"y"},"logit":1}]})"),
              Errc::InvalidSpec);
  EXPECT_ERRC(parse_model(R"({"format":"biasforge/model/v3","base_logit":0})"), Errc::UnsupportedFormat);
}

TEST(SimHarness, ShippedModelMatchesShippedSpace) {
  std::ifstream in(BIASFORGE_DATA_DIR "/example_model.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NO_THROW(validate_model(parse_model(text), load_space(BIASFORGE_DATA_DIR "/example_space.json")));
}
