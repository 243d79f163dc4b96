#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biasforge/context_builder.hpp"
#include "biasforge/factor_space.hpp"
#include "biasforge/metrics.hpp"
#include "biasforge/report.hpp"
#include "biasforge/trial_log.hpp"

namespace biasforge {

struct ValueRef {
  std::string dim;
  std::string value;

  friend auto operator<=>(const ValueRef&, const ValueRef&) = default;
  friend bool operator==(const ValueRef&, const ValueRef&) = default;
};

/// Ground-truth success probability:
///   p = logistic(base_logit + sum of main effects of bound values
///                + sum of interaction effects whose two values are both bound)
struct PlantedBiasModel {
  double base_logit = 0.0;
  std::map<ValueRef, double> main_effects;
  std::map<std::pair<ValueRef, ValueRef>, double> interaction_effects;
};

/// Throws UnknownValue when the model references a dimension or value the
/// space does not declare.
void validate_model(const PlantedBiasModel& model, const FactorSpace& space);

double logistic(double x);

/// Throws UnknownValue when the assignment lacks a dimension the model uses.
double success_probability(const PlantedBiasModel& model, const Assignment& assignment);

struct SimRunSpec {
  PlantedBiasModel model;
  std::vector<TaskInstance> subspace;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  std::string agent_id = "planted";
  unsigned threads = 1;
};

/// Uniform in [0, 1) that depends only on (seed, instance_id, repetition).
double trial_uniform(std::uint64_t seed, std::string_view instance_id, std::int64_t repetition);

/// One Bernoulli(p) record per instance and repetition, sorted by
/// (instance_id, repetition). Independent of `threads`.
std::vector<TrialRecord> simulate_trials(const SimRunSpec& spec);

/// SR(v, c) replaced by the true probability of each instance.
RateTable analytic_rates(const PlantedBiasModel& model, const std::vector<TaskInstance>& subspace);

/// The infinite-repetition report: metrics evaluated on analytic_rates.
BiasReport analytic_metrics(const PlantedBiasModel& model,
                            const std::vector<TaskInstance>& subspace, const FactorSpace& space,
                            const MetricConfig& cfg);

/// {"base_logit", "main_effects":[{dim,value,logit}],
///  "interactions":[{"a":{dim,value},"b":{dim,value},"logit"}]}
PlantedBiasModel parse_model(std::string_view json_text);
std::string serialize_model(const PlantedBiasModel& model);

}  // namespace biasforge
