#include "biasforge/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "biasforge/error.hpp"
#include "json_util.hpp"

namespace biasforge {

using detail::json;
using detail::ordered_json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void check_ref(const ValueRef& ref, const FactorSpace& space) {
  const FactorDimension* d = space.find(ref.dim);
  if (d == nullptr) throw Error(Errc::UnknownValue, "model references unknown dimension '" + ref.dim + "'");
  if (d->find(ref.value) == nullptr) {
    throw Error(Errc::UnknownValue,
                "model references unknown value '" + ref.value + "' of '" + ref.dim + "'");
  }
}

bool bound(const Assignment& a, const ValueRef& ref) {
  auto it = a.find(ref.dim);
  if (it == a.end()) {
    throw Error(Errc::UnknownValue, "assignment lacks model dimension '" + ref.dim + "'");
  }
  return it->second == ref.value;
}

ValueRef ref_from(const json& j, const std::string& path) {
  return {detail::require_string(j, "dim", path), detail::require_string(j, "value", path)};
}

}  // namespace

void validate_model(const PlantedBiasModel& model, const FactorSpace& space) {
  for (const auto& [ref, _] : model.main_effects) check_ref(ref, space);
  for (const auto& [pair, _] : model.interaction_effects) {
    check_ref(pair.first, space);
    check_ref(pair.second, space);
  }
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double success_probability(const PlantedBiasModel& model, const Assignment& assignment) {
  double logit = model.base_logit;
  for (const auto& [ref, effect] : model.main_effects) {
    if (bound(assignment, ref)) logit += effect;
  }
  for (const auto& [pair, effect] : model.interaction_effects) {
    const bool a = bound(assignment, pair.first);
    const bool b = bound(assignment, pair.second);
    if (a && b) logit += effect;
  }
  return logistic(logit);
}

double trial_uniform(std::uint64_t seed, std::string_view instance_id, std::int64_t repetition) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a(instance_id));
  h = splitmix64(h ^ static_cast<std::uint64_t>(repetition));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<TrialRecord> simulate_trials(const SimRunSpec& spec) {
  if (spec.repetitions == 0) throw Error(Errc::InvalidSpec, "repetitions must be >= 1");
  const std::size_t n = spec.subspace.size();
  std::vector<double> probability(n);
  for (std::size_t i = 0; i < n; ++i) {
    probability[i] = success_probability(spec.model, spec.subspace[i].full_assignment());
  }

  std::vector<TrialRecord> out(n * spec.repetitions);
  auto work = [&](std::size_t worker, std::size_t workers) {
    for (std::size_t i = worker; i < n; i += workers) {
      const TaskInstance& inst = spec.subspace[i];
      const std::string context_key = inst.eval_context.key();
      for (std::size_t r = 0; r < spec.repetitions; ++r) {
        TrialRecord& rec = out[i * spec.repetitions + r];
        rec.instance_id = inst.instance_id;
        rec.agent_id = spec.agent_id;
        rec.repetition = static_cast<std::int64_t>(r);
        rec.success = trial_uniform(spec.seed, inst.instance_id, rec.repetition) < probability[i];
        rec.varied = inst.varied;
        rec.context_key = context_key;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, spec.threads);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  std::sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.instance_id, a.repetition) < std::tie(b.instance_id, b.repetition);
  });
  return out;
}

RateTable analytic_rates(const PlantedBiasModel& model, const std::vector<TaskInstance>& subspace) {
  RateTable out;
  for (const TaskInstance& inst : subspace) {
    out[CellKey{inst.varied, inst.eval_context.key()}] =
        success_probability(model, inst.full_assignment());
  }
  return out;
}

BiasReport analytic_metrics(const PlantedBiasModel& model,
                            const std::vector<TaskInstance>& subspace, const FactorSpace& space,
                            const MetricConfig& cfg) {
  BiasReport report;
  report.config = cfg;
  report.agents.push_back(analyze_rates(analytic_rates(model, subspace), space, cfg, "analytic"));
  return report;
}

PlantedBiasModel parse_model(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "model");
  if (doc.contains("format")) detail::check_format(doc, "biasforge/model/v1", "$");
  PlantedBiasModel m;
  m.base_logit = detail::require_number(doc, "base_logit", "$");
  if (doc.contains("main_effects")) {
    const json& list = doc.at("main_effects");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "$.main_effects[" + std::to_string(i) + "]";
      m.main_effects[ref_from(list[i], path)] += detail::require_number(list[i], "logit", path);
    }
  }
  if (doc.contains("interactions")) {
    const json& list = doc.at("interactions");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "$.interactions[" + std::to_string(i) + "]";
      const ValueRef a = ref_from(detail::require(list[i], "a", path), path + ".a");
      const ValueRef b = ref_from(detail::require(list[i], "b", path), path + ".b");
      if (a.dim == b.dim) {
        throw Error(Errc::InvalidSpec, path + ": interaction must join two different dimensions");
      }
      m.interaction_effects[{a, b}] += detail::require_number(list[i], "logit", path);
    }
  }
  return m;
}

std::string serialize_model(const PlantedBiasModel& m) {
  ordered_json doc;
  doc["format"] = "biasforge/model/v1";
  doc["base_logit"] = m.base_logit;
  ordered_json main = ordered_json::array();
  for (const auto& [ref, logit] : m.main_effects) {
    main.push_back({{"dim", ref.dim}, {"value", ref.value}, {"logit", logit}});
  }
  doc["main_effects"] = std::move(main);
  ordered_json inter = ordered_json::array();
  for (const auto& [pair, logit] : m.interaction_effects) {
    inter.push_back({{"a", {{"dim", pair.first.dim}, {"value", pair.first.value}}},
                     {"b", {{"dim", pair.second.dim}, {"value", pair.second.value}}},
                     {"logit", logit}});
  }
  doc["interactions"] = std::move(inter);
  return doc.dump(2) + "\n";
}

}  // namespace biasforge
