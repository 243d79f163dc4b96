#include "biasforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "biasforge/error.hpp"

namespace biasforge {

std::map<std::string, SuccessTable> build_success_tables(std::span<const TrialRecord> trials) {
  if (trials.empty()) throw Error(Errc::EmptyLog, "trial log has no records");
  std::map<std::string, SuccessTable> tables;
  std::set<std::tuple<std::string_view, std::string_view, std::int64_t>> keys;
  for (const TrialRecord& t : trials) {
    if (!keys.emplace(t.instance_id, t.agent_id, t.repetition).second) {
      throw Error(Errc::DuplicateTrialKey, "repeated trial (" + t.instance_id + ", " + t.agent_id +
                                               ", " + std::to_string(t.repetition) + ")");
    }
    SuccessTable& table = tables[t.agent_id];
    table.agent_id = t.agent_id;
    Tally& cell = table.cells[CellKey{t.varied, t.context_key}];
    ++cell.trials;
    if (t.success) ++cell.successes;
  }
  return tables;
}

RateTable rates(const SuccessTable& table) {
  RateTable out;
  for (const auto& [key, tally] : table.cells) out.emplace(key, tally.rate());
  return out;
}

namespace {

bool varies_exactly(const Assignment& varied, std::initializer_list<std::string_view> dims) {
  if (varied.size() != dims.size()) return false;
  for (std::string_view d : dims) {
    if (varied.find(std::string(d)) == varied.end()) return false;
  }
  return true;
}

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& values) {
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) defined.push_back(*v);
  }
  if (defined.empty()) return std::nullopt;
  return sorted_sum(defined) / static_cast<double>(defined.size());
}

// group key -> SR values of `dim_i`, where the group is the context plus the
// value of `dim_j` (empty for single-dimension cells).
std::map<std::pair<std::string, std::string>, std::vector<double>> group_by_context(
    const RateTable& table, std::string_view dim_i, std::string_view dim_j) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& [key, sr] : table) {
    const bool match = dim_j.empty() ? varies_exactly(key.varied, {dim_i})
                                     : varies_exactly(key.varied, {dim_i, dim_j});
    if (!match) continue;
    const std::string vj = dim_j.empty() ? std::string() : key.varied.at(std::string(dim_j));
    groups[{key.context_key, vj}].push_back(sr);
  }
  return groups;
}

}  // namespace

RateTable slice(const RateTable& table, std::initializer_list<std::string_view> dims) {
  RateTable out;
  for (const auto& [key, sr] : table) {
    if (varies_exactly(key.varied, dims)) out.emplace(key, sr);
  }
  return out;
}

MeanStd population_mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  out.mean = sum / n;
  if (sorted.front() == sorted.back()) {
    out.mean = sorted.front();
    return out;
  }
  std::vector<double> sq;
  sq.reserve(sorted.size());
  for (double v : sorted) sq.push_back((v - out.mean) * (v - out.mean));
  out.stddev = std::sqrt(sorted_sum(std::move(sq)) / n);
  return out;
}

double mean_success_rate(const RateTable& table) {
  if (table.empty()) throw Error(Errc::EmptyTable, "no success-rate cells");
  std::vector<double> srs;
  srs.reserve(table.size());
  for (const auto& [_, sr] : table) srs.push_back(sr);
  return 100.0 * population_mean_std(srs).mean;
}

std::optional<double> ccv_of(std::span<const double> srs, const MetricConfig& cfg) {
  if (srs.size() < 2) {
    throw Error(Errc::InsufficientValues, "conditional CV needs at least two values, got " +
                                              std::to_string(srs.size()));
  }
  if (std::all_of(srs.begin(), srs.end(), [](double v) { return v == 0.0; })) {
    if (cfg.degenerate_policy == DegeneratePolicy::report_na) return std::nullopt;
    return 0.0;
  }
  const MeanStd s = population_mean_std(srs);
  return 100.0 * s.stddev / (s.mean + cfg.epsilon);
}

std::optional<double> conditional_cv(const RateTable& table, std::string_view dim,
                                     std::string_view context_key, const MetricConfig& cfg) {
  std::vector<double> srs;
  for (const auto& [key, sr] : table) {
    if (key.context_key == context_key && varies_exactly(key.varied, {dim})) srs.push_back(sr);
  }
  return ccv_of(srs, cfg);
}

std::optional<double> bias_coefficient(const RateTable& table, std::string_view dim,
                                       const MetricConfig& cfg) {
  std::vector<std::optional<double>> per_context;
  for (const auto& [group, srs] : group_by_context(table, dim, {})) {
    per_context.push_back(ccv_of(srs, cfg));
  }
  return mean_of_defined(per_context);
}

std::optional<double> factorial_bias(const RateTable& table, std::string_view dim_i,
                                     std::string_view dim_j, const MetricConfig& cfg) {
  const auto groups = group_by_context(table, dim_i, dim_j);
  if (groups.empty()) {
    throw Error(Errc::InsufficientFactorialData, "no factorial cells for (" + std::string(dim_i) +
                                                     ", " + std::string(dim_j) + ")");
  }
  std::vector<std::optional<double>> per_group;
  for (const auto& [group, srs] : groups) {
    if (srs.size() < 2) {
      throw Error(Errc::InsufficientFactorialData,
                  "fewer than two values of '" + std::string(dim_i) + "' at " +
                      std::string(dim_j) + "=" + group.second);
    }
    per_group.push_back(ccv_of(srs, cfg));
  }
  return mean_of_defined(per_group);
}

std::optional<double> interaction_effect(const RateTable& table, std::string_view dim_i,
                                         std::string_view dim_j, const MetricConfig& cfg) {
  const auto groups = group_by_context(table, dim_i, dim_j);
  if (groups.empty()) {
    throw Error(Errc::InsufficientFactorialData, "no factorial cells for (" + std::string(dim_i) +
                                                     ", " + std::string(dim_j) + ")");
  }
  // context -> CCV(V_i | v_j, c) for each v_j with a defined CCV
  std::map<std::string, std::vector<double>> inner;
  for (const auto& [group, srs] : groups) {
    if (srs.size() < 2) {
      throw Error(Errc::InsufficientFactorialData,
                  "fewer than two values of '" + std::string(dim_i) + "' at " +
                      std::string(dim_j) + "=" + group.second);
    }
    auto& bucket = inner[group.first];
    if (auto ccv = ccv_of(srs, cfg)) bucket.push_back(*ccv);
  }
  std::vector<std::optional<double>> per_context;
  for (const auto& [context, ccvs] : inner) {
    if (ccvs.size() < 2) {
      per_context.push_back(std::nullopt);
      continue;
    }
    const MeanStd s = population_mean_std(ccvs);
    per_context.push_back(s.stddev == 0.0 ? 0.0 : 100.0 * s.stddev / s.mean);
  }
  return mean_of_defined(per_context);
}

std::map<std::string, double> color_category_summary(const RateTable& table,
                                                     const FactorDimension& color_dim,
                                                     const ColorCategorizer& categorizer) {
  std::map<std::string, std::vector<double>> buckets;
  for (const auto& [key, sr] : table) {
    if (!varies_exactly(key.varied, {color_dim.name})) continue;
    const std::string& id = key.varied.begin()->second;
    const FactorValue* v = color_dim.find(id);
    const auto* color = v == nullptr ? nullptr : std::get_if<ColorPayload>(&v->payload);
    if (color == nullptr) {
      throw Error(Errc::UncategorizedColor, "'" + id + "' is not a color of '" + color_dim.name + "'");
    }
    std::string category = categorizer(color->rgb);
    if (category.empty()) {
      throw Error(Errc::UncategorizedColor, "no category for color '" + id + "'");
    }
    buckets[std::move(category)].push_back(sr);
  }
  std::map<std::string, double> out;
  for (const auto& [category, srs] : buckets) {
    out.emplace(category, 100.0 * population_mean_std(srs).mean);
  }
  return out;
}

}  // namespace biasforge
