#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/factor_space.hpp"
#include "biasforge/metrics.hpp"
#include "biasforge/trial_log.hpp"

namespace biasforge {

inline constexpr std::string_view kReportFormat = "biasforge/report/v1";

struct DimensionMetrics {
  std::string dim;
  double mu_sr = 0.0;
  std::optional<double> cv_sr;
  std::size_t cells = 0;
  std::size_t contexts = 0;

  friend bool operator==(const DimensionMetrics&, const DimensionMetrics&) = default;
};

/// Factorial (dim_i x dim_j) results: bias of each side and how the other modulates it.
struct PairMetrics {
  std::string dim_i;
  std::string dim_j;
  double mu_sr = 0.0;
  std::optional<double> cv_i;
  std::optional<double> iec_ij;
  std::optional<double> cv_j;
  std::optional<double> iec_ji;
  std::size_t cells = 0;

  friend bool operator==(const PairMetrics&, const PairMetrics&) = default;
};

struct AgentReport {
  std::string agent_id;
  std::size_t trials = 0;
  std::vector<DimensionMetrics> dims;
  std::vector<PairMetrics> pairs;
  std::map<std::string, double> color_categories;
  std::vector<std::string> warnings;

  friend bool operator==(const AgentReport&, const AgentReport&) = default;
};

struct BiasReport {
  MetricConfig config;
  std::vector<AgentReport> agents;
};

/// Metrics for one agent from SR cells. Dimensions follow the space's visual
/// order; a pair (i, j) is ordered by the same. Cells missing from a context
/// produce a warning, never an imputed value.
AgentReport analyze_rates(const RateTable& table, const FactorSpace& space,
                          const MetricConfig& cfg, std::string agent_id, std::size_t trials = 0);

/// Throws InconsistentLog when a record names dimensions or values outside
/// the space, or its instance_id does not match its assignment.
void validate_trials(std::span<const TrialRecord> trials, const FactorSpace& space);

/// validate_trials + build_success_tables + analyze_rates per agent.
BiasReport analyze_trials(std::span<const TrialRecord> trials, const FactorSpace& space,
                          const MetricConfig& cfg);

std::string format_percent(std::optional<double> value);

std::string report_json(const BiasReport& report);
BiasReport parse_report(std::string_view json_text);

/// rows = agents; SR/CV column pair per dimension plus the unweighted average.
std::string table1_csv(const BiasReport& report);
/// one row per (agent, pair): cv_i, iec_ij, cv_j, iec_ji.
std::string iec_csv(const BiasReport& report);
/// one row per (agent, color family).
std::string color_category_csv(const BiasReport& report);
/// rows = dim_i values, columns = dim_j values, cells = success counts summed
/// over contexts. Value order follows the space.
std::string heatmap_csv(const SuccessTable& table, const FactorSpace& space,
                        std::string_view dim_i, std::string_view dim_j);

/// Aligned text tables. With two or more agents, the lowest value in each CV
/// and IEC column is marked with '*'.
std::string render_text(const BiasReport& report);

}  // namespace biasforge
