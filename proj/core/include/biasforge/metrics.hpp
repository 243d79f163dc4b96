#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/factor_space.hpp"
#include "biasforge/trial_log.hpp"

namespace biasforge {

enum class DegeneratePolicy { report_na, report_zero };

struct MetricConfig {
  /// Added to the CCV denominator; success rates are on the [0, 1] scale.
  double epsilon = 1e-6;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::report_na;
};

/// Success-rate cell: the varied value(s) and the canonical context key.
struct CellKey {
  Assignment varied;
  std::string context_key;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct Tally {
  std::int64_t successes = 0;
  std::int64_t trials = 0;

  double rate() const { return static_cast<double>(successes) / static_cast<double>(trials); }
  friend bool operator==(const Tally&, const Tally&) = default;
};

/// Per-agent success counts. Cells with zero trials are absent.
struct SuccessTable {
  std::string agent_id;
  std::map<CellKey, Tally> cells;
};

/// SR(v, c) per cell, on the [0, 1] scale. Built from a SuccessTable or, by
/// the simulation oracle, directly from true probabilities.
using RateTable = std::map<CellKey, double>;

/// Tallies per agent. Throws EmptyLog or DuplicateTrialKey.
std::map<std::string, SuccessTable> build_success_tables(std::span<const TrialRecord> trials);

RateTable rates(const SuccessTable& table);

/// Cells whose varied dimensions are exactly `dims`.
RateTable slice(const RateTable& table, std::initializer_list<std::string_view> dims);

// ---------------------------------------------------------------------------
// Metric functions. Percent outputs; std::nullopt renders as "N/A".

/// Unweighted mean of SR over every cell, x100. Throws EmptyTable.
double mean_success_rate(const RateTable& table);

/// sigma/(mu + eps) x100 over SR values (population sigma). All-zero input
/// yields nullopt under report_na and 0 under report_zero. Throws
/// InsufficientValues for fewer than two values.
std::optional<double> ccv_of(std::span<const double> srs, const MetricConfig& cfg);

/// CCV of `dim` at one context, over single-dimension cells.
std::optional<double> conditional_cv(const RateTable& table, std::string_view dim,
                                     std::string_view context_key, const MetricConfig& cfg);

/// Mean CCV over every context present for `dim`, skipping N/A contexts.
std::optional<double> bias_coefficient(const RateTable& table, std::string_view dim,
                                       const MetricConfig& cfg);

/// Mean CCV of dim_i over (context, v_j) groups of the (dim_i, dim_j)
/// factorial cells.
std::optional<double> factorial_bias(const RateTable& table, std::string_view dim_i,
                                     std::string_view dim_j, const MetricConfig& cfg);

/// How much dim_j modulates the bias of dim_i: per context, the coefficient
/// of variation (population sigma / mean, no epsilon) across v_j of
/// CCV(dim_i | v_j, c); averaged over contexts, x100. Throws
/// InsufficientFactorialData when a (v_j, c) group has fewer than two dim_i
/// values or the pair has no cells.
std::optional<double> interaction_effect(const RateTable& table, std::string_view dim_i,
                                         std::string_view dim_j, const MetricConfig& cfg);

using ColorCategorizer = std::function<std::string(const Rgb&)>;

/// Mean SR (percent) per color family over single-dimension color cells.
/// Throws UncategorizedColor when a cell's color is not in `color_dim` or the
/// categorizer returns an empty name.
std::map<std::string, double> color_category_summary(const RateTable& table,
                                                     const FactorDimension& color_dim,
                                                     const ColorCategorizer& categorizer);

/// Population mean and standard deviation, summed in sorted order so any
/// permutation of the input gives bitwise identical results.
struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};
MeanStd population_mean_std(std::span<const double> values);

}  // namespace biasforge
