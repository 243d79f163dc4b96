#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/factor_space.hpp"
#include "biasforge/variant_generator.hpp"

namespace biasforge {

/// Complete over the context dimensions.
using ContextAssignment = Assignment;

/// One controlled background: a context assignment plus the visual
/// dimensions held fixed while the evaluated one(s) vary.
struct EvaluationContext {
  ContextAssignment context;
  Assignment visual_fixed;

  /// Canonical text key, e.g. "context:shape=cube;position=p0|visual:color=red".
  /// Pairs are sorted by dimension name within each half.
  std::string key() const;

  friend bool operator==(const EvaluationContext&, const EvaluationContext&) = default;
  friend auto operator<=>(const EvaluationContext&, const EvaluationContext&) = default;
};

struct TaskInstance {
  std::string instance_id;
  Assignment varied;  // the evaluated dimension(s) and their values
  EvaluationContext eval_context;
  SceneConfig scene;

  /// varied + context + visual_fixed.
  Assignment full_assignment() const;

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

/// Stable 16-hex-digit FNV-1a hash of the sorted "dim=value" pairs of the
/// full assignment. Varied dimensions are marked, so the all-baseline scene
/// gets distinct ids in the subspaces of different dimensions.
std::string instance_id_for(const Assignment& varied, const EvaluationContext& context);

std::vector<ContextAssignment> variation_subspace(const FactorSpace& space, std::string_view dim);

/// Deduplicated union of every variation subspace. Ordered by context
/// dimension then value; a repeated assignment keeps its first position.
std::vector<ContextAssignment> context_union(const FactorSpace& space);

std::vector<EvaluationContext> generalization_context_space(const FactorSpace& space,
                                                            std::string_view visual_dim);

/// V_i x C_Gen(V_i); value-major, then context order.
std::vector<TaskInstance> task_subspace(const FactorSpace& space, std::string_view visual_dim);

/// All-baseline context with every visual dimension except `dim_i`, `dim_j`.
EvaluationContext baseline_factorial_context(const FactorSpace& space, std::string_view dim_i,
                                             std::string_view dim_j);

/// V_i x V_j at a fixed context; dim_i outermost.
std::vector<TaskInstance> factorial_subspace(const FactorSpace& space, std::string_view dim_i,
                                             std::string_view dim_j,
                                             const EvaluationContext& c_star);

}  // namespace biasforge
