#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/context_builder.hpp"
#include "biasforge/factor_space.hpp"

namespace biasforge {

inline constexpr std::string_view kManifestFormat = "biasforge/manifest/v1";

/// One JSON line:
///   {"instance_id", "varied":[dims], "visual":{dim:id}, "context":{dim:id},
///    "scene":{"camera":{"pos","euler"}, "color_rgb", "shape", "position_xyz",
///             "instruction"}}
std::string manifest_line(const TaskInstance& instance);
TaskInstance parse_manifest_line(std::string_view line, std::size_t line_no = 0);

std::string write_manifest(const std::vector<TaskInstance>& instances);
std::vector<TaskInstance> parse_manifest(std::string_view jsonl);
std::vector<TaskInstance> load_manifest(const std::filesystem::path& path);

struct FactorialRequest {
  std::string dim_i;
  std::string dim_j;
  EvaluationContext c_star;
};

/// Sidecar describing how a manifest was built.
struct ManifestHeader {
  std::vector<std::string> evaluated_dims;
  std::optional<FactorialRequest> factorial;
  BaselineAssignment visual_baselines;
  BaselineAssignment context_baseline;
  std::vector<std::pair<std::string, std::size_t>> counts;  // subspace label -> instances
  std::size_t total = 0;
};

std::string serialize_header(const ManifestHeader& header);
ManifestHeader parse_header(std::string_view json_text);

/// Reads a c_star file: {"context": {...}, "visual_fixed": {...}}.
EvaluationContext parse_context(std::string_view json_text);

}  // namespace biasforge
