#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/context_builder.hpp"
#include "biasforge/factor_space.hpp"

namespace biasforge {

inline constexpr std::string_view kTrialFormat = "biasforge/trial/v1";

struct TrialRecord {
  std::string instance_id;
  std::string agent_id;
  std::int64_t repetition = 0;
  bool success = false;
  Assignment varied;
  std::string context_key;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// {"instance_id","agent_id","repetition","success","varied":{},"context_key"}
/// A line may carry an optional "format" field; an unknown major is rejected.
std::string trial_line(const TrialRecord& record);
std::string write_trials(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_trials(std::string_view jsonl);
std::vector<TrialRecord> load_trials(const std::filesystem::path& path);

/// Inverse of EvaluationContext::key(). Throws SchemaError on malformed keys.
EvaluationContext parse_context_key(std::string_view key);

}  // namespace biasforge
