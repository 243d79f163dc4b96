#include "biasforge/trial_log.hpp"

#include "biasforge/error.hpp"
#include "json_util.hpp"

namespace biasforge {

using detail::json;
using detail::ordered_json;

std::string trial_line(const TrialRecord& r) {
  ordered_json j;
  j["instance_id"] = r.instance_id;
  j["agent_id"] = r.agent_id;
  j["repetition"] = r.repetition;
  j["success"] = r.success;
  ordered_json varied = ordered_json::object();
  for (const auto& [k, v] : r.varied) varied[k] = v;
  j["varied"] = std::move(varied);
  j["context_key"] = r.context_key;
  return j.dump();
}

std::string write_trials(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const TrialRecord& r : records) {
    out += trial_line(r);
    out += '\n';
  }
  return out;
}

std::vector<TrialRecord> parse_trials(std::string_view jsonl) {
  std::vector<TrialRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    auto end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    ++line_no;
    const std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string path = "line " + std::to_string(line_no);
    const json j = detail::parse_json(line, path);
    if (j.contains("format")) detail::check_format(j, kTrialFormat, path);
    TrialRecord r;
    r.instance_id = detail::require_string(j, "instance_id", path);
    r.agent_id = detail::require_string(j, "agent_id", path);
    r.repetition = detail::require_integer(j, "repetition", path);
    if (r.repetition < 0) throw Error(Errc::SchemaError, path + ".repetition: must be >= 0");
    const json& success = detail::require(j, "success", path);
    if (!success.is_boolean()) throw Error(Errc::SchemaError, path + ".success: expected a boolean");
    r.success = success.get<bool>();
    const json& varied = detail::require(j, "varied", path);
    if (!varied.is_object() || varied.empty()) {
      throw Error(Errc::SchemaError, path + ".varied: expected a non-empty object");
    }
    for (const auto& [k, v] : varied.items()) {
      if (!v.is_string()) throw Error(Errc::SchemaError, path + ".varied." + k + ": expected a string");
      r.varied.emplace(k, v.get<std::string>());
    }
    r.context_key = detail::require_string(j, "context_key", path);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrialRecord> load_trials(const std::filesystem::path& path) {
  return parse_trials(detail::read_file(path.string()));
}

namespace {

Assignment parse_pairs(std::string_view text, std::string_view key) {
  Assignment out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view pair = text.substr(start, end - start);
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(Errc::SchemaError, "malformed context key '" + std::string(key) + "'");
    }
    out.emplace(std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1)));
    start = end + 1;
  }
  return out;
}

}  // namespace

EvaluationContext parse_context_key(std::string_view key) {
  constexpr std::string_view kCtx = "context:";
  constexpr std::string_view kVis = "|visual:";
  const auto bar = key.find(kVis);
  if (!key.starts_with(kCtx) || bar == std::string_view::npos) {
    throw Error(Errc::SchemaError, "malformed context key '" + std::string(key) + "'");
  }
  EvaluationContext c;
  c.context = parse_pairs(key.substr(kCtx.size(), bar - kCtx.size()), key);
  c.visual_fixed = parse_pairs(key.substr(bar + kVis.size()), key);
  return c;
}

}  // namespace biasforge
