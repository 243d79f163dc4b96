#include "biasforge/fairness.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "biasforge/assets.hpp"
#include "biasforge/error.hpp"
#include "json_util.hpp"

namespace biasforge {

using detail::json;
using detail::ordered_json;

namespace {

constexpr std::string_view kBatchFormat = "biasforge/batch/v1";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Index one past the brace closing the object that opens at s[0], or npos.
std::size_t object_end(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<Phase> phase_from(std::string_view name) {
  for (Phase p : {Phase::generated, Phase::screening, Phase::needs_adjustment, Phase::human_review,
                  Phase::accepted, Phase::reverted}) {
    if (phase_name(p) == name) return p;
  }
  return std::nullopt;
}

std::string image_ref_for(const ScreeningOptions& options, const std::string& instance_id) {
  if (options.image_root.empty()) return instance_id + ".png";
  return options.image_root + "/" + instance_id + ".png";
}

void emit(const CheckpointSink& sink, const BatchState& state) {
  if (sink) sink(state);
}

std::vector<std::string> ids_of(const std::vector<TaskInstance>& instances) {
  std::vector<std::string> out;
  out.reserve(instances.size());
  for (const TaskInstance& t : instances) out.push_back(t.instance_id);
  return out;
}

std::set<std::string> id_set(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw Error(Errc::SchemaError, path + ": expected an array of ids");
  std::set<std::string> out;
  for (const json& v : arr) {
    if (!v.is_string()) throw Error(Errc::SchemaError, path + ": ids must be strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view verdict_name(Verdict v) { return v == Verdict::yes ? "yes" : "no"; }

AdjudicationResult parse_adjudication(std::string_view raw) {
  const std::string_view body = trim(raw);
  if (body.empty()) throw Error(Errc::MalformedJson, "empty adjudicator response");
  if (body.front() != '{') {
    if (body.find('{') != std::string_view::npos) {
      throw Error(Errc::ExtraneousText, "text before the JSON object");
    }
    throw Error(Errc::MalformedJson, "response is not a JSON object");
  }
  const std::size_t end = object_end(body);
  if (end == std::string_view::npos) throw Error(Errc::MalformedJson, "unterminated JSON object");
  if (end != body.size()) throw Error(Errc::ExtraneousText, "text after the JSON object");

  json doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(Errc::MalformedJson, "response is not valid JSON");
  }
  for (const char* key : {"analysis", "final_answer"}) {
    if (!doc.contains(key)) throw Error(Errc::MissingKey, std::string("missing key '") + key + "'");
  }
  if (doc.size() != 2) throw Error(Errc::MalformedJson, "unexpected keys besides analysis, final_answer");
  if (!doc["analysis"].is_string()) throw Error(Errc::MalformedJson, "analysis must be a string");
  const json& answer = doc["final_answer"];
  if (!answer.is_string()) throw Error(Errc::InvalidAnswer, "final_answer must be a string");
  const std::string a = answer.get<std::string>();
  AdjudicationResult out;
  out.analysis = doc["analysis"].get<std::string>();
  if (a == "yes") {
    out.final_answer = Verdict::yes;
  } else if (a == "no") {
    out.final_answer = Verdict::no;
  } else {
    throw Error(Errc::InvalidAnswer, "final_answer must be \"yes\" or \"no\", got \"" + a + "\"");
  }
  return out;
}

std::optional<AdjudicationResult> AdjudicationCache::get(const std::string& instance_id,
                                                         std::uint64_t hash,
                                                         std::size_t round) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(Key{instance_id, hash, round});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void AdjudicationCache::put(const std::string& instance_id, std::uint64_t hash, std::size_t round,
                            AdjudicationResult result) {
  std::lock_guard lock(mutex_);
  entries_[Key{instance_id, hash, round}] = std::move(result);
}

std::size_t AdjudicationCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::uint64_t prompt_hash(std::string_view prompt) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : prompt) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ScreeningResult screen_batch(const std::vector<TaskInstance>& instances, AdjudicatorClient& client,
                             const ScreeningOptions& options, std::size_t round) {
  if (instances.empty()) throw Error(Errc::InvalidSpec, "screen_batch needs a non-empty manifest");
  const std::string prompt =
      options.prompt.empty() ? std::string(adjudication_prompt()) : options.prompt;
  const std::uint64_t hash = prompt_hash(prompt);
  const std::size_t attempts = std::max<std::size_t>(1, options.max_attempts);

  // 0 = passed, 1 = answered no, 2 = unresolved
  std::vector<int> outcome(instances.size(), 2);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      const TaskInstance& inst = instances[i];
      std::optional<AdjudicationResult> result;
      if (options.cache != nullptr) result = options.cache->get(inst.instance_id, hash, round);
      auto delay = options.backoff;
      for (std::size_t a = 0; !result && a < attempts; ++a) {
        try {
          result = parse_adjudication(
              client.adjudicate({inst.instance_id, image_ref_for(options, inst.instance_id), prompt, round}));
          if (options.cache != nullptr) options.cache->put(inst.instance_id, hash, round, *result);
        } catch (const Error&) {
          if (a + 1 < attempts && delay.count() > 0) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
          }
        }
      }
      if (result) outcome[i] = result->final_answer == Verdict::yes ? 0 : 1;
    }
  };

  const std::size_t workers =
      std::min(std::max<std::size_t>(1, options.concurrency), instances.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  ScreeningResult out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (outcome[i] != 0) out.flagged.push_back(instances[i].instance_id);
    if (outcome[i] == 2) ++out.unresolved;
  }
  if (out.unresolved == instances.size()) {
    throw Error(Errc::AllRequestsFailed,
                "no instance could be adjudicated after " + std::to_string(attempts) + " attempts");
  }
  out.pass_rate = 1.0 - static_cast<double>(out.flagged.size()) / static_cast<double>(instances.size());
  return out;
}

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::generated: return "generated";
    case Phase::screening: return "screening";
    case Phase::needs_adjustment: return "needs_adjustment";
    case Phase::human_review: return "human_review";
    case Phase::accepted: return "accepted";
    case Phase::reverted: return "reverted";
  }
  return "unknown";
}

bool is_legal_transition(Phase from, Phase to) {
  switch (from) {
    case Phase::generated: return to == Phase::screening;
    case Phase::screening:
      return to == Phase::screening || to == Phase::needs_adjustment || to == Phase::human_review;
    case Phase::needs_adjustment: return to == Phase::screening;
    case Phase::human_review: return to == Phase::accepted || to == Phase::reverted;
    case Phase::reverted: return to == Phase::screening;
    case Phase::accepted: return false;
  }
  return false;
}

void BatchState::transition(Phase to) {
  if (!is_legal_transition(phase, to)) {
    throw Error(Errc::IllegalTransition, "batch '" + batch_id + "': " +
                                             std::string(phase_name(phase)) + " -> " +
                                             std::string(phase_name(to)) + " is not allowed");
  }
  phase = to;
  trail.push_back(to);
}

BatchState new_batch(std::string batch_id, const std::vector<TaskInstance>& instances) {
  BatchState s;
  s.batch_id = std::move(batch_id);
  s.instance_ids = ids_of(instances);
  s.trail.push_back(Phase::generated);
  return s;
}

BatchState refinement_loop(BatchState batch, std::vector<TaskInstance>& manifest,
                           AdjudicatorClient& client, const LoopConfig& config,
                           const AdjustmentHook& adjust, const CheckpointSink& checkpoint) {
  for (;;) {
    switch (batch.phase) {
      case Phase::human_review:
        return batch;
      case Phase::accepted:
        throw Error(Errc::IllegalTransition, "batch '" + batch.batch_id + "' is already accepted");
      case Phase::generated:
        batch.transition(Phase::screening);
        emit(checkpoint, batch);
        break;
      case Phase::needs_adjustment:
      case Phase::reverted:
        if (adjust) {
          manifest = adjust(batch, manifest);
          batch.instance_ids = ids_of(manifest);
        }
        batch.transition(Phase::screening);
        emit(checkpoint, batch);
        break;
      case Phase::screening: {
        if (batch.iteration >= config.max_iterations) {
          throw Error(Errc::MaxIterationsExceeded,
                      "batch '" + batch.batch_id + "' did not pass screening within " +
                          std::to_string(config.max_iterations) + " iterations");
        }
        const ScreeningResult r = screen_batch(manifest, client, config.screening, batch.iteration);
        ++batch.iteration;
        batch.screening_pass_rate = r.pass_rate;
        batch.flagged_instances = r.flagged;
        const double flagged =
            static_cast<double>(r.flagged.size()) / static_cast<double>(manifest.size());
        if (flagged > config.flag_threshold) {
          batch.consecutive_passes = 0;
          batch.transition(Phase::needs_adjustment);
        } else if (r.pass_rate >= config.pass_target) {
          ++batch.consecutive_passes;
          batch.transition(batch.consecutive_passes >= std::max<std::size_t>(1, config.consecutive_required)
                               ? Phase::human_review
                               : Phase::screening);
        } else {
          batch.consecutive_passes = 0;
          batch.transition(Phase::screening);
        }
        emit(checkpoint, batch);
        break;
      }
    }
  }
}

BatchState human_gate(BatchState batch, const std::vector<Review>& reviews, double threshold,
                      const CheckpointSink& checkpoint) {
  if (batch.phase != Phase::human_review) {
    throw Error(Errc::IllegalTransition, "human_gate needs phase human_review, batch is in " +
                                             std::string(phase_name(batch.phase)));
  }
  if (batch.instance_ids.empty()) throw Error(Errc::IncompleteReviews, "batch has no instances");
  std::map<std::string, Verdict> by_id;
  for (const Review& r : reviews) {
    if (!by_id.emplace(r.instance_id, r.verdict).second) {
      throw Error(Errc::IncompleteReviews, "duplicate review for '" + r.instance_id + "'");
    }
  }
  std::size_t yes = 0;
  for (const std::string& id : batch.instance_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(Errc::IncompleteReviews, "no review for '" + id + "'");
    if (it->second == Verdict::yes) ++yes;
  }
  if (by_id.size() != batch.instance_ids.size()) {
    throw Error(Errc::IncompleteReviews, "reviews name instances outside the batch");
  }
  const double rate = static_cast<double>(yes) / static_cast<double>(batch.instance_ids.size());
  batch.human_pass_rate = rate;
  batch.consecutive_passes = 0;
  batch.transition(rate >= threshold ? Phase::accepted : Phase::reverted);
  emit(checkpoint, batch);
  return batch;
}

std::vector<Review> parse_reviews_csv(std::string_view text) {
  std::vector<Review> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header) {
      if (row != "instance_id,verdict") {
        throw Error(Errc::SchemaError, "reviews line 1: expected header instance_id,verdict");
      }
      header = true;
      continue;
    }
    const std::size_t comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw Error(Errc::SchemaError, "reviews line " + std::to_string(lineno) + ": expected two fields");
    }
    const std::string_view id = trim(row.substr(0, comma));
    const std::string_view verdict = trim(row.substr(comma + 1));
    if (id.empty()) throw Error(Errc::SchemaError, "reviews line " + std::to_string(lineno) + ": empty instance_id");
    if (verdict != "yes" && verdict != "no") {
      throw Error(Errc::SchemaError,
                  "reviews line " + std::to_string(lineno) + ": verdict must be yes or no");
    }
    out.push_back({std::string(id), verdict == "yes" ? Verdict::yes : Verdict::no});
  }
  if (!header) throw Error(Errc::SchemaError, "reviews file is empty");
  return out;
}

std::string serialize_state(const BatchState& s) {
  ordered_json doc;
  doc["format"] = kBatchFormat;
  doc["batch_id"] = s.batch_id;
  doc["phase"] = phase_name(s.phase);
  doc["iteration"] = s.iteration;
  doc["screening_pass_rate"] = s.screening_pass_rate;
  doc["human_pass_rate"] = s.human_pass_rate ? ordered_json(*s.human_pass_rate) : ordered_json(nullptr);
  doc["consecutive_passes"] = s.consecutive_passes;
  doc["flagged_instances"] = s.flagged_instances;
  doc["instance_ids"] = s.instance_ids;
  ordered_json trail = ordered_json::array();
  for (Phase p : s.trail) trail.push_back(phase_name(p));
  doc["trail"] = std::move(trail);
  return doc.dump(2) + "\n";
}

BatchState parse_state(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "batch state");
  detail::check_format(doc, kBatchFormat, "$");
  auto phase_of = [](const std::string& name, const std::string& path) {
    auto p = phase_from(name);
    if (!p) throw Error(Errc::SchemaError, path + ": unknown phase '" + name + "'");
    return *p;
  };
  auto strings = [](const json& arr, const std::string& path) {
    if (!arr.is_array()) throw Error(Errc::SchemaError, path + ": expected an array");
    std::vector<std::string> out;
    for (const json& v : arr) {
      if (!v.is_string()) throw Error(Errc::SchemaError, path + ": expected strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  };
  BatchState s;
  s.batch_id = detail::require_string(doc, "batch_id", "$");
  s.phase = phase_of(detail::require_string(doc, "phase", "$"), "$.phase");
  const long long iteration = detail::require_integer(doc, "iteration", "$");
  const long long consecutive = detail::require_integer(doc, "consecutive_passes", "$");
  if (iteration < 0 || consecutive < 0) throw Error(Errc::SchemaError, "$: counters must be >= 0");
  s.iteration = static_cast<std::size_t>(iteration);
  s.consecutive_passes = static_cast<std::size_t>(consecutive);
  s.screening_pass_rate = detail::require_number(doc, "screening_pass_rate", "$");
  const json& human = detail::require(doc, "human_pass_rate", "$");
  if (!human.is_null()) s.human_pass_rate = detail::require_number(doc, "human_pass_rate", "$");
  s.flagged_instances = strings(detail::require(doc, "flagged_instances", "$"), "$.flagged_instances");
  s.instance_ids = strings(detail::require(doc, "instance_ids", "$"), "$.instance_ids");
  for (const std::string& name : strings(detail::require(doc, "trail", "$"), "$.trail")) {
    s.trail.push_back(phase_of(name, "$.trail"));
  }
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(s.screening_pass_rate) || (s.human_pass_rate && !in_unit(*s.human_pass_rate))) {
    throw Error(Errc::SchemaError, "$: pass rates must lie in [0, 1]");
  }
  if (s.trail.empty() || s.trail.back() != s.phase) {
    throw Error(Errc::SchemaError, "$.trail: must end with the current phase");
  }
  return s;
}

ScriptedAdjudicator::ScriptedAdjudicator(std::vector<std::set<std::string>> rounds,
                                         std::set<std::string> malformed,
                                         std::set<std::string> unreachable)
    : rounds_(std::move(rounds)), malformed_(std::move(malformed)), unreachable_(std::move(unreachable)) {
  if (rounds_.empty()) rounds_.emplace_back();
}

ScriptedAdjudicator::ScriptedAdjudicator(ScriptedAdjudicator&& other) noexcept
    : rounds_(std::move(other.rounds_)),
      malformed_(std::move(other.malformed_)),
      unreachable_(std::move(other.unreachable_)),
      calls_(other.calls()) {}

ScriptedAdjudicator ScriptedAdjudicator::from_flag_rates(const std::vector<double>& rates,
                                                         const std::vector<std::string>& ids) {
  std::vector<std::set<std::string>> rounds;
  for (double rate : rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw Error(Errc::InvalidSpec, "flag rates must lie in [0, 1]");
    const auto n = static_cast<std::size_t>(std::llround(rate * static_cast<double>(ids.size())));
    rounds.emplace_back(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(n, ids.size())));
  }
  return ScriptedAdjudicator(std::move(rounds));
}

ScriptedAdjudicator ScriptedAdjudicator::from_json(std::string_view json_text,
                                                   const std::vector<std::string>& ids) {
  const json doc = detail::parse_json(json_text, "mock adjudicator");
  std::set<std::string> malformed;
  std::set<std::string> unreachable;
  if (doc.contains("malformed")) malformed = id_set(doc["malformed"], "$.malformed");
  if (doc.contains("unreachable")) unreachable = id_set(doc["unreachable"], "$.unreachable");
  std::vector<std::set<std::string>> rounds;
  if (doc.contains("flag_rates")) {
    const json& rates = doc["flag_rates"];
    if (!rates.is_array()) throw Error(Errc::SchemaError, "$.flag_rates: expected an array");
    std::vector<double> r;
    for (const json& v : rates) {
      if (!v.is_number()) throw Error(Errc::SchemaError, "$.flag_rates: expected numbers");
      r.push_back(v.get<double>());
    }
    rounds = from_flag_rates(r, ids).rounds_;
  } else if (doc.contains("rounds")) {
    const json& list = doc["rounds"];
    if (!list.is_array()) throw Error(Errc::SchemaError, "$.rounds: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      rounds.push_back(id_set(list[i], "$.rounds[" + std::to_string(i) + "]"));
    }
  } else {
    throw Error(Errc::SchemaError, "$: mock needs flag_rates or rounds");
  }
  return ScriptedAdjudicator(std::move(rounds), std::move(malformed), std::move(unreachable));
}

std::string ScriptedAdjudicator::adjudicate(const AdjudicationRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  if (unreachable_.contains(request.instance_id)) {
    throw Error(Errc::TransportError, "scripted adjudicator: '" + request.instance_id + "' unreachable");
  }
  if (malformed_.contains(request.instance_id)) {
    return R"(Sure! Here is my answer: {"analysis": "looks fine", "final_answer": "yes"})";
  }
  const auto& flagged = rounds_[std::min(request.round, rounds_.size() - 1)];
  ordered_json doc;
  if (flagged.contains(request.instance_id)) {
    doc["analysis"] = "scripted: target not clearly identifiable";
    doc["final_answer"] = "no";
  } else {
    doc["analysis"] = "scripted: all conditions met";
    doc["final_answer"] = "yes";
  }
  return doc.dump();
}

std::size_t ScriptedAdjudicator::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

HttpAdjudicator::HttpAdjudicator(std::string url, std::chrono::seconds timeout) : timeout_(timeout) {
  constexpr std::string_view scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw Error(Errc::InvalidSpec, "adjudicator url must start with http://, got '" + url + "'");
  }
  std::string rest = url.substr(scheme.size());
  const std::size_t slash = rest.find('/');
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  std::string authority = rest.substr(0, slash);
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    try {
      port_ = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(Errc::InvalidSpec, "bad port in adjudicator url '" + url + "'");
    }
    authority.resize(colon);
  }
  if (authority.empty()) throw Error(Errc::InvalidSpec, "adjudicator url has no host");
  host_ = std::move(authority);
}

std::string HttpAdjudicator::adjudicate(const AdjudicationRequest& request) {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  ordered_json body;
  body["instance_id"] = request.instance_id;
  body["image"] = request.image_ref;
  body["prompt"] = request.prompt;
  body["round"] = request.round;
  auto res = cli.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw Error(Errc::TransportError,
                "adjudicator at " + host_ + ":" + std::to_string(port_) + ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(Errc::TransportError, "adjudicator returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

}  // namespace biasforge
