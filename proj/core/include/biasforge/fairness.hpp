#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "biasforge/context_builder.hpp"

namespace biasforge {

// ---------------------------------------------------------------------------
// Adjudicator boundary

struct AdjudicationRequest {
  std::string instance_id;
  std::string image_ref;
  std::string prompt;
  /// Screening round the request belongs to (0-based).
  std::size_t round = 0;
};

/// Image + prompt in, raw response text out. Implementations throw
/// Error(TransportError) when the service cannot be reached, and must be
/// safe to call from several threads at once.
class AdjudicatorClient {
 public:
  virtual ~AdjudicatorClient() = default;
  virtual std::string adjudicate(const AdjudicationRequest& request) = 0;
};

enum class Verdict { yes, no };

std::string_view verdict_name(Verdict v);

struct AdjudicationResult {
  std::string analysis;
  Verdict final_answer = Verdict::no;

  friend bool operator==(const AdjudicationResult&, const AdjudicationResult&) = default;
};

/// Strict parse of one adjudicator response. Whitespace around the object is
/// tolerated; any other text before or after it is ExtraneousText.
AdjudicationResult parse_adjudication(std::string_view raw);

// ---------------------------------------------------------------------------
// Stage 1: automated screening

/// Results keyed by (instance_id, prompt hash, round). Thread-safe.
class AdjudicationCache {
 public:
  std::optional<AdjudicationResult> get(const std::string& instance_id, std::uint64_t prompt_hash,
                                        std::size_t round) const;
  void put(const std::string& instance_id, std::uint64_t prompt_hash, std::size_t round,
           AdjudicationResult result);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::string, std::uint64_t, std::size_t>;
  mutable std::mutex mutex_;
  std::map<Key, AdjudicationResult> entries_;
};

std::uint64_t prompt_hash(std::string_view prompt);

struct ScreeningOptions {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubles after each failed attempt
  std::size_t concurrency = 8;
  std::string prompt;      // empty means the bundled screening prompt
  std::string image_root;  // image_ref = image_root/<instance_id>.png
  AdjudicationCache* cache = nullptr;
};

struct ScreeningResult {
  std::vector<std::string> flagged;  // manifest order
  double pass_rate = 0.0;
  std::size_t unresolved = 0;  // flagged because every attempt failed
};

/// Adjudicates each instance once. Transport or parse failures are retried
/// up to max_attempts, then the instance is flagged. Throws
/// AllRequestsFailed when no instance could be adjudicated.
ScreeningResult screen_batch(const std::vector<TaskInstance>& instances, AdjudicatorClient& client,
                             const ScreeningOptions& options, std::size_t round = 0);

// ---------------------------------------------------------------------------
// Batch state machine

enum class Phase { generated, screening, needs_adjustment, human_review, accepted, reverted };

std::string_view phase_name(Phase p);

/// Allowed edges:
///   generated -> screening
///   screening -> screening | needs_adjustment | human_review
///   needs_adjustment -> screening
///   human_review -> accepted | reverted
///   reverted -> screening
bool is_legal_transition(Phase from, Phase to);

struct BatchState {
  std::string batch_id;
  Phase phase = Phase::generated;
  std::size_t iteration = 0;  // screenings performed so far
  double screening_pass_rate = 0.0;
  std::optional<double> human_pass_rate;
  std::vector<std::string> flagged_instances;
  std::size_t consecutive_passes = 0;
  std::vector<std::string> instance_ids;
  std::vector<Phase> trail;  // every phase entered, in order

  /// Moves to `to` or throws IllegalTransition.
  void transition(Phase to);

  friend bool operator==(const BatchState&, const BatchState&) = default;
};

BatchState new_batch(std::string batch_id, const std::vector<TaskInstance>& instances);

struct LoopConfig {
  double flag_threshold = 0.05;
  double pass_target = 0.95;
  std::size_t consecutive_required = 1;
  std::size_t max_iterations = 10;
  ScreeningOptions screening;
};

/// Receives the state (phase needs_adjustment or reverted) and the current
/// manifest; returns the revised manifest to screen next.
using AdjustmentHook =
    std::function<std::vector<TaskInstance>(const BatchState&, const std::vector<TaskInstance>&)>;

/// Called after every phase transition.
using CheckpointSink = std::function<void(const BatchState&)>;

/// Screens until pass_target holds for consecutive_required screenings in a
/// row, ending in human_review. A screening that flags more than
/// flag_threshold sends the batch to needs_adjustment; the hook then revises
/// the manifest before the next screening. Throws MaxIterationsExceeded once
/// max_iterations screenings have run without reaching human_review.
BatchState refinement_loop(BatchState batch, std::vector<TaskInstance>& manifest,
                           AdjudicatorClient& client, const LoopConfig& config,
                           const AdjustmentHook& adjust = {}, const CheckpointSink& checkpoint = {});

// ---------------------------------------------------------------------------
// Stage 2: human adjudication

struct Review {
  std::string instance_id;
  Verdict verdict = Verdict::no;
};

/// accepted when the yes fraction reaches `threshold`, reverted otherwise.
/// Throws IncompleteReviews unless every batch instance has exactly one review.
BatchState human_gate(BatchState batch, const std::vector<Review>& reviews,
                      double threshold = 0.95, const CheckpointSink& checkpoint = {});

/// CSV with header "instance_id,verdict"; verdict is yes or no.
std::vector<Review> parse_reviews_csv(std::string_view text);

std::string serialize_state(const BatchState& state);
BatchState parse_state(std::string_view json_text);

// ---------------------------------------------------------------------------
// Clients

/// Deterministic stand-in for the adjudication service. Responses depend only
/// on (instance_id, round), so reruns and resumed batches see the same answers.
class ScriptedAdjudicator : public AdjudicatorClient {
 public:
  /// rounds[r] lists the ids answered "no" in round r; rounds past the end
  /// reuse the last entry.
  explicit ScriptedAdjudicator(std::vector<std::set<std::string>> rounds,
                               std::set<std::string> malformed = {},
                               std::set<std::string> unreachable = {});
  ScriptedAdjudicator(ScriptedAdjudicator&& other) noexcept;

  /// Round r flags the first round(rates[r] * ids.size()) ids.
  static ScriptedAdjudicator from_flag_rates(const std::vector<double>& rates,
                                             const std::vector<std::string>& ids);

  /// File form:
  ///   {"flag_rates":[...]} or {"rounds":[[ids...], ...]},
  ///   optional "malformed":[ids], "unreachable":[ids]
  static ScriptedAdjudicator from_json(std::string_view json_text,
                                       const std::vector<std::string>& ids);

  std::string adjudicate(const AdjudicationRequest& request) override;

  std::size_t calls() const;

 private:
  std::vector<std::set<std::string>> rounds_;
  std::set<std::string> malformed_;
  std::set<std::string> unreachable_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
};

/// POSTs {"instance_id","image","prompt","round"} as JSON to an http:// URL
/// and returns the response body.
class HttpAdjudicator : public AdjudicatorClient {
 public:
  explicit HttpAdjudicator(std::string url, std::chrono::seconds timeout = std::chrono::seconds(60));
  std::string adjudicate(const AdjudicationRequest& request) override;

 private:
  std::string host_;
  int port_ = 80;
  std::string path_;
  std::chrono::seconds timeout_;
};

}  // namespace biasforge
