#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biasforge {

enum class Errc {
  // factor space
  DuplicateDimensionName,
  EmptyDimension,
  BadBaselineIndex,
  DuplicateValueId,
  InvalidPayload,
  // generation
  NonPositiveStep,
  ZeroLevels,
  DegenerateLookAt,
  MissingDimension,
  UnknownValueId,
  NotAContextDimension,
  NotAVisualDimension,
  NoContextDimensions,
  SameDimension,
  IncompleteContext,
  // metrics
  DuplicateTrialKey,
  EmptyLog,
  EmptyTable,
  InsufficientValues,
  InsufficientFactorialData,
  UncategorizedColor,
  InconsistentLog,
  // simulation
  UnknownValue,
  InvalidSpec,
  // fairness
  MalformedJson,
  MissingKey,
  InvalidAnswer,
  ExtraneousText,
  AllRequestsFailed,
  MaxIterationsExceeded,
  IncompleteReviews,
  IllegalTransition,
  TransportError,
  // sgl
  SchemaViolation,
  NoManipulationObject,
  MultipleManipulationObjects,
  UnknownTarget,
  Indistinguishable,
  // io
  SchemaError,
  UnsupportedFormat,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// True for failures of an external service (adjudicator transport).
bool is_external_failure(Errc code) noexcept;

}  // namespace biasforge
