#include "biasforge/error.hpp"

namespace biasforge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateDimensionName: return "DuplicateDimensionName";
    case Errc::EmptyDimension: return "EmptyDimension";
    case Errc::BadBaselineIndex: return "BadBaselineIndex";
    case Errc::DuplicateValueId: return "DuplicateValueId";
    case Errc::InvalidPayload: return "InvalidPayload";
    case Errc::NonPositiveStep: return "NonPositiveStep";
    case Errc::ZeroLevels: return "ZeroLevels";
    case Errc::DegenerateLookAt: return "DegenerateLookAt";
    case Errc::MissingDimension: return "MissingDimension";
    case Errc::UnknownValueId: return "UnknownValueId";
    case Errc::NotAContextDimension: return "NotAContextDimension";
    case Errc::NotAVisualDimension: return "NotAVisualDimension";
    case Errc::NoContextDimensions: return "NoContextDimensions";
    case Errc::SameDimension: return "SameDimension";
    case Errc::IncompleteContext: return "IncompleteContext";
    case Errc::DuplicateTrialKey: return "DuplicateTrialKey";
    case Errc::EmptyLog: return "EmptyLog";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::InsufficientValues: return "InsufficientValues";
    case Errc::InsufficientFactorialData: return "InsufficientFactorialData";
    case Errc::UncategorizedColor: return "UncategorizedColor";
    case Errc::InconsistentLog: return "InconsistentLog";
    case Errc::UnknownValue: return "UnknownValue";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::MalformedJson: return "MalformedJson";
    case Errc::MissingKey: return "MissingKey";
    case Errc::InvalidAnswer: return "InvalidAnswer";
    case Errc::ExtraneousText: return "ExtraneousText";
    case Errc::AllRequestsFailed: return "AllRequestsFailed";
    case Errc::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case Errc::IncompleteReviews: return "IncompleteReviews";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::TransportError: return "TransportError";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::NoManipulationObject: return "NoManipulationObject";
    case Errc::MultipleManipulationObjects: return "MultipleManipulationObjects";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::Indistinguishable: return "Indistinguishable";
    case Errc::SchemaError: return "SchemaError";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

bool is_external_failure(Errc code) noexcept {
  return code == Errc::TransportError || code == Errc::AllRequestsFailed;
}

}  // namespace biasforge
