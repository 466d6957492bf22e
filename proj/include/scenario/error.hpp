#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scenario {

enum class ErrorCode {
  // shared
  SyntaxError,
  SchemaViolation,
  IoError,
  // vocabulary
  DuplicateTerm,
  DanglingReference,
  InvalidTerm,
  // functional
  UnknownTerm,
  ArityMismatch,
  IllegalAttributeValue,
  IllegalApplication,
  DuplicateInstance,
  DuplicateAttribute,
  UnknownVariationTarget,
  // catalog / lowering
  BadRange,
  BadDistribution,
  UnboundConstraintParameter,
  DuplicateParameter,
  MissingTemplate,
  VocabularyMismatch,
  ConstraintInstantiationError,
  OverrideWidensRange,
  InconsistentScenario,
  // concretize
  BadK,
  BadLevels,
  InfeasibleLevels,
  SamplingExhausted,
  SourceMismatch,
  // testcase
  BadTiming,
  MissingKinematicInputs,
  IncompleteField,
  InvalidField,
  TraceMismatch,
  DuplicateId,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateTerm: return "DuplicateTerm";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::InvalidTerm: return "InvalidTerm";
    case ErrorCode::UnknownTerm: return "UnknownTerm";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::IllegalAttributeValue: return "IllegalAttributeValue";
    case ErrorCode::IllegalApplication: return "IllegalApplication";
    case ErrorCode::DuplicateInstance: return "DuplicateInstance";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::UnknownVariationTarget: return "UnknownVariationTarget";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadDistribution: return "BadDistribution";
    case ErrorCode::UnboundConstraintParameter: return "UnboundConstraintParameter";
    case ErrorCode::DuplicateParameter: return "DuplicateParameter";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
    case ErrorCode::VocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::ConstraintInstantiationError: return "ConstraintInstantiationError";
    case ErrorCode::OverrideWidensRange: return "OverrideWidensRange";
    case ErrorCode::InconsistentScenario: return "InconsistentScenario";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::BadLevels: return "BadLevels";
    case ErrorCode::InfeasibleLevels: return "InfeasibleLevels";
    case ErrorCode::SamplingExhausted: return "SamplingExhausted";
    case ErrorCode::SourceMismatch: return "SourceMismatch";
    case ErrorCode::BadTiming: return "BadTiming";
    case ErrorCode::MissingKinematicInputs: return "MissingKinematicInputs";
    case ErrorCode::IncompleteField: return "IncompleteField";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::TraceMismatch: return "TraceMismatch";
    case ErrorCode::DuplicateId: return "DuplicateId";
  }
  return "Unknown";
}

/// Every failure raised by the library. `line`/`column` are 1-based and zero
/// when the error has no source position.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(format(code, message, line, column)),
        code_(code),
        detail_(std::move(message)),
        line_(line),
        column_(column) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(ErrorCode code, const std::string& message, std::size_t line,
                            std::size_t column) {
    std::string out(to_string(code));
    if (line != 0) {
      out += " at line " + std::to_string(line);
      if (column != 0) out += ", column " + std::to_string(column);
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace scenario
