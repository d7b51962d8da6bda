#pragma once

#include <stdexcept>
#include <string>

namespace khh {

enum class ErrorCode {
  ParseError,
  InhomogeneousRelation,
  ZeroWeightGenerator,
  RelationNotKilled,
  WeightMismatch,
  CompositionNonzero,
  NotSquare,
  IdempotentSanityFail,
  SanityFail,
  Mismatch,
  NoConventionFound,
  Indeterminate,
  SquareInvalid,
  UnsupportedDimension,
  Unsupported,
  NotAmple,
  TorsionPoint,
  NotOnCurve,
  Precondition,
  OracleDisagreement,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::InhomogeneousRelation: return "INHOMOGENEOUS_RELATION";
    case ErrorCode::ZeroWeightGenerator: return "ZERO_WEIGHT_GENERATOR";
    case ErrorCode::RelationNotKilled: return "RELATION_NOT_KILLED";
    case ErrorCode::WeightMismatch: return "WEIGHT_MISMATCH";
    case ErrorCode::CompositionNonzero: return "COMPOSITION_NONZERO";
    case ErrorCode::NotSquare: return "NOT_SQUARE";
    case ErrorCode::IdempotentSanityFail: return "IDEMPOTENT_SANITY_FAIL";
    case ErrorCode::SanityFail: return "SANITY_FAIL";
    case ErrorCode::Mismatch: return "MISMATCH";
    case ErrorCode::NoConventionFound: return "NO_CONVENTION_FOUND";
    case ErrorCode::Indeterminate: return "INDETERMINATE";
    case ErrorCode::SquareInvalid: return "SQUARE_INVALID";
    case ErrorCode::UnsupportedDimension: return "UNSUPPORTED_DIMENSION";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::NotAmple: return "NOT_AMPLE";
    case ErrorCode::TorsionPoint: return "TORSION_POINT";
    case ErrorCode::NotOnCurve: return "NOT_ON_CURVE";
    case ErrorCode::Precondition: return "PRECONDITION";
    case ErrorCode::OracleDisagreement: return "ORACLE_DISAGREEMENT";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a source location (1-based).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace khh
