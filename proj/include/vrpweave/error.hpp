#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vrp {

enum class ErrorCode {
  Syntax,
  DuplicateId,
  DanglingReference,
  KindViolation,
  UnknownPointcut,
  UnknownVariant,
  UnknownParam,
  ParamTypeMismatch,
  UnknownVarPoint,
  UnknownAspect,
  AlreadyOccupied,
  KindMismatch,
  ImplicitManualBinding,
  EndpointUnoccupied,
  CyclicPointcutReference,
  Conflict,
  UnresolvedMandatory,
  DependencyViolation,
  Io,
};

inline constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::KindViolation: return "KindViolation";
    case ErrorCode::UnknownPointcut: return "UnknownPointcut";
    case ErrorCode::UnknownVariant: return "UnknownVariant";
    case ErrorCode::UnknownParam: return "UnknownParam";
    case ErrorCode::ParamTypeMismatch: return "ParamTypeMismatch";
    case ErrorCode::UnknownVarPoint: return "UnknownVarPoint";
    case ErrorCode::UnknownAspect: return "UnknownAspect";
    case ErrorCode::AlreadyOccupied: return "AlreadyOccupied";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::ImplicitManualBinding: return "ImplicitManualBinding";
    case ErrorCode::EndpointUnoccupied: return "EndpointUnoccupied";
    case ErrorCode::CyclicPointcutReference: return "CyclicPointcutReference";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::UnresolvedMandatory: return "UnresolvedMandatory";
    case ErrorCode::DependencyViolation: return "DependencyViolation";
    case ErrorCode::Io: return "IoError";
  }
  return "Error";
}

struct SourceLocation {
  std::size_t line = 0;  // 1-based; 0 means unknown
  std::size_t column = 0;
};

/// Every failure raised by the library. `what()` carries the rendered
/// diagnostic, `detail()` the message without code or location.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, SourceLocation loc = {})
      : std::runtime_error(render(code, message, loc)),
        code_(code),
        detail_(std::move(message)),
        loc_(loc) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  SourceLocation location() const noexcept { return loc_; }

 private:
  static std::string render(ErrorCode code, const std::string& message,
                            SourceLocation loc) {
    std::string out(to_string(code));
    if (loc.line != 0) {
      out += " at " + std::to_string(loc.line) + ":" + std::to_string(loc.column);
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  SourceLocation loc_;
};

}  // namespace vrp
