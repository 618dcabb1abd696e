#include "adtlayout/diagnostics.hpp"

namespace adtlayout {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "E001";
    case ErrorCode::UnknownAnnotation: return "E002";
    case ErrorCode::Size: return "E010";
    case ErrorCode::SolveInDecl: return "E011";
    case ErrorCode::AmbiguousLetter: return "E012";
    case ErrorCode::UnboundName: return "E013";
    case ErrorCode::Arity: return "E014";
    case ErrorCode::LayoutField: return "E015";
    case ErrorCode::RecursivePacking: return "E016";
    case ErrorCode::Duplicate: return "E017";
    case ErrorCode::Type: return "E020";
    case ErrorCode::InfiniteType: return "E021";
    case ErrorCode::Infeasible: return "E030";
    case ErrorCode::Internal: return "E099";
  }
  return "E099";
}

std::string Diagnostic::str() const {
  std::string out;
  if (pos.line > 0) {
    out += std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
  }
  out += "error ";
  out += error_code_name(code);
  out += ": ";
  out += message;
  return out;
}

Error::Error(Diagnostic diag) : std::runtime_error(diag.str()), diag_(std::move(diag)) {}

Error::Error(ErrorCode code, std::string message, SourcePos pos)
    : Error(Diagnostic{code, std::move(message), pos}) {}

}  // namespace adtlayout
