#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adtlayout {

struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

/// Stable diagnostic codes. The numeric values appear in CLI output and tests.
enum class ErrorCode {
  Syntax,             // E001
  UnknownAnnotation,  // E002
  Size,               // E010
  SolveInDecl,        // E011
  AmbiguousLetter,    // E012
  UnboundName,        // E013
  Arity,              // E014
  LayoutField,        // E015 field bits not contiguous or not matching the field width
  RecursivePacking,   // E016
  Duplicate,          // E017 duplicate parameter or field placed twice
  Type,               // E020 type errors (unknown types, bad instantiations)
  InfiniteType,       // E021
  Infeasible,         // E030 annotation admits no layout
  Internal,           // E099
};

std::string_view error_code_name(ErrorCode code);

struct Diagnostic {
  ErrorCode code = ErrorCode::Internal;
  std::string message;
  SourcePos pos;

  std::string str() const;
};

/// Thrown by operations that fail with a single diagnostic.
class Error : public std::runtime_error {
 public:
  explicit Error(Diagnostic diag);
  Error(ErrorCode code, std::string message, SourcePos pos = {});

  const Diagnostic& diagnostic() const noexcept { return diag_; }
  ErrorCode code() const noexcept { return diag_.code; }

 private:
  Diagnostic diag_;
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace adtlayout
