#pragma once

// Static size judgment and well-formedness checks for packings.

#include <map>
#include <string>
#include <vector>

#include "adtlayout/diagnostics.hpp"
#include "adtlayout/packing.hpp"

namespace adtlayout {

constexpr int kMaxScalarWidth = 64;

using PackingEnv = std::map<std::string, PackingDecl>;

struct SizeContext {
  std::map<std::string, int> gamma;  // field or parameter name -> width in bits
  const PackingEnv* delta = nullptr;
  int max_width = kMaxScalarWidth;
};

/// Minimal n with delta, gamma |- expr : n. Throws Error on failure.
int size_of(const PackingExpr& expr, const SizeContext& ctx);

/// Checks a declaration against the declarations it may reference.
Diagnostics check_packing_decl(const PackingDecl& decl, const PackingEnv& delta,
                               int max_width = kMaxScalarWidth);

/// Maps each field letter used in `layout` to the unique field name starting
/// with it. Throws Error(AmbiguousLetter | UnboundName).
std::map<char, std::string> resolve_layout_fields(const BitLayout& layout,
                                                  const std::vector<std::string>& fields,
                                                  SourcePos pos = {});

/// Verifies every packing declaration of a program, in order, rejecting
/// recursive application cycles. Returns the environment of all declarations
/// (including the ones that failed, so later checks can still resolve names).
PackingEnv check_packing_decls(const std::vector<Decl>& decls, Diagnostics& out,
                               int max_width = kMaxScalarWidth);

}  // namespace adtlayout
