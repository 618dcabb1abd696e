#pragma once

// Rewrites pre-stage programs so that unboxed ADT values live in scalars.

#include <map>
#include <string>

#include "adtlayout/interp.hpp"
#include "adtlayout/ir.hpp"

namespace adtlayout::ir {

struct NormalizeOptions {
  /// Test-only: field reads at a nonzero offset shift one bit too far.
  bool inject_fault = false;
};

/// Unboxed T and T? become a tuple of intrep scalars; boxed T? becomes T.
Type normalize_type(const Type& t, const Compilation& comp);

/// Normalizes every function and appends the equality functions they need.
/// Throws Error(Type) for ill-typed input or an ADT with an infinite default.
Program normalize_program(const Program& pre, const Compilation& comp, const NormalizeOptions& options = {});

/// Name of the generated equality function for an ADT instance.
std::string equality_fn_name(const std::string& adt);

/// Equality function of one ADT over its normalized representation. Calls to
/// the equality functions of field ADTs are left for the caller to provide.
Function gen_equality_fn(const std::string& adt, const Compilation& comp, const NormalizeOptions& options = {});

/// Copies a pre-stage value into a post-stage heap: unboxed ADT records
/// become their encoded scalars, boxed records and class objects are copied
/// once each, so sharing is kept.
class LiveRecordFlattener {
 public:
  LiveRecordFlattener(const Compilation& comp, const Heap& pre, Heap& post);

  Value flatten(const Value& v, const Type& pre_type);

 private:
  std::vector<std::uint64_t> encode(const Object& o);

  const Compilation& comp_;
  const Heap& pre_;
  Heap& post_;
  std::map<std::uint64_t, std::uint64_t> ids_;
};

}  // namespace adtlayout::ir
