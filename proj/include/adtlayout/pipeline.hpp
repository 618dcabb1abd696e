#pragma once

// Front end to layouts: parse, verify, monomorphize, decide unboxing and
// solve every instance in dependency order.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adtlayout/layout.hpp"
#include "adtlayout/mono.hpp"
#include "adtlayout/verify.hpp"

namespace adtlayout {

struct CompileOptions {
  Target target = Target::x64();
  int budget = 10000;
  UnboxOptions unbox;
  std::vector<std::string> instantiate;  // e.g. "Option<u32>"
};

struct CompiledAdt {
  MonoAdt adt;
  Eligibility eligibility;
  std::optional<LayoutSolution> layout;  // unboxed instances only
  std::optional<Score> trivial_score;
};

struct Compilation {
  std::vector<Decl> decls;
  PackingEnv packings;
  AdtEnv env;
  Target target;
  std::map<std::string, CompiledAdt> adts;
  std::vector<std::string> order;      // referenced instances first
  std::vector<std::string> requested;  // non-generic declarations, then explicit instantiations
  Diagnostics diagnostics;

  bool ok() const { return diagnostics.empty(); }
  const CompiledAdt& at(const std::string& name) const;
  bool unboxed(const std::string& name) const;
  /// Report order: requested instances, then the rest in dependency order.
  std::vector<std::string> report_order() const;
};

/// Never throws for problems in the source; they land in `diagnostics`.
Compilation compile(std::string_view source, const CompileOptions& options = {});

/// Concatenates several files into one compilation unit.
Compilation compile_files(const std::vector<std::string>& paths, const CompileOptions& options = {});

/// Reads a whole file; throws std::runtime_error when it cannot be read.
std::string read_file(const std::string& path);

}  // namespace adtlayout
