#pragma once

// Random well-typed pre-stage programs and the boxed-vs-normalized oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "adtlayout/normalize.hpp"

namespace adtlayout::ir {

struct GenOptions {
  int max_instrs = 30;
  int max_adts = 3;
  int inputs = 3;  // argument vectors per program
};

struct GeneratedProgram {
  Program program;
  std::vector<std::string> adts;
  std::vector<std::vector<Value>> inputs;  // for @main
};

/// ADT instances usable by the generator: finite defaults and every field
/// type constructible.
std::vector<std::string> generator_adts(const Compilation& comp);

/// Straight-line code plus at most one forward switch or branch whose arms
/// return; no loops, so every program terminates.
GeneratedProgram generate_program(const Compilation& comp, std::uint64_t seed, const GenOptions& options = {});

struct EquivOptions {
  std::uint64_t seed = 42;
  int programs = 500;
  GenOptions gen;
  NormalizeOptions normalize;
};

struct EquivResult {
  int programs = 0;
  int runs = 0;
  int traps = 0;
  int failures = 0;
  std::string counterexample;  // first failing program with its inputs

  bool ok() const { return failures == 0; }
};

EquivResult check_equivalence(const Compilation& comp, const EquivOptions& options);

}  // namespace adtlayout::ir
