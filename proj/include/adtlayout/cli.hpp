#pragma once

// Batch commands behind the adtlayout executable. Each returns the exit
// status: 0 success, 1 rejected input or disagreement, 2 usage or I/O error.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adtlayout {

struct CliOptions {
  std::vector<std::string> files;
  std::string target;       // built-in name; empty means $ADTLAYOUT_TARGET, then x64
  std::string target_file;  // JSON target description, overrides `target`
  int budget = 10000;
  int unbox_limit = 2;
  bool json = false;
  std::vector<std::string> instantiate;
  std::uint64_t seed = 42;
  int programs = 500;
  bool inject_fault = false;  // test-only
};

int cmd_check(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_layout(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_equiv(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace adtlayout
