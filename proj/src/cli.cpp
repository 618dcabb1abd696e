#include "adtlayout/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <ostream>

#include "adtlayout/progen.hpp"
#include "adtlayout/report.hpp"

namespace adtlayout {

namespace {

struct Loaded {
  Compilation comp;
  std::vector<std::pair<std::string, int>> starts;  // file, first line in the joined source
};

// Diagnostic positions refer to the joined source; report them per file.
std::string locate(const Loaded& l, const Diagnostic& d) {
  std::string msg = "error " + std::string(error_code_name(d.code)) + ": " + d.message;
  if (d.pos.line <= 0 || l.starts.empty()) return msg;
  std::size_t i = 0;
  while (i + 1 < l.starts.size() && l.starts[i + 1].second <= d.pos.line) ++i;
  int line = d.pos.line - l.starts[i].second + 1;
  return l.starts[i].first + ":" + std::to_string(line) + ":" + std::to_string(d.pos.column) + ": " + msg;
}

std::optional<Target> resolve_target(const CliOptions& o, std::ostream& err) {
  try {
    if (!o.target_file.empty()) return Target::from_json(read_file(o.target_file));
  } catch (const std::exception& e) {
    err << "error: target file " << o.target_file << ": " << e.what() << "\n";
    return std::nullopt;
  }
  std::string name = o.target;
  if (name.empty()) {
    const char* env = std::getenv("ADTLAYOUT_TARGET");
    name = env && *env ? env : "x64";
  }
  auto t = Target::builtin(name);
  if (!t) {
    err << "error: unknown target '" << name << "' (built-in:";
    for (const auto& n : builtin_target_names()) err << " " << n;
    err << ")\n";
  }
  return t;
}

// Returns an exit status when loading fails outright.
std::optional<int> load(const CliOptions& o, std::ostream& err, Loaded& l) {
  if (o.files.empty()) {
    err << "error: no input files\n";
    return 2;
  }
  auto target = resolve_target(o, err);
  if (!target) return 2;
  std::string all;
  int line = 1;
  for (const auto& f : o.files) {
    std::string text;
    try {
      text = read_file(f);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
    l.starts.emplace_back(f, line);
    all += text;
    all += "\n";
    line += static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
  }
  CompileOptions co;
  co.target = *target;
  co.budget = o.budget;
  co.unbox.auto_unbox_limit = o.unbox_limit;
  co.instantiate = o.instantiate;
  l.comp = compile(all, co);
  return std::nullopt;
}

int report_diagnostics(const Loaded& l, std::ostream& err) {
  for (const auto& d : l.comp.diagnostics) err << locate(l, d) << "\n";
  return l.comp.ok() ? 0 : 1;
}

}  // namespace

int cmd_check(const CliOptions& options, std::ostream& out, std::ostream& err) {
  Loaded l;
  if (auto status = load(options, err, l)) return *status;
  if (report_diagnostics(l, err)) return 1;
  out << "ok: " << l.comp.decls.size() << " declarations, " << l.comp.adts.size() << " ADT instances\n";
  return 0;
}

int cmd_layout(const CliOptions& options, std::ostream& out, std::ostream& err) {
  Loaded l;
  if (auto status = load(options, err, l)) return *status;
  if (report_diagnostics(l, err)) return 1;
  if (options.json) {
    out << report_json(l.comp).dump(2) << "\n";
  } else {
    out << report_text(l.comp);
  }
  return 0;
}

int cmd_equiv(const CliOptions& options, std::ostream& out, std::ostream& err) {
  Loaded l;
  if (auto status = load(options, err, l)) return *status;
  if (report_diagnostics(l, err)) return 1;
  if (options.programs < 0) {
    err << "error: --programs must be non-negative\n";
    return 2;
  }
  ir::EquivOptions eo;
  eo.seed = options.seed;
  eo.programs = options.programs;
  eo.normalize.inject_fault = options.inject_fault;
  ir::EquivResult r;
  if (eo.programs > 0) {
    try {
      r = ir::check_equivalence(l.comp, eo);
    } catch (const Error& e) {
      err << "error " << error_code_name(e.code()) << ": " << e.what() << "\n";
      return 1;
    }
  }
  out << "equiv: seed " << options.seed << ", " << r.programs << " programs, " << r.runs << " runs, " << r.traps
      << " traps, " << r.failures << " disagreements\n";
  if (!r.ok()) {
    out << "first counterexample:\n" << r.counterexample;
    return 1;
  }
  return 0;
}

}  // namespace adtlayout
