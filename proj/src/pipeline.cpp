#include "adtlayout/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "adtlayout/solver.hpp"

namespace adtlayout {

const CompiledAdt& Compilation::at(const std::string& name) const {
  auto it = adts.find(name);
  if (it == adts.end()) throw Error(ErrorCode::Type, "unknown ADT instance '" + name + "'");
  return it->second;
}

bool Compilation::unboxed(const std::string& name) const {
  const auto& a = at(name);
  return a.eligibility.unboxed && a.layout.has_value();
}

std::vector<std::string> Compilation::report_order() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : requested) {
    if (adts.count(r) && seen.insert(r).second) out.push_back(r);
  }
  for (const auto& r : order) {
    if (adts.count(r) && seen.insert(r).second) out.push_back(r);
  }
  return out;
}

Compilation compile(std::string_view source, const CompileOptions& options) {
  Compilation c;
  c.target = options.target;
  try {
    c.decls = parse_program(source);
  } catch (const Error& e) {
    c.diagnostics.push_back(e.diagnostic());
    return c;
  }
  c.packings = check_packing_decls(c.decls, c.diagnostics, options.target.max_scalar_width);
  try {
    c.env = AdtEnv::from_decls(c.decls);
  } catch (const Error& e) {
    c.diagnostics.push_back(e.diagnostic());
    return c;
  }

  Monomorphizer mono(c.env);
  for (const auto& d : c.decls) {
    const auto* a = std::get_if<AdtDecl>(&d);
    if (!a || !a->type_params.empty()) continue;
    try {
      c.requested.push_back(mono.instantiate(a->name, {}, a->pos));
    } catch (const Error& e) {
      c.diagnostics.push_back(e.diagnostic());
    }
  }
  for (const auto& r : options.instantiate) {
    try {
      c.requested.push_back(instantiate_request(mono, r));
    } catch (const Error& e) {
      Diagnostic d = e.diagnostic();
      d.message = "instantiating " + r + ": " + d.message;
      d.pos = {};
      c.diagnostics.push_back(d);
    }
  }

  const auto& instances = mono.instances();
  c.order = mono.dependency_order();
  std::map<std::string, LayoutSolution> nested;
  SolveOptions so;
  so.budget = options.budget;
  so.packings = &c.packings;
  so.nested = &nested;
  for (const auto& name : c.order) {
    CompiledAdt ca;
    ca.adt = instances.at(name);
    ca.eligibility = unboxing_eligibility(ca.adt, options.unbox);
    if (ca.eligibility.unboxed) {
      try {
        ca.layout = solve_layout(ca.adt, options.target, so);
        ca.trivial_score = trivial_layout(ca.adt, options.target, so).score;
        nested.emplace(name, *ca.layout);
      } catch (const Error& e) {
        Diagnostic d = e.diagnostic();
        if (d.pos == SourcePos{}) d.pos = ca.adt.pos;
        c.diagnostics.push_back(d);
      }
    }
    c.adts.emplace(name, std::move(ca));
  }
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Compilation compile_files(const std::vector<std::string>& paths, const CompileOptions& options) {
  std::string all;
  for (const auto& p : paths) {
    all += read_file(p);
    all += "\n";
  }
  return compile(all, options);
}

}  // namespace adtlayout
