#include <iostream>

#include <CLI11.hpp>

#include "adtlayout/cli.hpp"

int main(int argc, char** argv) {
  adtlayout::CliOptions o;
  CLI::App app{"adtlayout: packing checks, ADT layouts and the normalization oracle"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("files", o.files, "declaration files")->required();
    cmd->add_option("--target", o.target, "built-in target (x64, jvm, x86-32); default $ADTLAYOUT_TARGET or x64");
    cmd->add_option("--target-file", o.target_file, "JSON target description");
    cmd->add_option("--budget", o.budget, "solver step budget per ADT")->check(CLI::NonNegativeNumber);
    cmd->add_option("--unbox-limit", o.unbox_limit, "largest field count unboxed without #unboxed")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--instantiate", o.instantiate, "generic instance to lay out, e.g. Option<u32>")
        ->allow_extra_args(false);
  };

  CLI::App* check = app.add_subcommand("check", "verify packing and type declarations");
  common(check);
  CLI::App* layout = app.add_subcommand("layout", "solve and report layouts");
  common(layout);
  layout->add_flag("--json", o.json, "JSON report");
  CLI::App* equiv = app.add_subcommand("equiv", "compare boxed and normalized evaluation on random programs");
  common(equiv);
  equiv->add_option("--seed", o.seed, "generator seed");
  equiv->add_option("--programs", o.programs, "number of programs")->check(CLI::NonNegativeNumber);
  equiv->add_flag("--inject-fault", o.inject_fault, "test-only: miscompile field reads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int status = app.exit(e);
    return status == 0 ? 0 : 2;
  }
  if (check->parsed()) return adtlayout::cmd_check(o, std::cout, std::cerr);
  if (layout->parsed()) return adtlayout::cmd_layout(o, std::cout, std::cerr);
  return adtlayout::cmd_equiv(o, std::cout, std::cerr);
}
