// SPDX-License-Identifier: Apache-2.0
//
// bcv: translate annotated JVM classfiles to Boogie.
#include <iostream>

#include "CLI11.hpp"
#include "bcv/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Translate annotated JVM classfiles to Boogie"};
  bcv::RunConfig cfg;
  std::vector<std::string> classpath;
  std::string prelude;
  std::string check;

  app.set_version_flag("--version", std::string("bcv ") + bcv::kVersion);
  app.add_option("--classpath", classpath, "Class directory or jar (repeatable)");
  app.add_option("--class", cfg.classes, "Entry class, e.g. pkg.Summary (repeatable)")->required();
  app.add_option("--output", cfg.output, "Boogie file to write")->required();
  app.add_option("--prelude", prelude, "Replace the built-in prelude");
  app.add_option("--namespace", cfg.ns, "Package of the contract annotations")->capture_default_str();
  app.add_option("--check", check, "Verifier command, run with the output path appended");
  app.add_flag("-v,--verbose", cfg.verbosity, "Print a summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  for (const auto& p : classpath) cfg.classpath.emplace_back(p);
  if (!prelude.empty()) cfg.prelude = prelude;
  if (!check.empty()) cfg.check = check;
  return bcv::run(cfg, std::cerr);
}
