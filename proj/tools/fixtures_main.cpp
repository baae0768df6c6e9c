// SPDX-License-Identifier: Apache-2.0
//
// bcv_fixtures: write the synthesized fixture classfiles to a directory.
#include <iostream>

#include "CLI11.hpp"
#include "bcv/corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write synthesized fixture classfiles"};
  std::string output;
  std::string name;
  std::string ns = "byteback.annotations";
  bool list = false;
  app.add_option("--output", output, "Directory to write the classes under");
  app.add_option("--fixture", name, "Only this fixture (default: all)");
  app.add_option("--namespace", ns, "Package of the contract annotations")->capture_default_str();
  app.add_flag("--list", list, "List fixtures and exit");
  CLI11_PARSE(app, argc, argv);

  bcv::spec::Namespace prefix{ns};
  try {
    for (const auto& f : bcv::corpus::fixtures(prefix)) {
      if (!name.empty() && f.name != name) continue;
      if (list) {
        std::cout << f.name << "\t" << f.entries.front() << "\texit " << f.expected_exit << "\t" << f.description << "\n";
        continue;
      }
      if (output.empty()) {
        std::cerr << "--output is required\n";
        return 3;
      }
      bcv::corpus::write_classes(f, output, prefix);
      std::cout << f.name << ": " << f.entries.front() << "\n";
    }
  } catch (const bcv::Error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}
