// SPDX-License-Identifier: Apache-2.0
//
// Synthesized classfiles: the contract library and annotated example
// programs, built with the class builder so no Java toolchain is needed.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bcv/class_builder.hpp"
#include "bcv/error.hpp"
#include "bcv/pipeline.hpp"
#include "bcv/spec.hpp"

namespace bcv::corpus {

/// Operator, Special, Quantifier, Binding and Contract classes with bodies
/// shaped like javac output.
std::vector<ClassPlan> spec_library(const spec::Namespace& ns = {});

struct Fixture {
  std::string name;
  std::string description;
  std::vector<ClassPlan> classes;
  std::vector<std::string> entries;  // dotted class names
  int expected_exit = 0;
  std::optional<ErrorCode> expected_error;
};

/// Every fixture, translating ones first, then one per error kind.
std::vector<Fixture> fixtures(const spec::Namespace& ns = {});

/// Throws std::out_of_range for unknown names.
Fixture fixture(const std::string& name, const spec::Namespace& ns = {});

/// Class path holding the fixture's classes and the contract library.
ClassPath class_path(const Fixture& f, const spec::Namespace& ns = {});

/// Writes the fixture's classes and the contract library as .class files
/// under `dir`, one directory per package. Returns the files written.
std::vector<std::filesystem::path> write_classes(const Fixture& f, const std::filesystem::path& dir,
                                                 const spec::Namespace& ns = {});

}  // namespace bcv::corpus
