// SPDX-License-Identifier: Apache-2.0
//
// Whole-program translation: class loading, lifting, contracts, frames,
// encoding, and the command-line driver around it.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bcv/boogie.hpp"
#include "bcv/classfile.hpp"
#include "bcv/frames.hpp"
#include "bcv/spec.hpp"

namespace bcv {

inline constexpr const char* kVersion = "0.1.0";

/// Raw entries of a zip/jar archive, keyed by path. Stored and deflated
/// entries are supported. Throws E_IO.
std::map<std::string, std::vector<std::uint8_t>> read_zip(const std::filesystem::path& file);

/// Ordered set of class sources: directories, jar archives and in-memory
/// classfiles. Earlier roots shadow later ones.
class ClassPath {
 public:
  void add_root(const std::filesystem::path& p);  // directory or archive; throws E_IO
  void add_bytes(std::vector<std::uint8_t> bytes);  // keyed by the class it declares
  void add(const ClassFile& cf);

  /// The class with this internal name, if found. Throws on malformed files.
  const ClassFile* load(const std::string& internal);

 private:
  struct Root {
    std::filesystem::path dir;
    std::map<std::string, std::vector<std::uint8_t>> entries;  // archives
    bool archive = false;
  };
  std::vector<Root> roots_;
  std::map<std::string, std::vector<std::uint8_t>> memory_;
  std::map<std::string, std::unique_ptr<ClassFile>> cache_;
  std::map<std::string, bool> missing_;
};

struct Options {
  spec::Namespace ns;
  std::string prelude;  // prelude text; empty for the built-in one
};

struct Translation {
  boogie::Program program;
  frames::FrameResult frames;          // by procedure name, including purity shadows
  std::vector<std::string> classes;    // translated classes, internal names, sorted
  std::vector<std::string> functions;  // functions emitted for @Pure/@Predicate methods
};

/// Translates `entries` (internal or dotted names) and every class reachable
/// from them through the class path. Throws Error.
Translation translate(ClassPath& cp, const std::vector<std::string>& entries, const Options& opts);

/// print() of the translated program.
std::string translate_to_text(ClassPath& cp, const std::vector<std::string>& entries, const Options& opts);

struct RunConfig {
  std::vector<std::filesystem::path> classpath;
  std::vector<std::string> classes;
  std::filesystem::path output;
  std::optional<std::filesystem::path> prelude;
  std::string ns = "byteback.annotations";
  std::optional<std::string> check;  // verifier command, run as `<check> <output>`
  int verbosity = 0;
};

/// Exit status: 0 success, 1 translation error, 2 specification error,
/// 3 I/O or configuration, 4 verifier failure. The output file is written
/// atomically and only on success.
int run(const RunConfig& cfg, std::ostream& diagnostics);

/// Same, with additional in-memory classes ahead of the class path.
int run(const RunConfig& cfg, ClassPath& extra, std::ostream& diagnostics);

}  // namespace bcv
