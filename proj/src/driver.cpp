// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bcv/error.hpp"
#include "bcv/pipeline.hpp"

namespace bcv {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read prelude", p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomically(const fs::path& out, const std::string& text) {
  fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::Io, "output directory does not exist", dir.string());
  fs::path tmp = out;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write", tmp.string());
    f << text;
    f.flush();
    if (!f) throw Error(ErrorCode::Io, "write failed", tmp.string());
  }
  fs::rename(tmp, out, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move output into place", out.string());
  }
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

void report(std::ostream& diag, const Error& e) {
  diag << "error[" << error_code_name(e.code()) << "]";
  if (!e.where().empty()) diag << " " << e.where();
  diag << ": " << e.message() << "\n";
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& diagnostics) {
  ClassPath none;
  return run(cfg, none, diagnostics);
}

int run(const RunConfig& cfg, ClassPath& extra, std::ostream& diagnostics) {
  try {
    if (cfg.classes.empty()) throw Error(ErrorCode::Config, "at least one --class is required");
    if (cfg.output.empty()) throw Error(ErrorCode::Config, "--output is required");
    ClassPath& cp = extra;
    for (const auto& root : cfg.classpath) cp.add_root(root);
    Options opts;
    opts.ns.prefix = cfg.ns;
    if (cfg.prelude) opts.prelude = read_text(*cfg.prelude);

    Translation t = translate(cp, cfg.classes, opts);
    if (cfg.verbosity > 0) {
      diagnostics << "translated " << t.classes.size() << " classes, " << t.functions.size() << " functions\n";
    }
    write_atomically(cfg.output, boogie::print(t.program));

    if (cfg.check) {
      std::string cmd = *cfg.check + " " + quote(cfg.output.string());
      int rc = std::system(cmd.c_str());
      if (rc != 0) {
        diagnostics << "error: verifier reported failure (" << cmd << ")\n";
        return 4;
      }
    }
    return 0;
  } catch (const Error& e) {
    report(diagnostics, e);
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    diagnostics << "error[" << error_code_name(ErrorCode::Io) << "]: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace bcv
