// SPDX-License-Identifier: Apache-2.0
//
// Runs each acceptance criterion and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "aggregate_oracle.hpp"
#include "bcv/boogie.hpp"
#include "bcv/corpus.hpp"
#include "bcv/error.hpp"
#include "bcv/pipeline.hpp"
#include "bcv/prelude.hpp"
#include "lift_oracle.hpp"
#include "random_boogie.hpp"

#ifndef BCV_GOLDEN_DIR
#error "BCV_GOLDEN_DIR must be defined"
#endif

namespace fs = std::filesystem;
using namespace bcv;

namespace {

struct Failed {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Strips the class prefix and the descriptor hash from mangled names.
std::string normalize(const std::string& text, const std::string& cls) {
  std::string s = std::regex_replace(text, std::regex("#[0-9a-f]{8}"), "");
  std::string prefix = cls + ".";
  for (auto at = s.find(prefix); at != std::string::npos; at = s.find(prefix, at)) s.erase(at, prefix.size());
  return s;
}

// Lines from the one starting with `head` up to (excluding) the first line
// equal to `stop`, or through it when `inclusive`.
std::string excerpt(const std::vector<std::string>& lines, const std::string& head, const std::string& stop,
                    bool inclusive) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].starts_with(head)) continue;
    std::string out;
    for (std::size_t j = i; j < lines.size(); ++j) {
      if (lines[j] == stop && !inclusive) return out;
      out += lines[j] + "\n";
      if (lines[j] == stop) return out;
    }
    return out;
  }
  throw Failed{"no line starting with `" + head + "`"};
}

const corpus::Fixture& fixture(const std::string& name) {
  static std::map<std::string, corpus::Fixture> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, corpus::fixture(name)).first;
  return it->second;
}

Translation translate_fixture(const corpus::Fixture& f) {
  ClassPath cp = corpus::class_path(f);
  return translate(cp, f.entries, {});
}

std::string text_of(const corpus::Fixture& f) {
  ClassPath cp = corpus::class_path(f);
  return translate_to_text(cp, f.entries, {});
}

std::vector<corpus::Fixture> translating() {
  std::vector<corpus::Fixture> out;
  for (auto& f : corpus::fixtures())
    if (f.expected_exit == 0) out.push_back(f);
  return out;
}

void check_golden(const std::string& got, const std::string& file) {
  std::string want = read_file(fs::path(BCV_GOLDEN_DIR) / file);
  require(got == want, file + " differs:\n--- got\n" + got + "--- want\n" + want);
}

void summary_contract_golden() {
  std::string text = normalize(text_of(fixture("summary")), "fixtures.Summary");
  auto lines = lines_of(text);
  std::string got = excerpt(lines, "procedure summary(", "{", false) + "\n" + excerpt(lines, "function contains(", "}", true);
  check_golden(got, "summary.bpl");
}

void loop_invariant_golden() {
  std::string text = normalize(text_of(fixture("loop")), "fixtures.Loop");
  std::string got = excerpt(lines_of(text), "procedure loop(", "}", true);
  int asserts = 0, assumes = 0;
  for (const auto& l : lines_of(got)) {
    if (l.starts_with("  assert ")) ++asserts;
    if (l.starts_with("  assume ")) ++assumes;
  }
  require(asserts == 2 && assumes == 2,
          "expected 2 asserts and 2 assumes, got " + std::to_string(asserts) + " and " + std::to_string(assumes));
  check_golden(got, "loop.bpl");
}

void aggregation_oracle() {
  testing::Rng rng(0xa66);
  testing::AggregateOracleStats stats;
  for (int k = 0; k < 1000; ++k) {
    auto err = testing::check_random_aggregate(rng, k, 10, stats);
    require(!err, err ? *err : "");
  }
  require(stats.bodies == 1000 && stats.runs == 10000, "incomplete run");
}

void lifting_oracle() {
  testing::Rng rng(0x11f7);
  testing::LiftOracleStats stats;
  for (int k = 0; k < 1000; ++k) {
    auto err = testing::check_random_lifting(rng, k, 10, stats);
    require(!err, err ? *err : "");
  }
  require(stats.methods == 1000 && stats.runs == 10000, "incomplete run");
}

void frame_soundness() {
  bool saw_summary = false;
  for (const auto& f : translating()) {
    Translation t = translate_fixture(f);
    auto frame_of = [&](const std::string& proc) {
      auto it = t.frames.find(proc);
      return it == t.frames.end() ? frames::Frame::WholeHeap : it->second.frame;
    };
    for (const auto& d : t.program.decls) {
      if (d.kind != boogie::Decl::Kind::Procedure || !d.body) continue;
      bool empty = frame_of(d.name) == frames::Frame::Empty;
      bool has_modifies = false;
      for (const auto& s : d.specs) has_modifies |= s.kind == boogie::Spec::Kind::Modifies;
      require(empty != has_modifies, d.name + ": modifies clause disagrees with the inferred frame");
      if (d.name.starts_with("fixtures.Summary.summary#")) {
        saw_summary = true;
        require(empty, "summary is not EMPTY");
      }
      if (!empty) continue;
      for (const auto& ev : boogie::heap_events(*d.body)) {
        require(ev.kind != boogie::HeapEvent::Kind::Assign, d.name + " is EMPTY but assigns the heap: " + ev.text);
        require(frame_of(ev.callee) == frames::Frame::Empty,
                d.name + " is EMPTY but calls WHOLE_HEAP " + ev.callee);
      }
    }
  }
  require(saw_summary, "summary procedure not emitted");
}

void printer_round_trip() {
  auto round_trips = [](const boogie::Program& p, const std::string& what) {
    std::string text = boogie::print(p);
    boogie::Program back;
    try {
      back = boogie::parse(text);
    } catch (const Error& e) {
      throw Failed{what + ": " + e.what()};
    }
    require(back == p, what + ": parse(print(p)) != p");
  };
  round_trips(emit_prelude(default_prelude_text()), "prelude");
  for (const auto& f : translating()) round_trips(translate_fixture(f).program, f.name);
  testing::Rng rng(0xb00);
  for (int k = 0; k < 500; ++k) round_trips(testing::random_program(rng), "fuzzed program " + std::to_string(k));
}

void determinism() {
  fs::path dir = fs::temp_directory_path() / ("bcv-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  for (const auto& f : translating()) {
    std::string out[2];
    for (int run_no = 0; run_no < 2; ++run_no) {
      RunConfig cfg;
      cfg.classes = f.entries;
      cfg.output = dir / (f.name + std::to_string(run_no) + ".bpl");
      ClassPath cp = corpus::class_path(f);
      std::ostringstream diag;
      require(run(cfg, cp, diag) == 0, f.name + ": " + diag.str());
      out[run_no] = read_file(cfg.output);
    }
    require(!out[0].empty() && out[0] == out[1], f.name + ": outputs differ");
  }
  fs::remove_all(dir);
}

void error_taxonomy() {
  fs::path dir = fs::temp_directory_path() / ("bcv-acceptance-err-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int seen = 0;
  for (const auto& f : corpus::fixtures()) {
    if (f.expected_exit == 0) continue;
    RunConfig cfg;
    cfg.classes = f.entries;
    cfg.output = dir / (f.name + ".bpl");
    ClassPath cp = corpus::class_path(f);
    std::ostringstream diag;
    int rc = run(cfg, cp, diag);
    std::string tag = "error[" + std::string(error_code_name(*f.expected_error)) + "]";
    require(rc == f.expected_exit, f.name + ": exit " + std::to_string(rc) + ", expected " + std::to_string(f.expected_exit));
    require(diag.str().find(tag) != std::string::npos, f.name + ": expected " + tag + ", got " + diag.str());
    require(!fs::exists(cfg.output), f.name + ": output written despite the error");
    ++seen;
  }
  fs::remove_all(dir);
  for (ErrorCode c : {ErrorCode::NoSuchPredicate, ErrorCode::NotAggregable, ErrorCode::ImpureSpec, ErrorCode::Unsupported,
                      ErrorCode::Irreducible}) {
    bool covered = false;
    for (const auto& f : corpus::fixtures()) covered |= f.expected_error == c;
    require(covered, std::string("no fixture for ") + std::string(error_code_name(c)));
  }
  require(seen >= 5, "too few error fixtures");
}

struct Criterion {
  const char* name;
  double limit_s;  // 0 for none
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"summary-contract-golden", 5, summary_contract_golden},
      {"loop-invariant-golden", 5, loop_invariant_golden},
      {"aggregation-oracle", 60, aggregation_oracle},
      {"lifting-oracle", 120, lifting_oracle},
      {"frame-soundness", 0, frame_soundness},
      {"printer-round-trip", 0, printer_round_trip},
      {"determinism", 0, determinism},
      {"error-taxonomy", 0, error_taxonomy},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      c.run();
    } catch (const Failed& f) {
      why = f.why;
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (why.empty() && c.limit_s > 0 && secs >= c.limit_s)
      why = "took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_s) + " s";
    std::ostringstream t;
    t.precision(2);
    t << std::fixed << secs << "s";
    if (why.empty()) {
      std::cout << "PASS " << c.name << " (" << t.str() << ")\n";
    } else {
      ++failures;
      std::cout << "FAIL " << c.name << " (" << t.str() << "): " << why << "\n";
    }
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
