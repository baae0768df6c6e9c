// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <unistd.h>
#include <zlib.h>

#include <fstream>
#include <sstream>

#include "bcv/boogie.hpp"
#include "bcv/corpus.hpp"
#include "bcv/error.hpp"
#include "bcv/pipeline.hpp"

namespace bcv {
namespace {

namespace fs = std::filesystem;
using Bytes = std::vector<std::uint8_t>;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("bcv-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void put(Bytes& out, std::uint32_t v, int n) {
  for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

Bytes raw_deflate(const Bytes& in) {
  z_stream zs{};
  deflateInit2(&zs, 9, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
  Bytes out(deflateBound(&zs, in.size()));
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

// Minimal archive writer: `deflated` selects method 8 for every entry.
Bytes make_zip(const std::vector<std::pair<std::string, Bytes>>& entries, bool deflated) {
  Bytes out, central;
  for (const auto& [name, data] : entries) {
    Bytes stored = deflated ? raw_deflate(data) : data;
    std::uint32_t crc = crc32(0, data.data(), static_cast<uInt>(data.size()));
    std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    put(out, 0x04034b50, 4);
    put(out, 20, 2);
    put(out, 0, 2);
    put(out, deflated ? 8 : 0, 2);
    put(out, 0, 4);
    put(out, crc, 4);
    put(out, static_cast<std::uint32_t>(stored.size()), 4);
    put(out, static_cast<std::uint32_t>(data.size()), 4);
    put(out, static_cast<std::uint32_t>(name.size()), 2);
    put(out, 0, 2);
    out.insert(out.end(), name.begin(), name.end());
    out.insert(out.end(), stored.begin(), stored.end());

    put(central, 0x02014b50, 4);
    put(central, 20, 2);
    put(central, 20, 2);
    put(central, 0, 2);
    put(central, deflated ? 8 : 0, 2);
    put(central, 0, 4);
    put(central, crc, 4);
    put(central, static_cast<std::uint32_t>(stored.size()), 4);
    put(central, static_cast<std::uint32_t>(data.size()), 4);
    put(central, static_cast<std::uint32_t>(name.size()), 2);
    put(central, 0, 2);
    put(central, 0, 2);
    put(central, 0, 2);
    put(central, 0, 2);
    put(central, 0, 4);
    put(central, offset, 4);
    central.insert(central.end(), name.begin(), name.end());
  }
  std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put(out, 0x06054b50, 4);
  put(out, 0, 4);
  put(out, static_cast<std::uint32_t>(entries.size()), 2);
  put(out, static_cast<std::uint32_t>(entries.size()), 2);
  put(out, static_cast<std::uint32_t>(central.size()), 4);
  put(out, cd_offset, 4);
  put(out, 0, 2);
  return out;
}

void write(const fs::path& p, const Bytes& b) {
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The summary fixture and contract library as one archive.
Bytes fixture_jar(const corpus::Fixture& f, bool deflated) {
  std::vector<std::pair<std::string, Bytes>> entries;
  for (const auto& plan : f.classes) entries.emplace_back(plan.name + ".class", build_class(plan));
  for (const auto& plan : corpus::spec_library()) entries.emplace_back(plan.name + ".class", build_class(plan));
  entries.emplace_back("META-INF/MANIFEST.MF", Bytes{'M', '\n'});
  return make_zip(entries, deflated);
}

TEST(Zip, StoredAndDeflatedEntries) {
  TempDir dir;
  Bytes payload;
  for (int i = 0; i < 5000; ++i) payload.push_back(static_cast<std::uint8_t>(i % 7));
  for (bool deflated : {false, true}) {
    fs::path jar = dir.path() / (deflated ? "d.jar" : "s.jar");
    write(jar, make_zip({{"a/B.class", payload}, {"empty", {}}}, deflated));
    auto entries = read_zip(jar);
    ASSERT_EQ(entries.size(), 2U);
    EXPECT_EQ(entries.at("a/B.class"), payload);
    EXPECT_TRUE(entries.at("empty").empty());
  }
}

TEST(Zip, CorruptArchiveIsIoError) {
  TempDir dir;
  fs::path jar = dir.path() / "bad.jar";
  write(jar, Bytes{'P', 'K', 3, 4, 0, 0});
  try {
    read_zip(jar);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(ClassPathTest, DirectoryArchiveAndMemoryAgree) {
  auto f = corpus::fixture("summary");
  TempDir dir;
  corpus::write_classes(f, dir.path() / "classes");
  write(dir.path() / "lib.jar", fixture_jar(f, true));

  ClassPath from_dir, from_jar;
  from_dir.add_root(dir.path() / "classes");
  from_jar.add_root(dir.path() / "lib.jar");
  ClassPath from_memory = corpus::class_path(f);
  std::string a = translate_to_text(from_dir, f.entries, {});
  EXPECT_EQ(translate_to_text(from_jar, f.entries, {}), a);
  EXPECT_EQ(translate_to_text(from_memory, f.entries, {}), a);
  EXPECT_EQ(from_dir.load("no/Such"), nullptr);
}

TEST(Pipeline, EmittedProgramParses) {
  for (const auto& f : corpus::fixtures()) {
    if (f.expected_exit != 0) continue;
    ClassPath cp = corpus::class_path(f);
    Translation t = translate(cp, f.entries, {});
    EXPECT_EQ(boogie::parse(boogie::print(t.program)), t.program) << f.name;
    EXPECT_FALSE(t.classes.empty());
  }
}

TEST(Pipeline, SummaryFunctionsAndFrames) {
  auto f = corpus::fixture("summary");
  ClassPath cp = corpus::class_path(f);
  Translation t = translate(cp, f.entries, {});
  EXPECT_EQ(t.functions.size(), 3U);
  bool found = false;
  for (const auto& [name, info] : t.frames) {
    if (!name.starts_with("fixtures.Summary.summary#")) continue;
    found = true;
    EXPECT_EQ(info.frame, frames::Frame::Empty);
  }
  EXPECT_TRUE(found);
}

TEST(Pipeline, CustomNamespace) {
  spec::Namespace ns{"org.example.contracts"};
  auto f = corpus::fixture("summary", ns);
  ClassPath cp = corpus::class_path(f, ns);
  Options opts;
  opts.ns = ns;
  std::string text = translate_to_text(cp, f.entries, opts);
  EXPECT_NE(text.find("requires !fixtures.Summary.contains#"), std::string::npos);
  ClassPath cp2 = corpus::class_path(f, ns);
  std::string unchecked = translate_to_text(cp2, f.entries, {});
  EXPECT_EQ(unchecked.find("requires !"), std::string::npos);
}

struct Run {
  int rc;
  std::string diag;
};

Run run_fixture(const std::string& name, RunConfig cfg) {
  auto f = corpus::fixture(name);
  if (cfg.classes.empty()) cfg.classes = f.entries;
  ClassPath cp = corpus::class_path(f);
  std::ostringstream diag;
  int rc = run(cfg, cp, diag);
  return {rc, diag.str()};
}

TEST(Driver, WritesOutputAtomically) {
  TempDir dir;
  RunConfig cfg;
  cfg.output = dir.path() / "out.bpl";
  auto r = run_fixture("gcd", cfg);
  ASSERT_EQ(r.rc, 0) << r.diag;
  EXPECT_NO_THROW(boogie::parse(read(cfg.output)));
  EXPECT_FALSE(fs::exists(dir.path() / "out.bpl.tmp"));
}

TEST(Driver, ConfigurationErrors) {
  TempDir dir;
  RunConfig cfg;
  cfg.output = dir.path() / "missing-dir" / "out.bpl";
  auto r = run_fixture("gcd", cfg);
  EXPECT_EQ(r.rc, 3);
  EXPECT_NE(r.diag.find("E_IO"), std::string::npos) << r.diag;

  cfg.output = dir.path() / "out.bpl";
  cfg.classes = {"fixtures.Nowhere"};
  r = run_fixture("gcd", cfg);
  EXPECT_EQ(r.rc, 3);
  EXPECT_NE(r.diag.find("fixtures.Nowhere"), std::string::npos) << r.diag;

  cfg.classes = {};
  cfg.prelude = dir.path() / "none.bpl";
  EXPECT_EQ(run_fixture("gcd", cfg).rc, 3);
}

TEST(Driver, ReplacementPreludeIsValidated) {
  TempDir dir;
  std::ofstream(dir.path() / "broken.bpl") << "type Heap\n";
  RunConfig cfg;
  cfg.output = dir.path() / "out.bpl";
  cfg.prelude = dir.path() / "broken.bpl";
  auto r = run_fixture("gcd", cfg);
  EXPECT_EQ(r.rc, 3) << r.diag;
  EXPECT_FALSE(fs::exists(cfg.output));
}

TEST(Driver, VerifierHandOff) {
  TempDir dir;
  RunConfig cfg;
  cfg.output = dir.path() / "out.bpl";
  cfg.check = "test -s";
  EXPECT_EQ(run_fixture("gcd", cfg).rc, 0);
  cfg.check = "false";
  EXPECT_EQ(run_fixture("gcd", cfg).rc, 4);
}

TEST(Driver, ErrorFixturesExitCodes) {
  TempDir dir;
  for (const auto& f : corpus::fixtures()) {
    RunConfig cfg;
    cfg.output = dir.path() / (f.name + ".bpl");
    auto r = run_fixture(f.name, cfg);
    EXPECT_EQ(r.rc, f.expected_exit) << f.name << ": " << r.diag;
    if (f.expected_error)
      EXPECT_NE(r.diag.find(std::string(error_code_name(*f.expected_error))), std::string::npos) << r.diag;
  }
}

}  // namespace
}  // namespace bcv
