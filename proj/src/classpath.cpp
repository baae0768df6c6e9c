// SPDX-License-Identifier: Apache-2.0
#include <zlib.h>

#include <fstream>
#include <iterator>

#include "bcv/error.hpp"
#include "bcv/pipeline.hpp"

namespace bcv {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t le(const std::vector<std::uint8_t>& d, std::size_t at, int bytes, const fs::path& file) {
  if (at + static_cast<std::size_t>(bytes) > d.size()) throw Error(ErrorCode::Io, "truncated archive", file.string());
  std::uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | d[at + static_cast<std::size_t>(i)];
  return v;
}

std::vector<std::uint8_t> inflate_raw(const std::uint8_t* src, std::size_t n, std::size_t size, const fs::path& file) {
  // One spare byte: a valid buffer for empty entries, and overlong streams show up.
  std::vector<std::uint8_t> out(size + 1);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error(ErrorCode::Io, "zlib initialisation failed");
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(n);
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != size) throw Error(ErrorCode::Io, "corrupt deflate stream", file.string());
  out.resize(size);
  return out;
}

}  // namespace

std::map<std::string, std::vector<std::uint8_t>> read_zip(const fs::path& file) {
  auto d = read_file(file);
  if (d.size() < 22) throw Error(ErrorCode::Io, "not a zip archive", file.string());
  std::size_t eocd = d.size() - 22;
  std::size_t floor = d.size() > 22 + 0xffff ? d.size() - 22 - 0xffff : 0;
  while (le(d, eocd, 4, file) != 0x06054b50u) {
    if (eocd == floor) throw Error(ErrorCode::Io, "no end of central directory", file.string());
    --eocd;
  }
  std::size_t count = le(d, eocd + 10, 2, file);
  std::size_t at = le(d, eocd + 16, 4, file);
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (le(d, at, 4, file) != 0x02014b50u) throw Error(ErrorCode::Io, "bad central directory", file.string());
    std::uint32_t method = le(d, at + 10, 2, file);
    std::size_t csize = le(d, at + 20, 4, file);
    std::size_t usize = le(d, at + 24, 4, file);
    std::size_t nlen = le(d, at + 28, 2, file);
    std::size_t xlen = le(d, at + 30, 2, file);
    std::size_t clen = le(d, at + 32, 2, file);
    std::size_t local = le(d, at + 42, 4, file);
    if (at + 46 + nlen > d.size()) throw Error(ErrorCode::Io, "truncated archive", file.string());
    std::string name(d.begin() + static_cast<std::ptrdiff_t>(at + 46), d.begin() + static_cast<std::ptrdiff_t>(at + 46 + nlen));
    at += 46 + nlen + xlen + clen;
    if (name.empty() || name.back() == '/') continue;

    if (le(d, local, 4, file) != 0x04034b50u) throw Error(ErrorCode::Io, "bad local header", file.string());
    std::size_t data = local + 30 + le(d, local + 26, 2, file) + le(d, local + 28, 2, file);
    if (data + csize > d.size()) throw Error(ErrorCode::Io, "truncated archive", file.string());
    if (method == 0) {
      out[name] = std::vector<std::uint8_t>(d.begin() + static_cast<std::ptrdiff_t>(data),
                                            d.begin() + static_cast<std::ptrdiff_t>(data + csize));
    } else if (method == 8) {
      out[name] = inflate_raw(d.data() + data, csize, usize, file);
    } else {
      throw Error(ErrorCode::Io, "unsupported compression method " + std::to_string(method), file.string() + ":" + name);
    }
  }
  return out;
}

void ClassPath::add_root(const fs::path& p) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    roots_.push_back(Root{p, {}, false});
    return;
  }
  if (!fs::is_regular_file(p, ec)) throw Error(ErrorCode::Io, "class path entry not found", p.string());
  roots_.push_back(Root{p, read_zip(p), true});
}

void ClassPath::add_bytes(std::vector<std::uint8_t> bytes) {
  ClassFile cf = parse_class(bytes);
  memory_[cf.this_class] = std::move(bytes);
  cache_.erase(cf.this_class);
  missing_.erase(cf.this_class);
}

void ClassPath::add(const ClassFile& cf) {
  cache_[cf.this_class] = std::make_unique<ClassFile>(cf);
  missing_.erase(cf.this_class);
}

const ClassFile* ClassPath::load(const std::string& internal) {
  if (auto it = cache_.find(internal); it != cache_.end()) return it->second.get();
  if (missing_.count(internal)) return nullptr;
  const std::string rel = internal + ".class";
  std::optional<std::vector<std::uint8_t>> bytes;
  std::string origin = internal;
  if (auto it = memory_.find(internal); it != memory_.end()) bytes = it->second;
  for (const auto& r : roots_) {
    if (bytes) break;
    if (r.archive) {
      if (auto it = r.entries.find(rel); it != r.entries.end()) {
        bytes = it->second;
        origin = r.dir.string() + ":" + rel;
      }
    } else {
      fs::path f = r.dir / rel;
      std::error_code ec;
      if (fs::is_regular_file(f, ec)) {
        bytes = read_file(f);
        origin = f.string();
      }
    }
  }
  if (!bytes) {
    missing_[internal] = true;
    return nullptr;
  }
  try {
    auto cf = std::make_unique<ClassFile>(parse_class(*bytes));
    if (cf->this_class != internal) {
      throw Error(ErrorCode::Io, "file declares " + cf->this_class + " instead of " + internal);
    }
    return (cache_[internal] = std::move(cf)).get();
  } catch (const Error& e) {
    throw e.located(origin);
  }
}

}  // namespace bcv
