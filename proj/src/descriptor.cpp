// SPDX-License-Identifier: Apache-2.0
#include "bcv/descriptor.hpp"

#include <algorithm>

#include "bcv/error.hpp"

namespace bcv {
namespace {

[[noreturn]] void bad(std::string_view descriptor) {
  throw Error(ErrorCode::BadDescriptor, "malformed descriptor '" + std::string(descriptor) + "'");
}

// Length of the field descriptor starting at `pos`, or 0 if malformed.
std::size_t field_length(std::string_view d, std::size_t pos) {
  std::size_t start = pos;
  while (pos < d.size() && d[pos] == '[') ++pos;
  if (pos >= d.size()) return 0;
  switch (d[pos]) {
    case 'Z': case 'B': case 'C': case 'S': case 'I': case 'J': case 'F': case 'D':
      return pos + 1 - start;
    case 'L': {
      auto semi = d.find(';', pos);
      if (semi == std::string_view::npos || semi == pos + 1) return 0;
      return semi + 1 - start;
    }
    default:
      return 0;
  }
}

}  // namespace

JType JType::parse(std::string_view d) {
  if (d == "V") return JType();
  if (field_length(d, 0) != d.size() || d.empty()) bad(d);
  switch (d[0]) {
    case 'Z': return of(Kind::Boolean);
    case 'B': return of(Kind::Byte);
    case 'C': return of(Kind::Char);
    case 'S': return of(Kind::Short);
    case 'I': return of(Kind::Int);
    case 'J': return of(Kind::Long);
    case 'F': return of(Kind::Float);
    case 'D': return of(Kind::Double);
    case 'L': return JType(Kind::Object, std::string(d));
    case '[': return JType(Kind::Array, std::string(d));
    default: bad(d);
  }
}

JType JType::of(Kind k) {
  switch (k) {
    case Kind::Void: return JType();
    case Kind::Boolean: return JType(k, "Z");
    case Kind::Byte: return JType(k, "B");
    case Kind::Char: return JType(k, "C");
    case Kind::Short: return JType(k, "S");
    case Kind::Int: return JType(k, "I");
    case Kind::Long: return JType(k, "J");
    case Kind::Float: return JType(k, "F");
    case Kind::Double: return JType(k, "D");
    default: break;
  }
  throw Error(ErrorCode::BadDescriptor, "JType::of requires a primitive kind");
}

JType JType::object(std::string_view name) {
  if (!name.empty() && name[0] == '[') return parse(name);
  return JType(Kind::Object, "L" + std::string(name) + ";");
}

JType JType::array_of(const JType& element) {
  if (element.is_void()) throw Error(ErrorCode::BadDescriptor, "array of void");
  return JType(Kind::Array, "[" + element.descriptor_);
}

bool JType::is_integral() const noexcept {
  switch (kind_) {
    case Kind::Boolean: case Kind::Byte: case Kind::Char: case Kind::Short: case Kind::Int:
    case Kind::Long:
      return true;
    default:
      return false;
  }
}

JType JType::element() const {
  if (kind_ != Kind::Array) throw Error(ErrorCode::BadDescriptor, "not an array: " + descriptor_);
  return parse(std::string_view(descriptor_).substr(1));
}

std::string JType::class_name() const {
  if (kind_ == Kind::Object) return descriptor_.substr(1, descriptor_.size() - 2);
  if (kind_ == Kind::Array) return descriptor_;
  throw Error(ErrorCode::BadDescriptor, "not a reference type: " + descriptor_);
}

std::string JType::java_name() const {
  switch (kind_) {
    case Kind::Void: return "void";
    case Kind::Boolean: return "boolean";
    case Kind::Byte: return "byte";
    case Kind::Char: return "char";
    case Kind::Short: return "short";
    case Kind::Int: return "int";
    case Kind::Long: return "long";
    case Kind::Float: return "float";
    case Kind::Double: return "double";
    case Kind::Object: return dotted_name(class_name());
    case Kind::Array: return element().java_name() + "[]";
  }
  return "?";
}

MethodDescriptor MethodDescriptor::parse(std::string_view d) {
  if (d.size() < 3 || d[0] != '(') bad(d);
  MethodDescriptor out;
  std::size_t pos = 1;
  while (pos < d.size() && d[pos] != ')') {
    std::size_t len = field_length(d, pos);
    if (len == 0) bad(d);
    out.params.push_back(JType::parse(d.substr(pos, len)));
    pos += len;
  }
  if (pos >= d.size()) bad(d);
  ++pos;
  std::string_view ret = d.substr(pos);
  if (ret != "V" && field_length(d, pos) != ret.size()) bad(d);
  out.ret = JType::parse(ret);
  return out;
}

std::string MethodDescriptor::text() const {
  std::string out = "(";
  for (const auto& p : params) out += p.descriptor();
  out += ")";
  out += ret.descriptor();
  return out;
}

int MethodDescriptor::param_slots() const {
  int n = 0;
  for (const auto& p : params) n += p.slots();
  return n;
}

std::string dotted_name(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '/', '.');
  return out;
}

std::string internal_name(std::string_view dotted) {
  std::string out(dotted);
  std::replace(out.begin(), out.end(), '.', '/');
  return out;
}

}  // namespace bcv
