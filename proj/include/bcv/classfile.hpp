// SPDX-License-Identifier: Apache-2.0
//
// In-memory model of a JVM classfile. Constant-pool indirection is resolved
// while parsing, so nothing downstream ever sees a pool index.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bcv/descriptor.hpp"
#include "bcv/opcodes.hpp"

namespace bcv {

namespace access {
inline constexpr std::uint16_t kPublic = 0x0001;
inline constexpr std::uint16_t kPrivate = 0x0002;
inline constexpr std::uint16_t kStatic = 0x0008;
inline constexpr std::uint16_t kFinal = 0x0010;
inline constexpr std::uint16_t kSuper = 0x0020;
inline constexpr std::uint16_t kInterface = 0x0200;
inline constexpr std::uint16_t kNative = 0x0100;
inline constexpr std::uint16_t kAbstract = 0x0400;
}  // namespace access

struct MemberRef {
  std::string owner;  // internal name; empty for invokedynamic call sites
  std::string name;
  std::string descriptor;
  bool interface = false;

  friend bool operator==(const MemberRef&, const MemberRef&) = default;
};

// Operand of ldc. Floats are held widened; the conversion is exact.
struct ConstantValue {
  enum class Kind { Int, Float, Long, Double, String, Class };
  Kind kind = Kind::Int;
  std::int64_t integer = 0;
  double real = 0.0;
  std::string text;  // String value or class internal name

  static ConstantValue of_int(std::int32_t v) { return {Kind::Int, v, 0.0, {}}; }
  static ConstantValue of_long(std::int64_t v) { return {Kind::Long, v, 0.0, {}}; }
  static ConstantValue of_float(float v) { return {Kind::Float, 0, v, {}}; }
  static ConstantValue of_double(double v) { return {Kind::Double, 0, v, {}}; }
  static ConstantValue of_string(std::string v) { return {Kind::String, 0, 0.0, std::move(v)}; }
  static ConstantValue of_class(std::string v) { return {Kind::Class, 0, 0.0, std::move(v)}; }

  bool is_wide() const { return kind == Kind::Long || kind == Kind::Double; }
  friend bool operator==(const ConstantValue&, const ConstantValue&) = default;
};

// One instruction in normal form (see canonical_opcode). In a parsed
// CodeAttribute `targets` hold absolute byte offsets; in a CodePlan they hold
// label ids. Switches list the default target first, then one target per key.
struct RawInstruction {
  Opcode op = Opcode::NOP;
  std::int32_t local = 0;
  std::int64_t immediate = 0;  // bipush/sipush value, iinc delta, newarray atype, dims, bsm index
  std::vector<std::int32_t> targets;
  std::vector<std::int32_t> keys;
  std::optional<ConstantValue> constant;
  std::optional<MemberRef> member;
  std::string class_name;  // new/anewarray/checkcast/instanceof/multianewarray operand
  std::uint32_t offset = 0;

  friend bool operator==(const RawInstruction&, const RawInstruction&) = default;
};

struct AnnotationValue;

// Annotation element value. `tag` follows the classfile encoding:
// B C D F I J S Z (constants), s (string), e (enum), c (class), @ (nested), [ (array).
struct ElementValue {
  char tag = 's';
  std::int64_t integer = 0;
  double real = 0.0;
  std::string text;        // string value, class descriptor, or enum type descriptor
  std::string enum_const;  // enum constant name
  std::vector<ElementValue> items;
  std::vector<AnnotationValue> nested;  // exactly one entry for '@'

  static ElementValue of_string(std::string s);
  static ElementValue of_int(std::int32_t v);
  static ElementValue of_bool(bool v);
  static ElementValue of_array(std::vector<ElementValue> items);
  static ElementValue of_annotation(AnnotationValue a);

  friend bool operator==(const ElementValue&, const ElementValue&);
};

struct AnnotationValue {
  std::string type;  // binary name with dots, e.g. "byteback.annotations.Contract$Require"
  std::vector<std::pair<std::string, ElementValue>> elements;

  /// The "value" element as a string, if present and a string.
  std::optional<std::string> string_value() const;

  friend bool operator==(const AnnotationValue&, const AnnotationValue&) = default;
};

struct ExceptionEntry {
  std::int32_t start = 0, end = 0, handler = 0;  // offsets, or label ids in plans
  std::string catch_type;                        // empty for catch-all
  friend bool operator==(const ExceptionEntry&, const ExceptionEntry&) = default;
};

struct LocalName {
  std::uint16_t slot = 0;
  std::string name;
  std::string descriptor;
  friend bool operator==(const LocalName&, const LocalName&) = default;
};

struct CodeAttribute {
  std::uint16_t max_stack = 0;
  std::uint16_t max_locals = 0;
  std::uint32_t code_length = 0;
  std::vector<RawInstruction> instructions;  // ordered by offset
  std::vector<ExceptionEntry> exception_table;
  std::vector<LocalName> local_names;

  /// Index into `instructions` of the instruction starting at `offset`.
  std::optional<std::size_t> index_at(std::int32_t offset) const;
};

struct FieldInfo {
  std::uint16_t access = 0;
  std::string name;
  JType type;
  std::vector<AnnotationValue> annotations;

  bool is_static() const { return (access & access::kStatic) != 0; }
};

struct MethodInfo {
  std::uint16_t access = 0;
  std::string name;
  MethodDescriptor descriptor;
  std::optional<CodeAttribute> code;
  std::vector<AnnotationValue> annotations;
  std::vector<std::string> parameter_names;  // from MethodParameters, may be empty

  bool is_static() const { return (access & access::kStatic) != 0; }
  bool is_abstract() const { return (access & access::kAbstract) != 0; }
  bool is_native() const { return (access & access::kNative) != 0; }
};

struct ClassFile {
  std::uint16_t minor_version = 0;
  std::uint16_t major_version = 52;
  std::uint16_t access = access::kPublic | access::kSuper;
  std::string this_class;  // internal name
  std::optional<std::string> super_class;
  std::vector<std::string> interfaces;
  std::vector<FieldInfo> fields;
  std::vector<MethodInfo> methods;
  std::vector<AnnotationValue> class_annotations;

  const MethodInfo* find_method(std::string_view name, std::string_view descriptor) const;
  const FieldInfo* find_field(std::string_view name) const;
};

inline constexpr std::uint16_t kMinMajorVersion = 49;
inline constexpr std::uint16_t kMaxMajorVersion = 65;

/// Parses classfile bytes. Throws Error with E_MAGIC, E_TRUNCATED,
/// E_BAD_CP_INDEX, E_BAD_DESCRIPTOR or E_UNSUPPORTED (version out of range).
ClassFile parse_class(std::span<const std::uint8_t> bytes);

/// Runtime-visible annotations of `m` in declaration order. Repeatable
/// annotation containers (a lone `value` element holding an array of
/// annotations) are expanded in place.
std::vector<AnnotationValue> read_annotations(const MethodInfo& m);

/// Modified UTF-8 as used in the constant pool.
std::string decode_modified_utf8(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_modified_utf8(std::string_view utf8);

}  // namespace bcv
