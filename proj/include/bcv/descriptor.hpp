// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bcv {

// A JVM field type (or void), kept as its descriptor text.
class JType {
 public:
  enum class Kind { Void, Boolean, Byte, Char, Short, Int, Long, Float, Double, Object, Array };

  JType() : JType(Kind::Void, "V") {}

  /// Parses a complete field descriptor ("I", "[Z", "Ljava/lang/String;") or "V".
  static JType parse(std::string_view descriptor);
  static JType of(Kind primitive);
  static JType object(std::string_view internal_name);
  static JType array_of(const JType& element);

  Kind kind() const noexcept { return kind_; }
  const std::string& descriptor() const noexcept { return descriptor_; }

  bool is_void() const noexcept { return kind_ == Kind::Void; }
  bool is_reference() const noexcept { return kind_ == Kind::Object || kind_ == Kind::Array; }
  bool is_integral() const noexcept;   // boolean, byte, char, short, int, long
  bool is_floating() const noexcept { return kind_ == Kind::Float || kind_ == Kind::Double; }
  bool is_wide() const noexcept { return kind_ == Kind::Long || kind_ == Kind::Double; }
  int slots() const noexcept { return is_void() ? 0 : (is_wide() ? 2 : 1); }

  /// Element type of an array type.
  JType element() const;
  /// Internal class name of an object type ("java/lang/Object").
  std::string class_name() const;
  /// Java source spelling, e.g. "int[]" or "java.lang.String".
  std::string java_name() const;

  friend bool operator==(const JType&, const JType&) = default;

 private:
  JType(Kind kind, std::string descriptor) : kind_(kind), descriptor_(std::move(descriptor)) {}

  Kind kind_;
  std::string descriptor_;
};

struct MethodDescriptor {
  std::vector<JType> params;
  JType ret;

  static MethodDescriptor parse(std::string_view descriptor);
  std::string text() const;
  int param_slots() const;

  friend bool operator==(const MethodDescriptor&, const MethodDescriptor&) = default;
};

/// "a/b/C" -> "a.b.C"
std::string dotted_name(std::string_view internal_name);
/// "a.b.C" -> "a/b/C"
std::string internal_name(std::string_view dotted);

}  // namespace bcv
