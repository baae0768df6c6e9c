// SPDX-License-Identifier: Apache-2.0
//
// Reference interpreter for Grimp bodies. JVM machine arithmetic
// (32/64-bit wraparound), used as a differential-testing oracle.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bcv/grimp.hpp"

namespace bcv::interp {

struct Value {
  enum class Kind : std::uint8_t { Void, Int, Long, Float, Double, Ref };
  Kind kind = Kind::Void;
  std::int64_t i = 0;  // Int, Long, Ref (object id, 0 = null)
  double d = 0.0;      // Float, Double

  static Value of_int(std::int32_t v) { return {Kind::Int, v, 0.0}; }
  static Value of_long(std::int64_t v) { return {Kind::Long, v, 0.0}; }
  static Value of_float(float v) { return {Kind::Float, 0, v}; }
  static Value of_double(double v) { return {Kind::Double, 0, v}; }
  static Value ref(std::int64_t id) { return {Kind::Ref, id, 0.0}; }
  static Value null() { return ref(0); }
  static Value none() { return {}; }

  std::int32_t as_int() const { return static_cast<std::int32_t>(i); }

  /// Bitwise equality for floating values, so NaN equals itself.
  friend bool operator==(const Value& a, const Value& b);
};

std::string to_string(const Value& v);

/// Default (zero) value for a JVM type.
Value default_value(const JType& t);

struct Object {
  std::string cls;  // internal name, or array descriptor such as "[I"
  std::map<std::string, Value> fields;  // "owner.name"
  bool is_array = false;
  std::vector<Value> elements;

  friend bool operator==(const Object&, const Object&) = default;
};

class TestHeap {
 public:
  std::vector<Object> objects;  // object id n is objects[n - 1]
  std::map<std::string, Value> statics;
  std::map<std::string, std::int64_t> strings;  // interned string constants
  std::size_t budget = 1'000'000;  // remaining statement/instruction steps

  /// Callee lookup: body to run for a call to `m` on a receiver of dynamic
  /// class `cls` (empty for static calls). Null means unresolvable.
  std::function<const grimp::Body*(const MemberRef& m, const std::string& cls)> resolve;
  /// Subtype test on internal names; defaults to equality or java/lang/Object.
  std::function<bool(const std::string& sub, const std::string& super)> subtype;

  Value allocate(std::string cls);
  Value allocate_array(const JType& element, std::int32_t length);
  Value intern(const std::string& text);
  Object& deref(const Value& v);  // E_TRAP on null
  bool is_instance(const Value& v, const std::string& type) const;
  /// Counts one step against the budget; E_TRAP when exhausted.
  void tick();

  /// Heap contents only (objects and statics), ignoring budget and callbacks.
  bool same_state(const TestHeap& other) const;
};

// Shared JVM arithmetic, so independent interpreters agree on conversions.
namespace jvm {
std::int32_t d2i(double v);
std::int64_t d2l(double v);
Value convert(const Value& v, const JType& to);                 // primitive conversions and narrowing
Value arith(grimp::Op op, const Value& a, const Value& b);      // E_TRAP on integer division by zero
bool compare(grimp::Op op, const Value& a, const Value& b);     // Eq..Le
Value store_narrow(const Value& v, const JType& element);       // bastore/castore/sastore truncation
}  // namespace jvm

/// Executes `body` on `args` (receiver first for instance methods).
/// Throws E_TRAP on null dereference, bad index, division by zero, failed
/// cast, negative array size or budget exhaustion.
Value eval_grimp(const grimp::Body& body, const std::vector<Value>& args, TestHeap& heap);

}  // namespace bcv::interp
