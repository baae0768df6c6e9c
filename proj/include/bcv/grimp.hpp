// SPDX-License-Identifier: Apache-2.0
//
// Grimp-style intermediate representation: three-address statements over
// expression trees, produced from bytecode by simulate_stack().
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcv/classfile.hpp"
#include "bcv/descriptor.hpp"

namespace bcv::grimp {

// Expected type of an expression (the type it is used at).
enum class Ex : std::uint8_t { Unknown, Boolean, Int, Long, Real, Ref, Void };

const char* ex_name(Ex t);
Ex ex_of(const JType& t);  // boolean -> Boolean, other integral narrow kinds -> Int, ...
Ex join(Ex a, Ex b);       // on {Unknown < Boolean < Int}; other kinds must agree

enum class Op : std::uint8_t {
  Add, Sub, Mul, Div, Rem, And, Or, Xor, Shl, Shr, Ushr,  // arithmetic / bitwise
  Eq, Ne, Lt, Ge, Gt, Le,                                // comparisons (boolean-valued)
  Cmp, Cmpl, Cmpg,                                       // lcmp / [fd]cmpl / [fd]cmpg
};

const char* op_symbol(Op op);
bool is_comparison(Op op);
Op negate_comparison(Op op);

enum class CallKind : std::uint8_t { Static, Virtual, Interface, Special };

// Specification operators recognized in aggregates.
enum class Intrinsic : std::uint8_t {
  Eq, Neq, Lt, Lte, Gt, Gte, Not, Implies, Conditional, Forall, Exists, Old, Invariant, Assertion, Assumption, Binding,
};

const char* intrinsic_name(Intrinsic k);

struct Expr {
  enum class Kind : std::uint8_t {
    Local, IntConst, LongConst, FloatConst, DoubleConst, Null, StringConst, ClassConst,
    Neg, Binary, Cast, InstanceOf, ArrayLength, ArrayRead, FieldRead, StaticRead, Call,
    Intrinsic,  // only in aggregates
  };
  Kind kind = Kind::IntConst;
  Op op = Op::Add;
  JType type;          // raw (bytecode-level) type of the value
  Ex ex = Ex::Unknown;  // expected type, filled in by infer_expected_types
  std::int64_t integer = 0;
  double real = 0.0;
  std::string text;  // local name, string constant, or class name
  std::optional<MemberRef> member;
  CallKind call = CallKind::Static;
  Intrinsic intrinsic = Intrinsic::Eq;
  std::vector<Expr> args;  // operands; receiver first for instance accesses

  friend bool operator==(const Expr&, const Expr&) = default;
};

Expr local(std::string name, JType type);
Expr int_const(std::int32_t v);
Expr long_const(std::int64_t v);
Expr binary(Op op, Expr a, Expr b, JType type);

struct LValue {
  enum class Kind : std::uint8_t { Local, Field, Static, Array };
  Kind kind = Kind::Local;
  std::string name;                // local
  std::optional<MemberRef> member;  // field / static
  std::vector<Expr> args;          // field: receiver; array: array, index
  JType type;                      // type of the stored value
  Ex ex = Ex::Unknown;

  friend bool operator==(const LValue&, const LValue&) = default;
};

struct Stmt {
  enum class Kind : std::uint8_t { Assign, New, NewArray, If, Goto, Return, Invoke, Label, Check, Nop };
  Kind kind = Kind::Nop;
  std::optional<LValue> lhs;     // Assign; New/NewArray target local
  std::optional<Expr> expr;      // Assign rhs, If condition, Return value, Invoke call, NewArray length
  std::string label;             // If/Goto target, Label name, New class name
  JType type;                    // NewArray element type
  int check = -1;                // Check: index into the extracted check list
  std::int32_t offset = -1;      // originating bytecode offset, if any

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct LocalVar {
  std::string name;
  int slot = -1;  // -1 for synthetic temps
  JType type;
  Ex ex = Ex::Unknown;
  bool param = false;

  friend bool operator==(const LocalVar&, const LocalVar&) = default;
};

struct Body {
  MemberRef method;  // owner, name, descriptor
  bool is_static = true;
  std::vector<std::string> params;  // parameter local names in order, receiver `this` first
  std::vector<LocalVar> locals;     // parameters first
  std::vector<Stmt> stmts;

  const LocalVar* find_local(const std::string& name) const;
  LocalVar* find_local(const std::string& name);
  std::optional<std::size_t> label_index(const std::string& label) const;
  JType return_type() const;

  friend bool operator==(const Body&, const Body&) = default;
};

std::string to_string(const Expr& e);
std::string to_string(const Stmt& s);
std::string to_string(const Body& b);

/// Visits every expression of a statement, outermost first.
template <typename F>
void for_each_expr(const Expr& e, F&& f) {
  f(e);
  for (const auto& a : e.args) for_each_expr(a, f);
}

template <typename F>
void for_each_expr(const Stmt& s, F&& f) {
  if (s.lhs) {
    for (const auto& a : s.lhs->args) for_each_expr(a, f);
  }
  if (s.expr) for_each_expr(*s.expr, f);
}

bool reads_local(const Expr& e, const std::string& name);
bool reads_heap(const Expr& e);  // field, static or array reads (array length excluded)
bool has_call(const Expr& e);

}  // namespace bcv::grimp
