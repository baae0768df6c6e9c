// SPDX-License-Identifier: Apache-2.0
//
// The Boogie subset emitted by the encoder: AST, printer, parser.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcv::boogie {

struct Type {
  enum class Kind { Bool, Int, Real, Named, Map };
  Kind kind = Kind::Int;
  std::string name;                      // Named
  std::vector<Type> args;                // Named: type arguments; Map: domain types then range
  std::vector<std::string> type_params;  // Map only

  static Type boolean() { return {Kind::Bool, {}, {}, {}}; }
  static Type integer() { return {Kind::Int, {}, {}, {}}; }
  static Type real() { return {Kind::Real, {}, {}, {}}; }
  static Type named(std::string n, std::vector<Type> a = {}) { return {Kind::Named, std::move(n), std::move(a), {}}; }

  friend bool operator==(const Type&, const Type&) = default;
};

enum class BinOp { Equiv, Implies, And, Or, Eq, Neq, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Mod, RealDiv };

struct TypedName {
  std::string name;
  Type type;
  friend bool operator==(const TypedName&, const TypedName&) = default;
};

struct Expr {
  enum class Kind { BoolLit, IntLit, RealLit, Var, Old, Not, Neg, Binary, Call, Select, Store, Coerce, Forall, Exists, Ite };
  Kind kind = Kind::BoolLit;
  bool boolean = false;
  std::int64_t integer = 0;
  std::string text;  // identifier, function name, or real literal digits
  BinOp op = BinOp::And;
  std::vector<Expr> args;
  std::vector<TypedName> bound;          // quantifiers
  std::vector<std::string> type_params;  // quantifiers
  std::optional<Type> type;              // coercion target

  friend bool operator==(const Expr&, const Expr&) = default;
};

Expr lit(bool b);
Expr lit(std::int64_t v);
Expr real_lit(std::string digits);
Expr var(std::string name);
Expr old(Expr e);
Expr negate(Expr e);  // logical not
Expr minus(Expr e);   // arithmetic negation
Expr binary(BinOp op, Expr a, Expr b);
Expr call(std::string fn, std::vector<Expr> args);
Expr select(Expr map, std::vector<Expr> index);
Expr store(Expr map, std::vector<Expr> index, Expr value);
Expr coerce(Expr e, Type t);
Expr quantifier(bool forall, std::vector<TypedName> bound, Expr body, std::vector<std::string> type_params = {});
Expr ite(Expr c, Expr a, Expr b);
Expr conjunction(std::vector<Expr> parts);  // `true` when empty

struct SourcePos {
  int line = 0;
  int column = 0;
  // Positions never affect structural equality.
  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

struct Stmt {
  enum class Kind { Label, Assign, Call, If, Goto, Assert, Assume, Return, Havoc };
  Kind kind = Kind::Assert;
  std::vector<std::string> names;  // label name; assign/havoc target; call outs; goto targets
  std::string callee;
  std::vector<Expr> exprs;  // assign rhs; call args; if/assert/assume condition
  std::vector<Stmt> then_branch;
  std::optional<std::vector<Stmt>> else_branch;
  SourcePos pos;

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

Stmt label(std::string name);
Stmt assign(std::string target, Expr rhs);
Stmt call_stmt(std::vector<std::string> outs, std::string proc, std::vector<Expr> args);
Stmt if_stmt(Expr cond, std::vector<Stmt> then_branch, std::optional<std::vector<Stmt>> else_branch = std::nullopt);
Stmt goto_stmt(std::vector<std::string> targets);
Stmt assert_stmt(Expr e);
Stmt assume_stmt(Expr e);
Stmt return_stmt();
Stmt havoc(std::string target);

struct Body {
  std::vector<TypedName> locals;
  std::vector<Stmt> stmts;
  friend bool operator==(const Body&, const Body&) = default;
};

struct Spec {
  enum class Kind { Requires, Ensures, Modifies };
  Kind kind = Kind::Requires;
  std::optional<Expr> expr;
  std::vector<std::string> names;  // modifies
  friend bool operator==(const Spec&, const Spec&) = default;
};

struct Decl {
  enum class Kind { Type, Const, Var, Function, Axiom, Procedure };
  Kind kind = Kind::Axiom;
  std::string name;
  std::vector<std::string> type_params;  // type decl parameters, function/procedure type parameters
  std::optional<Type> synonym;           // type decl
  Type type;                             // const/var type; function result
  bool unique = false;                   // const
  std::vector<TypedName> params;         // function/procedure ins
  std::vector<TypedName> outs;           // procedure outs
  std::optional<Expr> expr;              // axiom; function body
  std::vector<Spec> specs;
  std::optional<Body> body;              // procedure implementation
  SourcePos pos;

  friend bool operator==(const Decl&, const Decl&) = default;
};

struct Program {
  std::vector<Decl> decls;
  friend bool operator==(const Program&, const Program&) = default;

  const Decl* find(Decl::Kind kind, std::string_view name) const;
};

std::string print(const Program& p);
std::string print(const Decl& d);
std::string print(const Stmt& s);
std::string print(const Expr& e);
std::string print(const Type& t);

/// Throws Error(E_SYNTAX) with line:column in where().
Program parse(std::string_view text);
Expr parse_expr(std::string_view text);

bool is_identifier(std::string_view s);
bool is_keyword(std::string_view s);

inline constexpr std::string_view kHeap = "#heap";

struct HeapEvent {
  enum class Kind { Assign, Call };
  Kind kind = Kind::Assign;
  std::string callee;  // call events
  std::string text;    // the statement as printed
};

/// First statement of `proc`'s body that assigns the heap variable or calls
/// a procedure; none if the body has neither or the procedure has no body.
std::optional<HeapEvent> scan_heap_writes(const Program& p, std::string_view proc);

/// Every heap assignment and every callee of a body, in order.
std::vector<HeapEvent> heap_events(const Body& body);

}  // namespace bcv::boogie
