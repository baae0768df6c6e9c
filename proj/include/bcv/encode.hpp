// SPDX-License-Identifier: Apache-2.0
//
// Typed Grimp plus contracts to Boogie declarations.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bcv/boogie.hpp"
#include "bcv/classfile.hpp"
#include "bcv/grimp.hpp"
#include "bcv/lift.hpp"
#include "bcv/spec.hpp"

namespace bcv::encode {

/// int/short/byte/long/char -> int, float/double -> real, boolean -> bool,
/// references -> Reference.
boogie::Type translate_type(const JType& t);
boogie::Type sort_of(grimp::Ex ex);

/// Replaces characters Boogie identifiers cannot hold with `$`.
std::string sanitize(std::string_view s);

/// Injective, deterministic names for classes, fields and methods:
///   class   pkg.C
///   field   pkg.C.f
///   method  pkg.C.m#<8 hex digits of the descriptor hash>
class Mangler {
 public:
  std::string type_const(std::string_view internal);  // class name or array descriptor
  std::string field(const MemberRef& f);
  std::string method(const MemberRef& m);

 private:
  std::string claim(std::string mangled, std::string origin);

  std::map<std::string, std::string> origins_;
};

struct Callee {
  MemberRef ref;
  bool is_static = true;
};

/// Program-wide state shared by all declarations being encoded. Collects
/// the classes, fields and procedures that translated code refers to.
struct Symbols {
  spec::Namespace ns;
  Mangler mangler;
  /// Callees translated as Boogie functions (@Pure and @Predicate methods).
  std::function<bool(const MemberRef&)> is_function;
  /// Declaring member for a method or field reference (superclass lookup).
  std::function<MemberRef(const MemberRef&)> resolve;

  std::set<std::string> types;                     // referenced class constants (internal names)
  std::map<std::string, MemberRef> fields;         // mangled -> field
  std::map<std::string, Callee> procedures;        // mangled -> called procedure
  std::map<std::string, std::int64_t> strings;     // string constant ids
  std::set<std::int64_t> string_ids;

  MemberRef canonical(const MemberRef& m) const { return resolve ? resolve(m) : m; }

  // Mangled names; each records the reference.
  std::string type_ref(const std::string& internal);
  std::string field_ref(const MemberRef& f);
  std::string procedure_ref(const MemberRef& m, bool is_static);
  std::int64_t string_id(const std::string& s);
};

/// How local reads and the heap are spelled while translating one expression.
struct Scope {
  std::string heap{boogie::kHeap};
  bool in_ensures = false;
  std::map<std::string, boogie::Expr> renames;  // local name -> replacement
  std::map<std::string, grimp::Ex> local_ex;     // natural type of each local
};

/// Tr(e) at e's expected type. `e` may contain calls only to functions and
/// specification operators. Throws E_OLD_OUTSIDE_ENSURES, E_UNSUPPORTED.
boogie::Expr translate_expr(const grimp::Expr& e, Symbols& sym, const Scope& scope);
/// Same, converted to `want` (booleans as 0/1 when an int is wanted).
boogie::Expr translate_expr(const grimp::Expr& e, grimp::Ex want, Symbols& sym, const Scope& scope);

/// `const unique C: Type;` and `const C.f: Field Tr(t);` per field.
std::vector<boogie::Decl> declare_class(const ClassFile& cf, Symbols& sym);

/// Function for a @Pure/@Predicate method: leading `h: Heap`, then the
/// receiver for instance methods and the data parameters.
boogie::Decl translate_pure(const MemberRef& m, bool is_static, const spec::Aggregate& agg, Symbols& sym);

struct ProcedureInput {
  MemberRef method;
  bool is_static = true;
  std::vector<std::string> params;  // data parameter names
  /// Typed body with invariant calls and inline checks extracted. Absent
  /// for procedures without implementation.
  std::optional<grimp::Body> body;
  Cfg cfg;
  std::vector<LoopInfo> loops;
  std::map<std::size_t, std::vector<spec::Aggregate>> invariants;  // by loop index
  std::vector<spec::InlineCheck> checks;
  std::vector<spec::Aggregate> preconditions;   // over the predicate's parameters
  std::vector<spec::Aggregate> postconditions;  // ditto, plus the trailing result
  /// Procedure form of a specification method, used only for frame
  /// inference: old() is permitted in the body.
  bool shadow = false;
};

/// Procedure with requires/ensures inlined and, for implemented methods,
/// the translated body. No modifies clause: see frames::apply_frames.
/// Throws E_OLD_OUTSIDE_ENSURES, E_UNSUPPORTED.
boogie::Decl translate_procedure(const ProcedureInput& in, Symbols& sym);

/// Counts of statements injected for loop invariants, for checking.
struct InjectionCounts {
  int asserts = 0;
  int assumes = 0;
};
InjectionCounts count_injections(const ProcedureInput& in);

}  // namespace bcv::encode
