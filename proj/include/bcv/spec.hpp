// SPDX-License-Identifier: Apache-2.0
//
// Contract recognition on lifted code: @Require/@Ensure resolution,
// aggregation of pure straight-line bodies, specification intrinsics and
// loop invariants / inline checks.
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcv/classfile.hpp"
#include "bcv/grimp.hpp"
#include "bcv/interp.hpp"
#include "bcv/lift.hpp"

namespace bcv::spec {

/// Package under which the annotations and operator classes live.
///
///   <prefix>.Contract$Require / $Ensure / $Predicate / $Pure   annotations
///   <prefix>/Operator     eq neq lt lte gt gte not implies
///   <prefix>/Special      conditional old
///   <prefix>/Quantifier   forall exists
///   <prefix>/Binding      integer longInteger floatingPoint real bool reference
///   <prefix>/Contract     invariant assertion assumption
struct Namespace {
  std::string prefix = "byteback.annotations";

  std::string annotation(std::string_view simple) const;  // e.g. "Require"
  std::string owner(std::string_view simple) const;       // internal name, e.g. ".../Operator"
};

struct IntrinsicRef {
  grimp::Intrinsic kind = grimp::Intrinsic::Eq;
  JType type;  // operand type; bound type for Binding, Forall, Exists

  friend bool operator==(const IntrinsicRef&, const IntrinsicRef&) = default;
};

/// Every intrinsic method with its kind, in a fixed order.
const std::vector<std::pair<MemberRef, IntrinsicRef>>& intrinsic_table(const Namespace& ns);

/// Kind of a call target, by owner, name and descriptor.
std::optional<IntrinsicRef> recognize_intrinsic(const MemberRef& m, const Namespace& ns);

struct MethodContracts {
  MemberRef method;
  bool is_static = true;
  std::vector<MemberRef> preconditions;  // @Require predicate methods, declaration order
  std::vector<MemberRef> postconditions;  // @Ensure predicates
  bool is_pure = false;
  bool is_predicate = false;
  std::optional<JType> result_param;  // trailing ensures argument, non-void methods only

  bool is_specification() const { return is_pure || is_predicate; }
};

/// One entry per method of `cf`, in class order.
/// Throws E_NO_SUCH_PREDICATE, E_NOT_A_PREDICATE, E_SIGNATURE_MISMATCH,
/// E_PREDICATE_NOT_BOOLEAN.
std::vector<MethodContracts> resolve_contracts(const ClassFile& cf, const Namespace& ns);

struct Violation {
  enum class Reason { ImpureWrite, Branching, ImpureCall, NoReturn };
  Reason reason = Reason::Branching;
  std::size_t stmt = 0;
  std::int32_t offset = -1;
  std::string detail;
};

const char* reason_name(Violation::Reason r);  // "IMPURE_WRITE", ...
std::string to_string(const Violation& v);

struct Context {
  Namespace ns;
  /// True when calls to `m` may appear in aggregates (@Pure or @Predicate).
  std::function<bool(const MemberRef& m)> is_pure;
  std::size_t max_nodes = 100'000;
};

/// Empty when `body` is a chain of local assignments of pure expressions
/// ending in one return.
std::vector<Violation> check_aggregable(const grimp::Body& body, const Context& ctx);

/// Renames every local assigned more than once (parameters count as
/// assigned on entry) so each assignment defines a fresh name.
grimp::Body to_ssa(const grimp::Body& body);

struct Aggregate {
  grimp::Expr expr;                 // intrinsic calls rewritten to Intrinsic nodes
  std::vector<std::string> params;  // parameter names free in `expr` refer to
  std::map<std::string, grimp::Ex> locals;  // declared type of every local in `expr` and of the parameters
};

/// Agg(body). Throws E_NOT_AGGREGABLE (with the first violation),
/// E_NON_SSA, E_AGGREGATE_TOO_LARGE, E_BINDING_ESCAPE.
Aggregate aggregate(const grimp::Body& body, const Context& ctx);

/// Same as aggregate() but without the SSA pre-pass.
Aggregate aggregate_ssa(const grimp::Body& body, const Context& ctx);

struct LoopInvariants {
  grimp::Body body;  // invariant calls and their defining chains replaced by Nop
  std::map<std::size_t, std::vector<Aggregate>> by_loop;  // index into the loop list
};

/// Throws E_INVARIANT_OUTSIDE_LOOP, E_INVARIANT_NOT_AGGREGABLE.
LoopInvariants extract_loop_invariants(const grimp::Body& body, const Cfg& cfg, const std::vector<LoopInfo>& loops,
                                       const Context& ctx);

struct InlineCheck {
  std::size_t stmt = 0;  // position of the Check statement
  bool assume = false;
  Aggregate expr;
};

struct InlineChecks {
  grimp::Body body;  // calls replaced by Check statements, chains by Nop
  std::vector<InlineCheck> checks;
};

/// Throws E_CHECK_NOT_AGGREGABLE.
InlineChecks extract_inline_checks(const grimp::Body& body, const Context& ctx);

/// Evaluates an aggregate with JVM arithmetic. Operators are eager; old()
/// is the identity. Quantifiers are not evaluable (E_UNSUPPORTED); calls go
/// through the heap's resolver.
interp::Value evaluate(const Aggregate& a, const std::vector<interp::Value>& args, interp::TestHeap& heap);

}  // namespace bcv::spec
