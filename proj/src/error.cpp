// SPDX-License-Identifier: Apache-2.0
#include "bcv/error.hpp"

namespace bcv {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Magic: return "E_MAGIC";
    case ErrorCode::Truncated: return "E_TRUNCATED";
    case ErrorCode::BadCpIndex: return "E_BAD_CP_INDEX";
    case ErrorCode::BadDescriptor: return "E_BAD_DESCRIPTOR";
    case ErrorCode::PlanInconsistent: return "E_PLAN_INCONSISTENT";
    case ErrorCode::Unsupported: return "E_UNSUPPORTED";
    case ErrorCode::StackMismatch: return "E_STACK_MISMATCH";
    case ErrorCode::Irreducible: return "E_IRREDUCIBLE";
    case ErrorCode::TypeConflict: return "E_TYPE_CONFLICT";
    case ErrorCode::Trap: return "E_TRAP";
    case ErrorCode::NoSuchPredicate: return "E_NO_SUCH_PREDICATE";
    case ErrorCode::SignatureMismatch: return "E_SIGNATURE_MISMATCH";
    case ErrorCode::NotAPredicate: return "E_NOT_A_PREDICATE";
    case ErrorCode::PredicateNotBoolean: return "E_PREDICATE_NOT_BOOLEAN";
    case ErrorCode::NotAggregable: return "E_NOT_AGGREGABLE";
    case ErrorCode::NonSsa: return "E_NON_SSA";
    case ErrorCode::BindingEscape: return "E_BINDING_ESCAPE";
    case ErrorCode::AggregateTooLarge: return "E_AGGREGATE_TOO_LARGE";
    case ErrorCode::InvariantOutsideLoop: return "E_INVARIANT_OUTSIDE_LOOP";
    case ErrorCode::InvariantNotAggregable: return "E_INVARIANT_NOT_AGGREGABLE";
    case ErrorCode::CheckNotAggregable: return "E_CHECK_NOT_AGGREGABLE";
    case ErrorCode::OldOutsideEnsures: return "E_OLD_OUTSIDE_ENSURES";
    case ErrorCode::ImpureSpec: return "E_IMPURE_SPEC";
    case ErrorCode::Syntax: return "E_SYNTAX";
    case ErrorCode::PreludeParse: return "E_PRELUDE_PARSE";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Config: return "E_CONFIG";
  }
  return "E_UNKNOWN";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoSuchPredicate:
    case ErrorCode::SignatureMismatch:
    case ErrorCode::NotAPredicate:
    case ErrorCode::PredicateNotBoolean:
    case ErrorCode::NotAggregable:
    case ErrorCode::NonSsa:
    case ErrorCode::BindingEscape:
    case ErrorCode::AggregateTooLarge:
    case ErrorCode::InvariantOutsideLoop:
    case ErrorCode::InvariantNotAggregable:
    case ErrorCode::CheckNotAggregable:
    case ErrorCode::OldOutsideEnsures:
    case ErrorCode::ImpureSpec:
      return 2;
    case ErrorCode::Io:
    case ErrorCode::Config:
    case ErrorCode::PreludeParse:
      return 3;
    default:
      return 1;
  }
}

namespace {
std::string render(ErrorCode code, const std::string& message, const std::string& where) {
  std::string out(error_code_name(code));
  if (!where.empty()) out += " at " + where;
  out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, std::string message, std::string where)
    : std::runtime_error(render(code, message, where)),
      code_(code),
      message_(std::move(message)),
      where_(std::move(where)) {}

Error Error::located(const std::string& outer) const {
  return Error(code_, message_, where_.empty() ? outer : outer + ":" + where_);
}

}  // namespace bcv
