// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bcv {

enum class ErrorCode {
  // classfile
  Magic,
  Truncated,
  BadCpIndex,
  BadDescriptor,
  PlanInconsistent,
  // lifting and typing
  Unsupported,
  StackMismatch,
  Irreducible,
  TypeConflict,
  Trap,
  // specification
  NoSuchPredicate,
  SignatureMismatch,
  NotAPredicate,
  PredicateNotBoolean,
  NotAggregable,
  NonSsa,
  BindingEscape,
  AggregateTooLarge,
  InvariantOutsideLoop,
  InvariantNotAggregable,
  CheckNotAggregable,
  OldOutsideEnsures,
  ImpureSpec,
  // boogie text
  Syntax,
  PreludeParse,
  // driver
  Io,
  Config,
};

/// Stable upper-case name, e.g. "E_NO_SUCH_PREDICATE".
std::string_view error_code_name(ErrorCode code);

/// Process exit status for an error reaching the driver:
/// 1 translation, 2 specification, 3 I/O or configuration.
int exit_code_for(ErrorCode code);

/// The single exception type used throughout the library. `where` names the
/// class/method/offset the problem was found at, when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string where = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& where() const noexcept { return where_; }

  /// Returns a copy with `outer` prepended to the location.
  Error located(const std::string& outer) const;

 private:
  ErrorCode code_;
  std::string message_;
  std::string where_;
};

}  // namespace bcv
