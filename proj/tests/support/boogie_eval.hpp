// SPDX-License-Identifier: Apache-2.0
//
// Ground evaluation of Boogie expressions, used to check derivations from
// prelude axioms and to compare translated expressions against the IR.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bcv/boogie.hpp"

namespace bcv::testing {

using GroundValue = std::variant<bool, long long, double>;

struct GroundEnv {
  std::map<std::string, GroundValue> vars;
  std::map<std::string, std::function<std::optional<GroundValue>(const std::vector<GroundValue>&)>> functions;
};

/// Empty when the expression mentions something the environment cannot evaluate.
std::optional<GroundValue> eval_ground(const boogie::Expr& e, const GroundEnv& env);

/// Replaces free occurrences of variables.
boogie::Expr substitute(const boogie::Expr& e, const std::map<std::string, boogie::Expr>& sub);

}  // namespace bcv::testing
