// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "rng.hpp"

namespace bcv::testing {

struct LiftOracleStats {
  int methods = 0;
  int runs = 0;
  int traps = 0;
};

/// Generates one random method, lifts it and compares the bytecode
/// interpreter against eval_grimp on `inputs` argument vectors: same result
/// or both trapping, and the same final heap. Returns a description of the
/// first disagreement.
std::optional<std::string> check_random_lifting(Rng& rng, int index, int inputs, LiftOracleStats& stats);

}  // namespace bcv::testing
