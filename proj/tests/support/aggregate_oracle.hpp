// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "bcv/class_builder.hpp"
#include "rng.hpp"

namespace bcv::testing {

/// Descriptors of the generated predicates: two ints, two booleans.
inline constexpr const char* kAggregableBool = "(IIZZ)Z";
inline constexpr const char* kAggregableInt = "(IIZZ)I";

/// One static method `f` whose body is a straight-line chain of stores
/// into reused local slots ending in a return. Expressions are at most
/// `max_depth` deep and combine Operator/Special calls with eager & | ^
/// and + - *.
ClassPlan random_aggregable_class(Rng& rng, int index, int max_depth = 6);

struct AggregateOracleStats {
  int bodies = 0;
  int runs = 0;
  int max_nodes = 0;
};

/// Generates one body, aggregates it and compares spec::evaluate against
/// eval_grimp (operator calls run their lifted library bodies) on `inputs`
/// random argument vectors. Returns a description of the first mismatch.
std::optional<std::string> check_random_aggregate(Rng& rng, int index, int inputs, AggregateOracleStats& stats);

}  // namespace bcv::testing
