// SPDX-License-Identifier: Apache-2.0
//
// Random call-free methods for the lifting oracle.
#pragma once

#include <vector>

#include "bcv/class_builder.hpp"
#include "bcv/interp.hpp"
#include "rng.hpp"

namespace bcv::testing {

/// Descriptor of every generated method: (int a, int b, boolean c, int[] arr, long w) -> int.
inline constexpr const char* kRandomMethodDescriptor = "(IIZ[IJ)I";

/// A class `gen/R<index>` with one static method `m` over int, boolean,
/// long and int[] locals: structured branches, bounded loops, switches,
/// ternaries (stack merges), dup/swap patterns and early returns.
ClassPlan random_method_class(Rng& rng, int index);

/// Arguments for kRandomMethodDescriptor; the array is allocated in `heap`
/// (or null now and then).
std::vector<interp::Value> random_arguments(Rng& rng, interp::TestHeap& heap);

}  // namespace bcv::testing
