// SPDX-License-Identifier: Apache-2.0
//
// Direct bytecode interpreter: the reference side of the lifting oracle.
#pragma once

#include <vector>

#include "bcv/classfile.hpp"
#include "bcv/interp.hpp"

namespace bcv::testing {

/// Runs the code of `m` on `args` (one entry per declared parameter,
/// receiver first). Calls are not supported. Throws E_TRAP like eval_grimp.
interp::Value run_bytecode(const MethodInfo& m, const std::vector<interp::Value>& args, interp::TestHeap& heap);

}  // namespace bcv::testing
