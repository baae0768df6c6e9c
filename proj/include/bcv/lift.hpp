// SPDX-License-Identifier: Apache-2.0
//
// Bytecode to Grimp lifting, control-flow analysis and expected types.
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bcv/classfile.hpp"
#include "bcv/grimp.hpp"

namespace bcv {

/// Lifts `m` (declared in class `owner`, internal name) to Grimp.
/// Throws E_UNSUPPORTED or E_STACK_MISMATCH.
grimp::Body simulate_stack(const MethodInfo& m, std::string_view owner);

struct BasicBlock {
  std::size_t first = 0;  // statement range [first, last)
  std::size_t last = 0;
  std::vector<std::size_t> succs;
  std::vector<std::size_t> preds;
};

struct Cfg {
  std::vector<BasicBlock> blocks;  // entry block first
  std::vector<std::size_t> block_of;  // statement index -> block index
};

Cfg build_cfg(const grimp::Body& body);

struct LoopInfo {
  std::size_t head = 0;                  // block index
  std::string head_label;
  std::vector<std::size_t> backjumps;    // statement indices of jumps back to the head
  std::vector<std::size_t> exit_blocks;  // blocks outside the loop entered from inside, ascending
  std::vector<std::string> exits;        // their labels ("" when entered by fallthrough only)
  std::set<std::size_t> blocks;          // loop body, head included

  bool contains_stmt(const Cfg& cfg, std::size_t stmt) const { return blocks.count(cfg.block_of[stmt]) != 0; }
};

/// Natural loops, innermost first. Loops sharing a head are merged.
/// Throws E_IRREDUCIBLE when a cycle has no dominating head.
std::vector<LoopInfo> detect_loops(const Cfg& cfg, const grimp::Body& body);

/// Immediate dominators (entry maps to itself; unreachable blocks to SIZE_MAX).
std::vector<std::size_t> dominators(const Cfg& cfg);

/// Annotates every expression and local with its expected type.
/// Throws E_TYPE_CONFLICT.
grimp::Body infer_expected_types(const grimp::Body& body);

/// Natural type of an already typed expression: what it evaluates to
/// before any conversion to its expected type.
grimp::Ex natural_type(const grimp::Expr& e, const grimp::Body& body);

}  // namespace bcv
