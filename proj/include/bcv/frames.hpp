// SPDX-License-Identifier: Apache-2.0
//
// Two-point frame inference over translated Boogie procedures.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "bcv/boogie.hpp"

namespace bcv::frames {

enum class Frame { Empty, WholeHeap };

struct FrameInfo {
  Frame frame = Frame::Empty;
  std::string provenance;  // first heap-writing statement or offending callee
};

using FrameResult = std::map<std::string, FrameInfo>;  // by procedure name

/// Optimistic fixpoint: a procedure is WHOLE_HEAP iff its body assigns the
/// heap, or calls a bodiless or WHOLE_HEAP procedure (the prelude's `new`
/// and `array.new` are bodiless). Bodiless procedures are WHOLE_HEAP.
FrameResult infer_frames(const boogie::Program& p);

struct SpecMethod {
  std::string procedure;  // name of its procedure form
  std::string display;    // for diagnostics, e.g. "pkg.C.m"
};

/// Throws E_IMPURE_SPEC for the first specification method that is not EMPTY.
void enforce_purity(const std::vector<SpecMethod>& methods, const FrameResult& frames);

/// Sets each implemented procedure's modifies clause from `frames`:
/// `modifies #heap` for WHOLE_HEAP, none for EMPTY.
void apply_frames(boogie::Program& p, const FrameResult& frames);

}  // namespace bcv::frames
