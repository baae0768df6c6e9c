// SPDX-License-Identifier: Apache-2.0
#include "bcv/prelude.hpp"

#include "bcv/error.hpp"

namespace bcv {

boogie::Program emit_prelude(std::string_view text) {
  try {
    return boogie::parse(text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Syntax) throw;
    throw Error(ErrorCode::PreludeParse, e.message(), e.where());
  }
}

}  // namespace bcv
