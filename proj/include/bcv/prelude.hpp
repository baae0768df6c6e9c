// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "bcv/boogie.hpp"

namespace bcv {

/// The heap model shipped with the library.
std::string_view default_prelude_text();

/// Parses a prelude template. Syntax errors surface as E_PRELUDE_PARSE.
boogie::Program emit_prelude(std::string_view text);

}  // namespace bcv
