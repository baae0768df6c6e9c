// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bcv/boogie.hpp"
#include "rng.hpp"

namespace bcv::testing {

/// A random, syntactically well-formed program over every declaration,
/// statement, expression and type form the printer supports. Not typed.
boogie::Program random_program(Rng& rng);

}  // namespace bcv::testing
