#pragma once
/// Line-oriented group definition files.
///
///     # comment
///     dimension 4
///     strata 2 1 1
///     bracket 1 2 -> {3:1}
///     bracket 1 3 -> {4:1}
///
/// Indices are 1-based. `strata [2,1,1]` is accepted as well. Each ordered
/// pair may appear once; `bracket 2 1` next to `bracket 1 2` is allowed and
/// checked for antisymmetry by validation.

#include "carnot/algebra.hpp"

#include <string>

namespace carnot {

RawAlgebra parse_group_text(const std::string& text);
RawAlgebra parse_group_file(const std::string& path);

/// parse_group_file followed by validation.
StratifiedAlgebra load_group(const std::string& path);

}  // namespace carnot
