// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "gap/trace.hpp"

namespace gap {

// Fixed-width table of weights with row and column labels; blocked rows
// print as dashes. Throws IndexOutOfRange for a bad layer.
std::string render_text(const AttentionTrace& trace, std::size_t layer);

// Standalone SVG heatmap, darker cells for larger weights.
std::string render_svg(const AttentionTrace& trace, std::size_t layer);

}  // namespace gap
