// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "gap/model.hpp"

namespace gap {

// Binary checkpoint, little-endian:
//   magic "GAPCKPT\0" | u32 version (1)
//   u64 n | n bytes of model-config JSON
//   u64 tensor count, then per tensor in Model::parameters() order:
//     u32 name length | name | u64 rows | u64 cols | rows*cols f64, row-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Model& model, const std::filesystem::path& path);
// Throws Io or ParseError on a malformed or mismatched file.
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace gap
