// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "gap/decode.hpp"
#include "gap/model.hpp"
#include "gap/train.hpp"

namespace gap {

nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const BeamConfig& c);

// Missing keys keep their defaults; unknown keys are ignored.
ModelConfig model_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
BeamConfig beam_config_from_json(const nlohmann::json& j);

}  // namespace gap
