// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON (de)serialization of configs. Missing keys keep their current value,
// unknown keys are rejected.

#include <nlohmann/json.hpp>

#include "eth/config.hpp"
#include "eth/train.hpp"

namespace eth::model {
void to_json(nlohmann::json& j, const EthConfig& c);
void from_json(const nlohmann::json& j, EthConfig& c);
}  // namespace eth::model

namespace eth::train {
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
}  // namespace eth::train
