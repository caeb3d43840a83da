// SPDX-License-Identifier: Apache-2.0
#pragma once

// Binary checkpoint: magic "ETHCKPT\0", u32 version, u64 header length, JSON
// header (config, vocab, tensor table, metadata), raw little-endian doubles,
// u64 FNV-1a checksum of everything before it.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "eth/config.hpp"
#include "eth/data.hpp"
#include "eth/params.hpp"

namespace eth::model {

struct Checkpoint {
  EthConfig config;
  data::Vocab vocab;
  EthParams params;
  nlohmann::json metadata;
};

void save_checkpoint(const std::filesystem::path& path, const EthConfig& config,
                     const data::Vocab& vocab, const EthParams& params,
                     const nlohmann::json& metadata = nlohmann::json::object());

// Throws StateError on a missing, truncated or corrupted file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace eth::model
