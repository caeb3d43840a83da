// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eth/config.hpp"
#include "eth/data.hpp"
#include "eth/train.hpp"

namespace eth::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInputError = 2, kStateError = 3, kNumericError = 4 };

struct DataSource {
  std::filesystem::path train, valid, test, stat;
  std::string synthetic;  // generator spec, takes precedence over paths
};

// Effective settings after merging defaults, preset, config file and flags.
struct RunConfig {
  DataSource data;
  model::EthConfig model;
  train::TrainConfig train;
  std::vector<std::size_t> m_grid;  // empty: just model.history
  std::filesystem::path out = "eth_out";
};

struct AblationMode {
  std::string name;
  model::EthConfig apply(model::EthConfig base) const;
};
// Accepts full, -se, -tst, -q, beta0, beta1, beta-learned (also without dash).
AblationMode parse_ablation(std::string_view name);
std::vector<AblationMode> parse_ablations(std::string_view list);

std::vector<std::size_t> parse_size_list(std::string_view list);

// Fills empty paths from $ETH_DATA_DIR/{train,valid,test,stat}.txt.
data::Dataset load(const DataSource& source);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eth::cli
