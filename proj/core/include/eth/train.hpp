// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "eth/adam.hpp"
#include "eth/data.hpp"
#include "eth/model.hpp"

namespace eth::train {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::optional<double> grad_clip_norm = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Scalar training loss over logits (|Q| x |V|) and one gold per row.
ad::Var loss(ad::Var logits, std::span<const ad::Index> targets, model::LossKind kind);

// 0/1 label matrix with y = 1 only at each row's gold.
Tensor one_hot_labels(std::span<const ad::Index> targets, std::size_t num_candidates);

struct StepInfo {
  std::size_t epoch = 0;
  data::TimeIndex time = 0;
  double loss = 0.0;
  const model::ForwardResult* forward = nullptr;  // values from before the update
  const model::EthParams* params = nullptr;       // after the update
};
using StepHook = std::function<void(const StepInfo&)>;

class Trainer {
 public:
  Trainer(model::EthConfig config, TrainConfig train, data::Vocab vocab);
  // Starts from existing parameters instead of a fresh initialization.
  Trainer(model::EthConfig config, TrainConfig train, data::Vocab vocab, model::EthParams params);

  // One pass over the train snapshots in time order: one Adam step per target
  // timestamp, history drawn from earlier train snapshots. Returns the mean
  // per-timestamp loss.
  double train_epoch(std::span<const data::Snapshot> train_snapshots);
  // Forward, backward and one Adam step for a single target; history comes
  // from `pool`. Returns the loss before the update.
  double train_step(std::span<const data::Snapshot> pool, const data::Snapshot& target);
  // Loss of a single timestamp without updating.
  double evaluate_loss(std::span<const data::Snapshot> pool, const data::Snapshot& target);

  void set_step_hook(StepHook hook) { hook_ = std::move(hook); }

  const model::EthParams& params() const { return params_; }
  model::EthParams& params() { return params_; }
  const model::EthConfig& config() const { return config_; }
  const TrainConfig& train_config() const { return train_; }
  std::size_t epochs_run() const { return epoch_; }

 private:
  model::EthConfig config_;
  TrainConfig train_;
  data::Vocab vocab_;
  model::EthParams params_;
  ad::Adam optimizer_;
  std::mt19937_64 rng_;
  std::size_t epoch_ = 0;
  StepHook hook_;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_mrr = 0.0;
  double seconds = 0.0;
};

struct FitResult {
  model::EthParams best_params;
  std::size_t best_epoch = 0;
  double best_val_mrr = 0.0;
  std::vector<EpochLog> log;
};

// Maps parameters to a validation MRR.
using Validator = std::function<double(const model::EthParams&)>;

struct FitOptions {
  Validator validator;     // default: time-filtered MRR on the valid split
  std::ostream* log = nullptr;  // one JSON object per epoch
  StepHook step_hook;
};

FitResult fit(const data::PreparedData& data, const model::EthConfig& config,
              const TrainConfig& train, const FitOptions& options = {});

}  // namespace eth::train
