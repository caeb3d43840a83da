// SPDX-License-Identifier: Apache-2.0
#include "eth/train.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "eth/error.hpp"
#include "eth/eval.hpp"

namespace eth::train {

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("learning rate must be > 0");
  if (patience < 1) throw InvalidArgument("patience must be >= 1");
  if (grad_clip_norm && !(*grad_clip_norm > 0.0))
    throw InvalidArgument("gradient clip norm must be > 0");
}

Tensor one_hot_labels(std::span<const ad::Index> targets, std::size_t num_candidates) {
  Tensor y(targets.size(), num_candidates);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= num_candidates) throw InvalidArgument("target out of range");
    y(i, targets[i]) = 1.0;
  }
  return y;
}

ad::Var loss(ad::Var logits, std::span<const ad::Index> targets, model::LossKind kind) {
  if (kind == model::LossKind::softmax_ce) return ad::softmax_cross_entropy(logits, targets);
  return ad::binary_cross_entropy(logits, one_hot_labels(targets, logits.cols()));
}

Trainer::Trainer(model::EthConfig config, TrainConfig train, data::Vocab vocab)
    : config_(config), train_(train), vocab_(vocab), rng_(train.seed) {
  config_.validate();
  train_.validate();
  params_ = model::init_params(config_, vocab_, rng_);
  optimizer_ = ad::Adam({.lr = train_.lr});
}

Trainer::Trainer(model::EthConfig config, TrainConfig train, data::Vocab vocab,
                 model::EthParams params)
    : config_(config), train_(train), vocab_(vocab), params_(std::move(params)), rng_(train.seed) {
  config_.validate();
  train_.validate();
  optimizer_ = ad::Adam({.lr = train_.lr});
}

double Trainer::train_epoch(std::span<const data::Snapshot> train_snapshots) {
  if (train_snapshots.empty()) throw InvalidArgument("no training snapshots");
  ++epoch_;
  double total = 0.0;
  for (const data::Snapshot& target : train_snapshots) total += train_step(train_snapshots, target);
  return total / static_cast<double>(train_snapshots.size());
}

double Trainer::train_step(std::span<const data::Snapshot> pool, const data::Snapshot& target) {
  const auto history = data::history_before(pool, target.time(), config_.history);
  const model::QueryBatch batch = model::queries_from_snapshot(target);
  if (batch.queries.empty()) return 0.0;

  ad::Tape tape;
  const model::BoundParams bound = model::bind(tape, params_, true);
  double value = 0.0;
  std::optional<model::ForwardResult> fwd;
  try {
    fwd = model::forward(bound, config_, history, batch.queries, {.training = true, .rng = &rng_});
    ad::Var l = loss(fwd->logits, batch.targets, config_.loss);
    value = l.value().item();
    tape.backward(l);
  } catch (const NumericError& e) {
    throw NumericError("training at timestamp " + std::to_string(target.time()) + ": " + e.what());
  }
  if (!std::isfinite(value))
    throw NumericError("non-finite loss at timestamp " + std::to_string(target.time()));

  std::vector<Tensor*> params;
  std::vector<Tensor> grads;
  model::for_each_param(
      [&](const std::string&, Tensor& p, const ad::Var& v) {
        params.push_back(&p);
        grads.push_back(tape.grad(v.id));
      },
      params_, bound);
  std::vector<Tensor*> grad_ptrs;
  for (Tensor& g : grads) grad_ptrs.push_back(&g);
  if (train_.grad_clip_norm) ad::clip_global_norm(grad_ptrs, *train_.grad_clip_norm);
  const std::vector<const Tensor*> const_grads(grad_ptrs.begin(), grad_ptrs.end());
  optimizer_.step(params, const_grads);
  if (!model::all_finite(params_))
    throw NumericError("non-finite parameters after update at timestamp " + std::to_string(target.time()));

  if (hook_) hook_({epoch_, target.time(), value, &*fwd, &params_});
  return value;
}

double Trainer::evaluate_loss(std::span<const data::Snapshot> pool, const data::Snapshot& target) {
  const auto history = data::history_before(pool, target.time(), config_.history);
  const model::QueryBatch batch = model::queries_from_snapshot(target);
  ad::Tape tape;
  const model::BoundParams bound = model::bind(tape, params_, false);
  const auto fwd = model::forward(bound, config_, history, batch.queries, {});
  return loss(fwd.logits, batch.targets, config_.loss).value().item();
}

FitResult fit(const data::PreparedData& data, const model::EthConfig& config,
              const TrainConfig& train, const FitOptions& options) {
  Validator validate = options.validator;
  if (!validate) {
    if (data.valid.empty()) throw InvalidArgument("fit needs a validation split");
    validate = [&](const model::EthParams& p) {
      return eval::evaluate(p, config, data, data.valid, eval::FilterSetting::time).mrr;
    };
  }
  Trainer trainer(config, train, data.vocab);
  if (options.step_hook) trainer.set_step_hook(options.step_hook);

  FitResult result;
  result.best_params = trainer.params();
  result.best_val_mrr = -1.0;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= train.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const double train_loss = trainer.train_epoch(data.train);
    const double val = validate(trainer.params());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back({epoch, train_loss, val, seconds});
    if (options.log) {
      nlohmann::json line{{"epoch", epoch}, {"train_loss", train_loss}, {"val_mrr", val},
                          {"seconds", seconds}};
      *options.log << line.dump() << '\n' << std::flush;
    }
    if (val > result.best_val_mrr) {
      result.best_val_mrr = val;
      result.best_epoch = epoch;
      result.best_params = trainer.params();
      stale = 0;
    } else if (++stale >= train.patience) {
      break;
    }
  }
  return result;
}

}  // namespace eth::train
