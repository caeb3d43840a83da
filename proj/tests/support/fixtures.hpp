// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <span>
#include <vector>

#include "eth/model.hpp"
#include "eth/params.hpp"
#include "oracles.hpp"

namespace eth::testing {

// 6 entities, 2 base relations, two history snapshots and one target.
struct TinyInstance {
  data::Vocab vocab{6, 2};
  std::vector<data::Snapshot> snapshots;
  model::EthConfig config;
  model::EthParams params;

  std::vector<const data::Snapshot*> history() const { return {&snapshots[0], &snapshots[1]}; }
  const data::Snapshot& target() const { return snapshots[2]; }
};

inline TinyInstance tiny_instance(std::uint64_t seed = 1) {
  TinyInstance t;
  const std::vector<data::Quadruple> facts{{0, 0, 1, 0}, {1, 1, 2, 0}, {3, 0, 4, 0}, {4, 0, 4, 0},
                                           {2, 0, 3, 1}, {5, 1, 0, 1}, {2, 0, 3, 1}, {1, 0, 5, 1},
                                           {0, 0, 2, 2}, {3, 1, 5, 2}, {4, 0, 1, 2}};
  t.snapshots = data::build_snapshots(data::add_inverses(facts, t.vocab), t.vocab.num_entities);
  t.config.dim = 4;
  t.config.mix_dim = 3;
  t.config.layers = 2;
  t.config.history = 2;
  std::mt19937_64 rng(seed);
  t.params = model::init_params(t.config, t.vocab, rng);
  // Non-zero biases and per-relation values so every tensor influences the loss.
  for (model::ParamSet<Tensor>* p : {&t.params}) {
    for (Tensor* b : {&p->cand_bias, &p->query_bias, &p->gru.b_reset, &p->gru.b_update,
                      &p->gru.b_cand, &p->bias_query, &p->bias_cand, &p->beta_raw})
      *b = random_tensor(b->rows(), b->cols(), rng, -0.3, 0.3);
    for (double& c : p->curvature_raw.values()) c += std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
  }
  return t;
}

// Rebinds leaves produced in for_each_param order into a BoundParams.
inline model::BoundParams bound_from_leaves(const model::EthParams& shape, std::span<const ad::Var> leaves) {
  model::BoundParams b;
  b.rgcn.resize(shape.rgcn.size());
  std::size_t i = 0;
  model::for_each_param([&](const std::string&, const Tensor&, ad::Var& v) { v = leaves[i++]; }, shape, b);
  return b;
}

inline std::vector<Tensor> flatten(const model::EthParams& p) {
  std::vector<Tensor> out;
  model::for_each_param([&](const std::string&, const Tensor& t) { out.push_back(t); }, p);
  return out;
}

inline std::vector<std::string> param_names(const model::EthParams& p) {
  std::vector<std::string> out;
  model::for_each_param([&](const std::string& n, const Tensor&) { out.push_back(n); }, p);
  return out;
}

// Loss of the tiny instance as a function of all parameters, with RReLU in
// training mode on a generator reseeded per evaluation.
inline ScalarFn tiny_loss(const TinyInstance& t, model::EthConfig config) {
  return [&t, config](ad::Tape&, std::span<const ad::Var> leaves) {
    const auto bound = bound_from_leaves(t.params, leaves);
    const auto batch = model::queries_from_snapshot(t.target());
    std::mt19937_64 rng(123);
    const auto hist = t.history();
    const auto fwd = model::forward(bound, config, hist, batch.queries, {.training = true, .rng = &rng});
    return ad::softmax_cross_entropy(fwd.logits, batch.targets);
  };
}

}  // namespace eth::testing
