// SPDX-License-Identifier: Apache-2.0
#pragma once

// Learnable parameters. ParamSet is generic over the stored type so the same
// layout holds plain tensors (EthParams) and their tape bindings.

#include <random>
#include <string>
#include <vector>

#include "eth/config.hpp"
#include "eth/data.hpp"
#include "eth/tape.hpp"
#include "eth/tensor.hpp"

namespace eth::model {

template <class T>
struct RgcnLayer {
  T neighbor;  // W1, applied to h_s + v_r
  T self;      // W2, applied to h_o
};

template <class T>
struct GruWeights {
  T w_reset, u_reset, b_reset;
  T w_update, u_update, b_update;
  T w_cand, u_cand, b_cand;
};

template <class T>
struct ParamSet {
  T entity;             // |V| x d
  T rel_euclid;         // 2|E| x d
  T rel_hyper;          // 2|E| x d, tangent coordinates mapped by exp_0 at use
  std::vector<RgcnLayer<T>> rgcn;
  GruWeights<T> gru;
  T cand_weight;        // d x d
  T cand_bias;          // 1 x d
  T query_weight;       // 2d x d
  T query_bias;         // 1 x d
  T tangent_shared;     // d x d, used by both entity roles
  T tangent_cand;       // d x d
  T tangent_query;      // d x d
  T curvature_raw;      // 2|E| x 1, c_r = softplus(raw)
  T bias_query;         // |V| x 1
  T bias_cand;          // 1 x |V|
  T mix_entity;         // |V| x w
  T mix_relation;       // 2|E| x w
  T beta_raw;           // 2|E| x 1, only for BetaMode::per_relation_learned
};

using EthParams = ParamSet<Tensor>;
using BoundParams = ParamSet<ad::Var>;

// Calls f(name, a.field, b.field, ...) for every parameter in a fixed order.
// All sets must have the same number of RGCN layers.
template <class F, class First, class... Rest>
void for_each_param(F&& f, First& first, Rest&... rest) {
  f(std::string("entity_emb"), first.entity, rest.entity...);
  f(std::string("rel_emb_euclid"), first.rel_euclid, rest.rel_euclid...);
  f(std::string("rel_emb_hyper"), first.rel_hyper, rest.rel_hyper...);
  for (std::size_t i = 0; i < first.rgcn.size(); ++i) {
    const std::string p = "rgcn." + std::to_string(i) + ".";
    f(p + "W1", first.rgcn[i].neighbor, rest.rgcn[i].neighbor...);
    f(p + "W2", first.rgcn[i].self, rest.rgcn[i].self...);
  }
  f(std::string("gru.w_reset"), first.gru.w_reset, rest.gru.w_reset...);
  f(std::string("gru.u_reset"), first.gru.u_reset, rest.gru.u_reset...);
  f(std::string("gru.b_reset"), first.gru.b_reset, rest.gru.b_reset...);
  f(std::string("gru.w_update"), first.gru.w_update, rest.gru.w_update...);
  f(std::string("gru.u_update"), first.gru.u_update, rest.gru.u_update...);
  f(std::string("gru.b_update"), first.gru.b_update, rest.gru.b_update...);
  f(std::string("gru.w_cand"), first.gru.w_cand, rest.gru.w_cand...);
  f(std::string("gru.u_cand"), first.gru.u_cand, rest.gru.u_cand...);
  f(std::string("gru.b_cand"), first.gru.b_cand, rest.gru.b_cand...);
  f(std::string("cand.weight"), first.cand_weight, rest.cand_weight...);
  f(std::string("cand.bias"), first.cand_bias, rest.cand_bias...);
  f(std::string("query.weight"), first.query_weight, rest.query_weight...);
  f(std::string("query.bias"), first.query_bias, rest.query_bias...);
  f(std::string("tangent.shared"), first.tangent_shared, rest.tangent_shared...);
  f(std::string("tangent.cand"), first.tangent_cand, rest.tangent_cand...);
  f(std::string("tangent.query"), first.tangent_query, rest.tangent_query...);
  f(std::string("curvature_raw"), first.curvature_raw, rest.curvature_raw...);
  f(std::string("bias_query"), first.bias_query, rest.bias_query...);
  f(std::string("bias_cand"), first.bias_cand, rest.bias_cand...);
  f(std::string("mix.entity"), first.mix_entity, rest.mix_entity...);
  f(std::string("mix.relation"), first.mix_relation, rest.mix_relation...);
  f(std::string("beta_raw"), first.beta_raw, rest.beta_raw...);
}

// softplus^{-1}(1): training starts at c_r = 1.
inline constexpr double kUnitCurvatureRaw = 0.54132485461291810;

// Zero-filled parameters with the shapes implied by config and vocab.
EthParams zero_params(const EthConfig& config, const data::Vocab& vocab);
// Glorot-uniform matrices, N(0, 1/d) embeddings, zero biases, c_r = 1.
EthParams init_params(const EthConfig& config, const data::Vocab& vocab, std::mt19937_64& rng);

BoundParams bind(ad::Tape& tape, const EthParams& params, bool requires_grad);

std::size_t parameter_count(const EthParams& params);
bool all_finite(const EthParams& params);

}  // namespace eth::model
