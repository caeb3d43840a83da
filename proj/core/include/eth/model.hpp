// SPDX-License-Identifier: Apache-2.0
#pragma once

// Forward pass: snapshot encoder, tangent-space transforms and the hybrid
// Euclidean/hyperbolic scoring head. All functions record onto the tape that
// owns their inputs.

#include <random>
#include <span>
#include <vector>

#include "eth/config.hpp"
#include "eth/data.hpp"
#include "eth/ops.hpp"
#include "eth/params.hpp"

namespace eth::model {

struct Query {
  data::EntityId entity = 0;
  data::RelationId relation = 0;
};

struct QueryBatch {
  std::vector<Query> queries;
  std::vector<data::EntityId> targets;
  data::TimeIndex time = 0;

  void validate(const data::Vocab& vocab) const;
};

// One query per (augmented) triple of the snapshot, gold = object.
QueryBatch queries_from_snapshot(const data::Snapshot& snapshot);

struct ForwardOptions {
  bool training = false;
  std::mt19937_64* rng = nullptr;  // RReLU slopes; required when training
};

// layer_norm(x) / sqrt(d), giving unit-norm rows.
ad::Var normalize_sqrt_d(ad::Var x);

ad::Var rgcn_layer(ad::Var h, const data::Snapshot& snapshot, ad::Var rel_euclid,
                   const RgcnLayer<ad::Var>& layer, const ad::RReluOptions& act);

// h' = (1 - z) * n + z * h with reset gate applied to the hidden projection.
ad::Var gru_cell(ad::Var hidden, ad::Var input, const GruWeights<ad::Var>& gru);

// `rel_euclid` is the normalized relation table used by the RGCN messages.
ad::Var encode_history(std::span<const data::Snapshot* const> history, const BoundParams& params,
                       ad::Var rel_euclid, const EthConfig& config,
                       const ForwardOptions& options);

struct EntityRoles {
  ad::Var euclid;   // h^e
  ad::Var tangent;  // h^g
};

EntityRoles candidate_transform(ad::Var states, const BoundParams& params, const EthConfig& config);

EntityRoles query_transform(ad::Var states, std::span<const Query> queries, ad::Var rel_euclid,
                            const BoundParams& params, const EthConfig& config);

ad::Var score_euclidean(ad::Var query_euclid, ad::Var cand_euclid);

struct HyperbolicScores {
  ad::Var scores;     // |Q| x |V|
  ad::Var curvature;  // |Q| x 1, c_r of each query
  ad::Var query_point;  // |Q| x d, h_q^b (+) v_r^b
};

HyperbolicScores score_hyperbolic(ad::Var query_tangent, ad::Var cand_tangent,
                                  std::span<const Query> queries, const BoundParams& params);

// |Q| x 1.
ad::Var mixing_coefficient(std::span<const Query> queries, const BoundParams& params,
                           const EthConfig& config);

// Logits beta * S_b + (1 - beta) * S_e; the reported score is sigmoid(logits).
ad::Var score_hybrid(ad::Var hyper, ad::Var euclid, ad::Var beta);

struct ForwardResult {
  ad::Var states;  // H_t
  EntityRoles candidates;
  EntityRoles queries;
  ad::Var score_euclid;
  HyperbolicScores hyper;
  ad::Var beta;
  ad::Var logits;
};

ForwardResult forward(const BoundParams& params, const EthConfig& config,
                      std::span<const data::Snapshot* const> history,
                      std::span<const Query> queries, const ForwardOptions& options);

// Evaluation-mode logits for a frozen parameter set.
Tensor score_queries(const EthParams& params, const EthConfig& config,
                     std::span<const data::Snapshot* const> history,
                     std::span<const Query> queries);

Tensor sigmoid_scores(const Tensor& logits);

}  // namespace eth::model
