// SPDX-License-Identifier: Apache-2.0
#include "eth/model.hpp"

#include <cmath>
#include <string>

#include "eth/error.hpp"
#include "eth/hyperbolic_ops.hpp"

namespace eth::model {

using ad::Index;
using ad::Var;

void QueryBatch::validate(const data::Vocab& vocab) const {
  if (targets.size() != queries.size() && !targets.empty())
    throw InvalidArgument("query batch has " + std::to_string(queries.size()) + " queries but " +
                          std::to_string(targets.size()) + " targets");
  for (const Query& q : queries) {
    if (q.entity >= vocab.num_entities)
      throw InvalidArgument("query entity id " + std::to_string(q.entity) + " out of range");
    if (q.relation >= vocab.total_relations())
      throw InvalidArgument("unknown relation id " + std::to_string(q.relation));
  }
  for (data::EntityId t : targets)
    if (t >= vocab.num_entities)
      throw InvalidArgument("target entity id " + std::to_string(t) + " out of range");
}

QueryBatch queries_from_snapshot(const data::Snapshot& snapshot) {
  QueryBatch batch;
  batch.time = snapshot.time();
  batch.queries.reserve(snapshot.triples().size());
  batch.targets.reserve(snapshot.triples().size());
  for (const data::Triple& t : snapshot.triples()) {
    batch.queries.push_back({t.subject, t.relation});
    batch.targets.push_back(t.object);
  }
  return batch;
}

namespace {

Var gamma(Var x, Gamma g) { return g == Gamma::relu ? ad::relu(x) : x; }

std::vector<Index> query_entities(std::span<const Query> queries) {
  std::vector<Index> out;
  out.reserve(queries.size());
  for (const Query& q : queries) out.push_back(q.entity);
  return out;
}

std::vector<Index> query_relations(std::span<const Query> queries, std::size_t num_relations) {
  std::vector<Index> out;
  out.reserve(queries.size());
  for (const Query& q : queries) {
    if (q.relation >= num_relations)
      throw InvalidArgument("unknown relation id " + std::to_string(q.relation));
    out.push_back(q.relation);
  }
  return out;
}

}  // namespace

Var normalize_sqrt_d(Var x) {
  if (x.cols() < 2) throw InvalidArgument("normalize_sqrt_d needs d >= 2");
  return ad::scale(ad::layer_norm(x, 1e-8), 1.0 / std::sqrt(static_cast<double>(x.cols())));
}

Var rgcn_layer(Var h, const data::Snapshot& snapshot, Var rel_euclid,
               const RgcnLayer<Var>& layer, const ad::RReluOptions& act) {
  Var self = ad::matmul(h, layer.self);
  if (snapshot.triples().empty()) return ad::rrelu(self, act);
  Var msg = ad::add(ad::gather_rows(h, snapshot.subjects()),
                    ad::gather_rows(rel_euclid, snapshot.relations()));
  // W1 is linear, so the mean can be taken before the projection.
  Var agg = ad::scatter_mean_rows(msg, snapshot.objects(), h.rows());
  return ad::rrelu(ad::add(ad::matmul(agg, layer.neighbor), self), act);
}

Var gru_cell(Var hidden, Var input, const GruWeights<Var>& g) {
  auto gate = [&](Var w, Var u, Var b) {
    return ad::sigmoid(
        ad::add_row_bias(ad::add(ad::matmul(input, w), ad::matmul(hidden, u)), b));
  };
  Var reset = gate(g.w_reset, g.u_reset, g.b_reset);
  Var update = gate(g.w_update, g.u_update, g.b_update);
  Var cand = ad::tanh(ad::add_row_bias(
      ad::add(ad::matmul(input, g.w_cand), ad::hadamard(reset, ad::matmul(hidden, g.u_cand))),
      g.b_cand));
  return ad::add(cand, ad::hadamard(update, ad::sub(hidden, cand)));
}

Var encode_history(std::span<const data::Snapshot* const> history, const BoundParams& params,
                   Var rel_euclid, const EthConfig& config, const ForwardOptions& options) {
  if (options.training && options.rng == nullptr)
    throw InvalidArgument("training forward pass needs an RNG");
  ad::RReluOptions act;
  act.training = options.training;
  act.rng = options.rng;
  Var h = normalize_sqrt_d(params.entity);
  for (const data::Snapshot* snap : history) {
    Var x = h;
    for (std::size_t i = 0; i < config.layers; ++i)
      x = rgcn_layer(x, *snap, rel_euclid, params.rgcn.at(i), act);
    h = normalize_sqrt_d(gru_cell(h, normalize_sqrt_d(x), params.gru));
  }
  return h;
}

EntityRoles candidate_transform(Var states, const BoundParams& params, const EthConfig& config) {
  EntityRoles out;
  out.euclid = ad::add_row_bias(ad::matmul(states, params.cand_weight), params.cand_bias);
  if (!config.tangent_transform) {
    out.tangent = states;
    return out;
  }
  Var mixed = ad::hadamard(ad::tanh(out.euclid), states);
  out.tangent = ad::matmul(gamma(ad::matmul(mixed, params.tangent_shared), config.gamma),
                           params.tangent_cand);
  return out;
}

EntityRoles query_transform(Var states, std::span<const Query> queries, Var rel_euclid,
                            const BoundParams& params, const EthConfig& config) {
  const auto ents = query_entities(queries);
  const auto rels = query_relations(queries, rel_euclid.rows());
  Var hq = ad::gather_rows(states, ents);
  Var vq = ad::gather_rows(rel_euclid, rels);
  EntityRoles out;
  if (!config.query_transform) {
    out.euclid = out.tangent = ad::add(hq, vq);
    return out;
  }
  out.euclid = ad::add_row_bias(ad::matmul(ad::concat_cols(hq, vq), params.query_weight),
                                params.query_bias);
  if (!config.tangent_transform) {
    out.tangent = hq;
    return out;
  }
  Var mixed = ad::hadamard(ad::tanh(out.euclid), hq);
  out.tangent = ad::matmul(gamma(ad::matmul(mixed, params.tangent_shared), config.gamma),
                           params.tangent_query);
  return out;
}

Var score_euclidean(Var query_euclid, Var cand_euclid) {
  return ad::matmul_nt(query_euclid, cand_euclid);
}

HyperbolicScores score_hyperbolic(Var query_tangent, Var cand_tangent,
                                  std::span<const Query> queries, const BoundParams& params) {
  const auto ents = query_entities(queries);
  const auto rels = query_relations(queries, params.curvature_raw.rows());
  HyperbolicScores out;
  out.curvature = ad::gather_rows(ad::softplus(params.curvature_raw), rels);
  Var hq = ad::exp_map_rows(query_tangent, out.curvature);
  Var vr = ad::exp_map_rows(ad::gather_rows(params.rel_hyper, rels), out.curvature);
  out.query_point = ad::mobius_add_rows(hq, vr, out.curvature);
  Var sq = ad::poincare_pair_sqdist(out.query_point, cand_tangent, out.curvature);
  out.scores = ad::add_row_bias(
      ad::add_col_bias(ad::scale(sq, -1.0), ad::gather_rows(params.bias_query, ents)),
      params.bias_cand);
  return out;
}

Var mixing_coefficient(std::span<const Query> queries, const BoundParams& params,
                       const EthConfig& config) {
  const auto rels = query_relations(queries, params.mix_relation.rows());
  ad::Tape& tape = *params.entity.tape;
  switch (config.beta_mode) {
    case BetaMode::fixed_zero: return tape.constant(Tensor(queries.size(), 1, 0.0));
    case BetaMode::fixed_one: return tape.constant(Tensor(queries.size(), 1, 1.0));
    case BetaMode::per_relation_learned:
      return ad::sigmoid(ad::gather_rows(params.beta_raw, rels));
    case BetaMode::query_specific: break;
  }
  const auto ents = query_entities(queries);
  Var inner = ad::row_sum(ad::hadamard(ad::gather_rows(params.mix_entity, ents),
                                       ad::gather_rows(params.mix_relation, rels)));
  return ad::sigmoid(ad::scale(inner, 1.0 / static_cast<double>(params.mix_entity.cols())));
}

Var score_hybrid(Var hyper, Var euclid, Var beta) {
  return ad::add(ad::scale_rows(hyper, beta), ad::scale_rows(euclid, ad::affine(beta, -1.0, 1.0)));
}

ForwardResult forward(const BoundParams& params, const EthConfig& config,
                      std::span<const data::Snapshot* const> history,
                      std::span<const Query> queries, const ForwardOptions& options) {
  if (queries.empty()) throw InvalidArgument("forward pass needs at least one query");
  ForwardResult r;
  Var rel = normalize_sqrt_d(params.rel_euclid);
  r.states = config.semantic_encoder ? encode_history(history, params, rel, config, options)
                                     : params.entity;
  r.candidates = candidate_transform(r.states, params, config);
  r.queries = query_transform(r.states, queries, rel, params, config);
  r.score_euclid = score_euclidean(r.queries.euclid, r.candidates.euclid);
  r.hyper = score_hyperbolic(r.queries.tangent, r.candidates.tangent, queries, params);
  r.beta = mixing_coefficient(queries, params, config);
  r.logits = score_hybrid(r.hyper.scores, r.score_euclid, r.beta);
  return r;
}

Tensor score_queries(const EthParams& params, const EthConfig& config,
                     std::span<const data::Snapshot* const> history,
                     std::span<const Query> queries) {
  ad::Tape tape;
  const BoundParams bound = bind(tape, params, false);
  return forward(bound, config, history, queries, {}).logits.value();
}

Tensor sigmoid_scores(const Tensor& logits) {
  Tensor out = logits;
  for (double& x : out.values()) x = 1.0 / (1.0 + std::exp(-x));
  return out;
}

}  // namespace eth::model
