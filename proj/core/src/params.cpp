// SPDX-License-Identifier: Apache-2.0
#include "eth/params.hpp"

#include <cmath>

namespace eth::model {

EthParams zero_params(const EthConfig& config, const data::Vocab& vocab) {
  config.validate();
  const std::size_t d = config.dim, w = config.mix_dim;
  const std::size_t nv = vocab.num_entities, nr = vocab.total_relations();
  EthParams p;
  p.entity = Tensor(nv, d);
  p.rel_euclid = Tensor(nr, d);
  p.rel_hyper = Tensor(nr, d);
  p.rgcn.assign(config.layers, RgcnLayer<Tensor>{Tensor(d, d), Tensor(d, d)});
  for (Tensor* t : {&p.gru.w_reset, &p.gru.u_reset, &p.gru.w_update, &p.gru.u_update,
                    &p.gru.w_cand, &p.gru.u_cand})
    *t = Tensor(d, d);
  for (Tensor* t : {&p.gru.b_reset, &p.gru.b_update, &p.gru.b_cand}) *t = Tensor(1, d);
  p.cand_weight = Tensor(d, d);
  p.cand_bias = Tensor(1, d);
  p.query_weight = Tensor(2 * d, d);
  p.query_bias = Tensor(1, d);
  p.tangent_shared = Tensor(d, d);
  p.tangent_cand = Tensor(d, d);
  p.tangent_query = Tensor(d, d);
  p.curvature_raw = Tensor(nr, 1);
  p.bias_query = Tensor(nv, 1);
  p.bias_cand = Tensor(1, nv);
  p.mix_entity = Tensor(nv, w);
  p.mix_relation = Tensor(nr, w);
  p.beta_raw = Tensor(nr, 1);
  return p;
}

namespace {

void glorot(Tensor& t, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (double& x : t.values()) x = u(rng);
}

void gaussian(Tensor& t, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, stddev);
  for (double& x : t.values()) x = n(rng);
}

}  // namespace

EthParams init_params(const EthConfig& config, const data::Vocab& vocab, std::mt19937_64& rng) {
  EthParams p = zero_params(config, vocab);
  const double emb_std = 1.0 / std::sqrt(static_cast<double>(config.dim));
  gaussian(p.entity, emb_std, rng);
  gaussian(p.rel_euclid, emb_std, rng);
  gaussian(p.rel_hyper, emb_std, rng);
  for (auto& layer : p.rgcn) {
    glorot(layer.neighbor, rng);
    glorot(layer.self, rng);
  }
  for (Tensor* t : {&p.gru.w_reset, &p.gru.u_reset, &p.gru.w_update, &p.gru.u_update,
                    &p.gru.w_cand, &p.gru.u_cand})
    glorot(*t, rng);
  glorot(p.cand_weight, rng);
  glorot(p.query_weight, rng);
  glorot(p.tangent_shared, rng);
  glorot(p.tangent_cand, rng);
  glorot(p.tangent_query, rng);
  p.curvature_raw.fill(kUnitCurvatureRaw);
  glorot(p.mix_entity, rng);
  glorot(p.mix_relation, rng);
  return p;
}

BoundParams bind(ad::Tape& tape, const EthParams& params, bool requires_grad) {
  BoundParams b;
  b.rgcn.resize(params.rgcn.size());
  for_each_param([&](const std::string&, const Tensor& t,
                     ad::Var& v) { v = tape.leaf(t, requires_grad); },
                 params, b);
  return b;
}

std::size_t parameter_count(const EthParams& params) {
  std::size_t n = 0;
  for_each_param([&](const std::string&, const Tensor& t) { n += t.size(); }, params);
  return n;
}

bool all_finite(const EthParams& params) {
  bool ok = true;
  for_each_param([&](const std::string&, const Tensor& t) { ok = ok && t.all_finite(); }, params);
  return ok;
}

}  // namespace eth::model
