// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>

#include "eth/error.hpp"
#include "eth/model.hpp"
#include "fixtures.hpp"

using namespace eth;
using namespace eth::model;
using ad::Tape;
using ad::Var;
using eth::testing::random_tensor;

namespace {

double row_norm(const Tensor& t, std::size_t r) { return std::sqrt(squared_norm(t.row(r))); }

void expect_near(const Tensor& a, const Tensor& b, double tol) {
  ASSERT_TRUE(a.same_shape(b)) << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "entry " << i;
}

Tensor identity(std::size_t d) {
  Tensor t(d, d);
  for (std::size_t i = 0; i < d; ++i) t(i, i) = 1.0;
  return t;
}

double rrelu_eval(double x) { return x >= 0 ? x : x * (1.0 / 8 + 1.0 / 3) / 2; }

struct Bench {
  eth::testing::TinyInstance inst = eth::testing::tiny_instance();
  Tape tape;
  BoundParams bound = bind(tape, inst.params, true);
};

}  // namespace

TEST(Config, ValidationAndPresets) {
  EthConfig c;
  EXPECT_EQ(c.dim, 200u);
  EXPECT_EQ(c.mix_dim, 200u);
  EXPECT_NO_THROW(c.validate());
  c.history = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_EQ(preset("icews14").history, 10u);
  EXPECT_EQ(preset("icews0515").gamma, Gamma::identity);
  EXPECT_EQ(preset("icews0515").history, 24u);
  EXPECT_EQ(preset("yago").layers, 1u);
  EXPECT_EQ(preset("wiki").history, 2u);
  EXPECT_THROW(preset("gdelt"), InvalidArgument);
  EXPECT_EQ(parse_beta_mode("fixed_one"), BetaMode::fixed_one);
  EXPECT_THROW(parse_gamma("gelu"), InvalidArgument);
}

TEST(Params, ShapesAndInitialization) {
  const auto inst = eth::testing::tiny_instance();
  const auto& p = inst.params;
  EXPECT_EQ(p.entity.rows(), 6u);
  EXPECT_EQ(p.rel_euclid.rows(), 4u);
  EXPECT_EQ(p.query_weight.rows(), 8u);
  EXPECT_EQ(p.rgcn.size(), 2u);
  EXPECT_EQ(p.mix_relation.cols(), 3u);
  std::mt19937_64 rng(1);
  const auto fresh = init_params(inst.config, inst.vocab, rng);
  for (double raw : fresh.curvature_raw.values()) EXPECT_NEAR(std::log1p(std::exp(raw)), 1.0, 1e-15);
  for (double b : fresh.bias_query.values()) EXPECT_EQ(b, 0.0);
  EXPECT_TRUE(all_finite(fresh));
  const auto names = eth::testing::param_names(fresh);
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
}

TEST(Normalize, Examples) {
  Tape tape;
  const Tensor y = normalize_sqrt_d(tape.constant(Tensor::from_rows({{2, 4, 6}}))).value();
  EXPECT_NEAR(y[0], -1 / std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(y[1], 0.0, 1e-12);
  EXPECT_NEAR(y[2], 1 / std::sqrt(2.0), 1e-7);
  const Tensor x = Tensor::from_rows({{1, -1, 1, -1}});
  expect_near(normalize_sqrt_d(tape.constant(x)).value(), Tensor::from_rows({{0.5, -0.5, 0.5, -0.5}}), 1e-8);
  EXPECT_NO_THROW(normalize_sqrt_d(tape.constant(Tensor(1, 3, 2.0))));
  EXPECT_THROW(normalize_sqrt_d(tape.constant(Tensor(2, 1, 1.0))), InvalidArgument);
}

TEST(Normalize, UnitNormProperty) {
  std::mt19937_64 rng(3);
  Tape tape;
  const Tensor y = normalize_sqrt_d(tape.constant(random_tensor(200, 7, rng, -10, 10))).value();
  for (std::size_t r = 0; r < y.rows(); ++r) EXPECT_NEAR(row_norm(y, r), 1.0, 1e-3);
}

TEST(Rgcn, EmptySnapshotUsesSelfTerm) {
  Bench b;
  const data::Snapshot empty(0, {}, 6);
  Var h = b.tape.constant(b.inst.params.entity);
  const Tensor out = rgcn_layer(h, empty, b.bound.rel_euclid, b.bound.rgcn[0], {}).value();
  Tensor ref = matmul(b.inst.params.entity, b.inst.params.rgcn[0].self);
  for (double& v : ref.values()) v = rrelu_eval(v);
  expect_near(out, ref, 1e-14);
}

TEST(Rgcn, SingleNeighborAndDuplicates) {
  Bench b;
  const auto& p = b.inst.params;
  const data::Snapshot one(0, {{1, 2, 3}}, 6);
  const data::Snapshot twice(0, {{1, 2, 3}, {1, 2, 3}}, 6);
  Var h = b.tape.constant(p.entity);
  const Tensor a = rgcn_layer(h, one, b.bound.rel_euclid, b.bound.rgcn[0], {}).value();
  const Tensor dup = rgcn_layer(h, twice, b.bound.rel_euclid, b.bound.rgcn[0], {}).value();
  expect_near(a, dup, 1e-14);
  // Row 3 = rrelu(W1 (h_1 + v_2) + W2 h_3); other rows keep the self term only.
  Tensor msg(1, 4);
  for (std::size_t k = 0; k < 4; ++k) msg[k] = p.entity(1, k) + p.rel_euclid(2, k);
  const Tensor nb = matmul(msg, p.rgcn[0].neighbor);
  const Tensor self = matmul(p.entity, p.rgcn[0].self);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(a(3, k), rrelu_eval(nb[k] + self(3, k)), 1e-14);
    EXPECT_NEAR(a(0, k), rrelu_eval(self(0, k)), 1e-14);
  }
}

TEST(Rgcn, MeanOverNeighbors) {
  Bench b;
  const auto& p = b.inst.params;
  const data::Snapshot two(0, {{1, 0, 3}, {4, 2, 3}}, 6);
  const Tensor a = rgcn_layer(b.tape.constant(p.entity), two, b.bound.rel_euclid, b.bound.rgcn[1], {}).value();
  Tensor msg(1, 4);
  for (std::size_t k = 0; k < 4; ++k)
    msg[k] = 0.5 * (p.entity(1, k) + p.rel_euclid(0, k) + p.entity(4, k) + p.rel_euclid(2, k));
  const Tensor nb = matmul(msg, p.rgcn[1].neighbor);
  const Tensor self = matmul(p.entity, p.rgcn[1].self);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a(3, k), rrelu_eval(nb[k] + self(3, k)), 1e-14);
}

TEST(Gru, MatchesHandComputation) {
  std::mt19937_64 rng(5);
  Tape tape;
  GruWeights<Tensor> w;
  for (Tensor* t : {&w.w_reset, &w.u_reset, &w.w_update, &w.u_update, &w.w_cand, &w.u_cand})
    *t = random_tensor(3, 3, rng);
  for (Tensor* t : {&w.b_reset, &w.b_update, &w.b_cand}) *t = random_tensor(1, 3, rng);
  GruWeights<Var> g{tape.constant(w.w_reset),  tape.constant(w.u_reset),  tape.constant(w.b_reset),
                    tape.constant(w.w_update), tape.constant(w.u_update), tape.constant(w.b_update),
                    tape.constant(w.w_cand),   tape.constant(w.u_cand),   tape.constant(w.b_cand)};
  const Tensor h = random_tensor(2, 3, rng), x = random_tensor(2, 3, rng);
  const Tensor out = gru_cell(tape.constant(h), tape.constant(x), g).value();
  auto sig = [](double v) { return 1 / (1 + std::exp(-v)); };
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double r = w.b_reset[j], z = w.b_update[j], nx = w.b_cand[j], nh = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        r += x(i, k) * w.w_reset(k, j) + h(i, k) * w.u_reset(k, j);
        z += x(i, k) * w.w_update(k, j) + h(i, k) * w.u_update(k, j);
        nx += x(i, k) * w.w_cand(k, j);
        nh += h(i, k) * w.u_cand(k, j);
      }
      const double n = std::tanh(nx + sig(r) * nh);
      EXPECT_NEAR(out(i, j), (1 - sig(z)) * n + sig(z) * h(i, j), 1e-14);
    }
}

TEST(Encoder, EmptyHistoryIsNormalizedTable) {
  Bench b;
  Var rel = normalize_sqrt_d(b.bound.rel_euclid);
  const Tensor h = encode_history({}, b.bound, rel, b.inst.config, {}).value();
  expect_near(h, normalize_sqrt_d(b.bound.entity).value(), 0);
}

TEST(Encoder, OneSnapshotIsOneStackAndOneStep) {
  Bench b;
  Var rel = normalize_sqrt_d(b.bound.rel_euclid);
  const data::Snapshot* s = &b.inst.snapshots[0];
  const Tensor h = encode_history(std::span<const data::Snapshot* const>(&s, 1), b.bound, rel,
                                  b.inst.config, {})
                       .value();
  Var h0 = normalize_sqrt_d(b.bound.entity);
  Var x = rgcn_layer(rgcn_layer(h0, *s, rel, b.bound.rgcn[0], {}), *s, rel, b.bound.rgcn[1], {});
  const Tensor ref = normalize_sqrt_d(gru_cell(h0, normalize_sqrt_d(x), b.bound.gru)).value();
  expect_near(h, ref, 1e-14);
}

TEST(Encoder, StatesHaveUnitNorm) {
  Bench b;
  Var rel = normalize_sqrt_d(b.bound.rel_euclid);
  const auto hist = b.inst.history();
  const Tensor h = encode_history(hist, b.bound, rel, b.inst.config, {}).value();
  for (std::size_t r = 0; r < h.rows(); ++r) EXPECT_NEAR(row_norm(h, r), 1.0, 1e-3);
}

TEST(Encoder, TrainingNeedsGenerator) {
  Bench b;
  Var rel = normalize_sqrt_d(b.bound.rel_euclid);
  EXPECT_THROW(encode_history(b.inst.history(), b.bound, rel, b.inst.config, {.training = true}),
               InvalidArgument);
}

TEST(CandidateTransform, ZeroStates) {
  Bench b;
  const auto out = candidate_transform(b.tape.constant(Tensor(6, 4)), b.bound, b.inst.config);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_EQ(out.euclid.value()(a, k), b.inst.params.cand_bias[k]);
      EXPECT_EQ(out.tangent.value()(a, k), 0.0);
    }
}

TEST(CandidateTransform, IdentityReduction) {
  auto inst = eth::testing::tiny_instance();
  inst.config.gamma = Gamma::identity;
  inst.params.tangent_shared = inst.params.tangent_cand = inst.params.cand_weight = identity(4);
  inst.params.cand_bias.fill(0.0);
  Tape tape;
  const auto bound = bind(tape, inst.params, false);
  std::mt19937_64 rng(2);
  const Tensor h = random_tensor(6, 4, rng);
  const auto out = candidate_transform(tape.constant(h), bound, inst.config);
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(out.tangent.value()[i], std::tanh(h[i]) * h[i], 1e-15);
}

TEST(CandidateTransform, AblationPassesStatesThrough) {
  Bench b;
  EthConfig c = b.inst.config;
  c.tangent_transform = false;
  std::mt19937_64 rng(6);
  const Tensor h = random_tensor(6, 4, rng);
  const auto out = candidate_transform(b.tape.constant(h), b.bound, c);
  EXPECT_EQ(out.tangent.value(), h);
  EXPECT_TRUE(out.euclid.value().all_finite());
}

TEST(QueryTransform, Properties) {
  Bench b;
  Var rel = normalize_sqrt_d(b.bound.rel_euclid);
  const std::vector<Query> qs{{2, 1}, {2, 1}, {0, 3}};
  const auto out = query_transform(b.tape.constant(Tensor(6, 4)), qs, rel, b.bound, b.inst.config);
  for (double v : out.tangent.value().values()) EXPECT_EQ(v, 0.0);
  std::mt19937_64 rng(8);
  const auto out2 = query_transform(b.tape.constant(random_tensor(6, 4, rng)), qs, rel, b.bound, b.inst.config);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(out2.euclid.value()(0, k), out2.euclid.value()(1, k));
    EXPECT_EQ(out2.tangent.value()(0, k), out2.tangent.value()(1, k));
  }
  const std::vector<Query> bad{{0, 4}};
  EXPECT_THROW(query_transform(b.bound.entity, bad, rel, b.bound, b.inst.config), InvalidArgument);
}

TEST(QueryTransform, AblationIsVectorAddition) {
  Bench b;
  EthConfig c = b.inst.config;
  c.query_transform = false;
  std::mt19937_64 rng(9);
  const Tensor h = random_tensor(6, 4, rng);
  const std::vector<Query> qs{{3, 2}};
  const auto out = query_transform(b.tape.constant(h), qs, b.tape.constant(Tensor(4, 4)), b.bound, c);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(out.euclid.value()[k], h(3, k));
    EXPECT_EQ(out.tangent.value()[k], h(3, k));
  }
}

TEST(EuclideanScore, DotProducts) {
  Tape tape;
  EXPECT_EQ(score_euclidean(tape.constant(Tensor::from_rows({{1, 0}})), tape.constant(Tensor::from_rows({{0, 1}})))
                .value()
                .item(),
            0.0);
  EXPECT_EQ(score_euclidean(tape.constant(Tensor::from_rows({{0.6, 0.8}})),
                            tape.constant(Tensor::from_rows({{0.6, 0.8}})))
                .value()
                .item(),
            1.0);
  std::mt19937_64 rng(10);
  const Tensor q = random_tensor(5, 3, rng), a = random_tensor(7, 3, rng);
  const Tensor s = score_euclidean(tape.constant(q), tape.constant(a)).value();
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      double ref = 0;
      for (std::size_t k = 0; k < 3; ++k) ref += q(i, k) * a(j, k);
      EXPECT_NEAR(s(i, j), ref, 1e-15);
    }
}

TEST(HyperbolicScore, SelfDistanceZero) {
  auto inst = eth::testing::tiny_instance();
  inst.params.rel_hyper.fill(0.0);
  inst.params.bias_query.fill(0.0);
  inst.params.bias_cand.fill(0.0);
  Tape tape;
  const auto bound = bind(tape, inst.params, false);
  std::mt19937_64 rng(12);
  const Tensor hg = random_tensor(6, 4, rng);
  const std::vector<Query> qs{{0, 0}, {4, 3}};
  Tensor qg(2, 4);
  for (std::size_t k = 0; k < 4; ++k) {
    qg(0, k) = hg(2, k);
    qg(1, k) = hg(5, k);
  }
  const Tensor s = score_hyperbolic(tape.constant(qg), tape.constant(hg), qs, bound).scores.value();
  EXPECT_NEAR(s(0, 2), 0.0, 1e-12);
  EXPECT_NEAR(s(1, 5), 0.0, 1e-12);
  EXPECT_LT(s(0, 1), 0.0);
}

TEST(HyperbolicScore, BiasesOnly) {
  auto inst = eth::testing::tiny_instance();
  inst.params.rel_hyper.fill(0.0);
  Tape tape;
  const auto bound = bind(tape, inst.params, false);
  const std::vector<Query> qs{{1, 0}, {3, 2}};
  const Tensor s = score_hyperbolic(tape.constant(Tensor(2, 4)), tape.constant(Tensor(6, 4)), qs, bound)
                       .scores.value();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t a = 0; a < 6; ++a)
      EXPECT_NEAR(s(i, a), inst.params.bias_query[qs[i].entity] + inst.params.bias_cand[a], 1e-15);
}

TEST(HyperbolicScore, EuclideanLimit) {
  auto inst = eth::testing::tiny_instance();
  const double raw = std::log(std::expm1(1e-8));  // softplus(raw) = 1e-8
  inst.params.curvature_raw.fill(raw);
  Tape tape;
  const auto bound = bind(tape, inst.params, false);
  std::mt19937_64 rng(14);
  const Tensor qg = random_tensor(3, 4, rng), ag = random_tensor(6, 4, rng);
  const std::vector<Query> qs{{0, 1}, {2, 3}, {5, 0}};
  const auto hs = score_hyperbolic(tape.constant(qg), tape.constant(ag), qs, bound);
  EXPECT_NEAR(hs.curvature.value()[0], 1e-8, 1e-15);
  const Tensor& s = hs.scores.value();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t a = 0; a < 6; ++a) {
      double sq = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        const double diff = qg(i, k) + inst.params.rel_hyper(qs[i].relation, k) - ag(a, k);
        sq += diff * diff;
      }
      const double ref = -4 * sq + inst.params.bias_query[qs[i].entity] + inst.params.bias_cand[a];
      EXPECT_LE(eth::testing::rel_error(s(i, a), ref), 1e-3) << i << "," << a;
    }
}

TEST(Mixing, Modes) {
  auto inst = eth::testing::tiny_instance();
  const std::vector<Query> qs{{0, 0}, {1, 2}};
  inst.params.mix_entity.fill(0.0);
  {
    Tape tape;
    const auto b = bind(tape, inst.params, false);
    const Tensor beta = mixing_coefficient(qs, b, inst.config).value();
    EXPECT_DOUBLE_EQ(beta[0], 0.5);
  }
  // Both rows equal with <s_q, s_r> = w.
  inst.params.mix_entity.fill(1.0);
  inst.params.mix_relation.fill(1.0);
  {
    Tape tape;
    const auto b = bind(tape, inst.params, false);
    EXPECT_NEAR(mixing_coefficient(qs, b, inst.config).value()[1], 0.7310585786300049, 1e-15);
    for (auto [mode, want] : {std::pair{BetaMode::fixed_zero, 0.0}, std::pair{BetaMode::fixed_one, 1.0}}) {
      EthConfig c = inst.config;
      c.beta_mode = mode;
      const Tensor beta = mixing_coefficient(qs, b, c).value();
      for (double v : beta.values()) EXPECT_EQ(v, want);
    }
    EthConfig c = inst.config;
    c.beta_mode = BetaMode::per_relation_learned;
    const Tensor beta = mixing_coefficient(qs, b, c).value();
    EXPECT_NEAR(beta[1], 1 / (1 + std::exp(-inst.params.beta_raw[2])), 1e-15);
  }
}

TEST(Hybrid, Examples) {
  Tape tape;
  Var sb = tape.constant(Tensor(1, 1, 2.0)), se = tape.constant(Tensor(1, 1, 0.0));
  EXPECT_EQ(score_hybrid(sb, se, tape.constant(Tensor::scalar(0.0))).value().item(), 0.0);
  EXPECT_EQ(score_hybrid(sb, se, tape.constant(Tensor::scalar(1.0))).value().item(), 2.0);
  const Tensor z = score_hybrid(sb, se, tape.constant(Tensor::scalar(0.5))).value();
  EXPECT_EQ(z.item(), 1.0);
  EXPECT_NEAR(sigmoid_scores(z).item(), 0.7310585786300049, 1e-15);
}

TEST(Forward, ArgmaxInvariantUnderSigmoid) {
  const auto inst = eth::testing::tiny_instance(5);
  const auto batch = queries_from_snapshot(inst.target());
  const Tensor z = score_queries(inst.params, inst.config, inst.history(), batch.queries);
  const Tensor s = sigmoid_scores(z);
  for (std::size_t q = 0; q < z.rows(); ++q)
    for (std::size_t a = 0; a < z.cols(); ++a)
      for (std::size_t b = 0; b < z.cols(); ++b)
        if (z(q, a) > z(q, b)) EXPECT_GE(s(q, a), s(q, b));
}

TEST(Forward, BetaStrictlyInsideUnitInterval) {
  const auto inst = eth::testing::tiny_instance(6);
  Tape tape;
  const auto b = bind(tape, inst.params, false);
  const auto batch = queries_from_snapshot(inst.target());
  const auto r = forward(b, inst.config, inst.history(), batch.queries, {});
  for (double v : r.beta.value().values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  for (double c : r.hyper.curvature.value().values()) EXPECT_GT(c, 0.0);
  for (std::size_t i = 0; i < r.states.rows(); ++i) EXPECT_NEAR(row_norm(r.states.value(), i), 1.0, 1e-3);
}

TEST(Forward, SharedTangentWeightGetsGradientFromBothPaths) {
  const auto inst = eth::testing::tiny_instance(7);
  const auto batch = queries_from_snapshot(inst.target());
  for (bool from_query : {false, true}) {
    Tape tape;
    const auto b = bind(tape, inst.params, true);
    const auto r = forward(b, inst.config, inst.history(), batch.queries, {});
    Var root = ad::sum_all(from_query ? r.queries.tangent : r.candidates.tangent);
    tape.backward(root);
    const Tensor g = tape.grad(b.tangent_shared.id);
    double n = 0;
    for (double v : g.values()) n += std::abs(v);
    EXPECT_GT(n, 0.0) << (from_query ? "query path" : "candidate path");
  }
}

TEST(Forward, EncoderAblationUsesRawTable) {
  auto inst = eth::testing::tiny_instance(8);
  inst.config.semantic_encoder = false;
  Tape tape;
  const auto b = bind(tape, inst.params, true);
  const auto batch = queries_from_snapshot(inst.target());
  const auto r = forward(b, inst.config, inst.history(), batch.queries, {});
  EXPECT_EQ(r.states.value(), inst.params.entity);
  tape.backward(ad::softmax_cross_entropy(r.logits, batch.targets));
  EXPECT_TRUE(tape.grad(b.entity.id).all_finite());
}

TEST(Forward, RejectsBadQueries) {
  const auto inst = eth::testing::tiny_instance();
  QueryBatch batch{{{0, 9}}, {0}, 0};
  EXPECT_THROW(batch.validate(inst.vocab), InvalidArgument);
  EXPECT_THROW(score_queries(inst.params, inst.config, inst.history(), batch.queries), InvalidArgument);
  EXPECT_THROW(score_queries(inst.params, inst.config, inst.history(), {}), InvalidArgument);
}

TEST(Forward, FullPipelineGradientCheck) {
  const auto inst = eth::testing::tiny_instance(11);
  for (BetaMode mode : {BetaMode::query_specific, BetaMode::per_relation_learned}) {
    EthConfig c = inst.config;
    c.beta_mode = mode;
    const auto res = eth::testing::check_gradients(eth::testing::flatten(inst.params),
                                                   eth::testing::tiny_loss(inst, c), 1e-6, 4);
    EXPECT_LT(res.max_rel_error, 1e-3) << res.worst;
  }
}

TEST(Forward, AblationGradientsFinite) {
  const auto inst = eth::testing::tiny_instance(12);
  for (int variant = 0; variant < 3; ++variant) {
    EthConfig c = inst.config;
    if (variant == 0) c.semantic_encoder = false;
    if (variant == 1) c.tangent_transform = false;
    if (variant == 2) c.query_transform = false;
    const auto res = eth::testing::check_gradients(eth::testing::flatten(inst.params),
                                                   eth::testing::tiny_loss(inst, c), 1e-6, 2);
    EXPECT_LT(res.max_rel_error, 1e-3) << "variant " << variant << ": " << res.worst;
  }
}
