// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "eth/eval.hpp"
#include "eth/model.hpp"
#include "eth/params.hpp"
#include "eth/synthetic.hpp"
#include "eth/train.hpp"

namespace {

using namespace eth;

data::PreparedData cycle(std::uint32_t entities) {
  return data::prepare(data::synth_cycle({.num_entities = entities, .num_relations = 4, .num_times = 24, .shift = 3}));
}

model::EthConfig config(std::size_t d) {
  model::EthConfig c;
  c.dim = d;
  c.mix_dim = d;
  c.history = 3;
  return c;
}

void BM_TrainStep(benchmark::State& state) {
  const auto data = cycle(static_cast<std::uint32_t>(state.range(0)));
  train::Trainer trainer(config(static_cast<std::size_t>(state.range(1))), {}, data.vocab);
  std::size_t i = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainer.train_step(data.train, data.train[i]));
    i = i + 1 < data.train.size() ? i + 1 : 3;
  }
}
BENCHMARK(BM_TrainStep)->Args({20, 32})->Args({200, 64})->Unit(benchmark::kMillisecond);

void BM_ScoreQueries(benchmark::State& state) {
  const auto data = cycle(static_cast<std::uint32_t>(state.range(0)));
  const auto cfg = config(64);
  std::mt19937_64 rng(0);
  const auto params = model::init_params(cfg, data.vocab, rng);
  const auto& target = data.test.front();
  const auto history = data::history_before(data.all, target.time(), cfg.history);
  const auto batch = model::queries_from_snapshot(target);
  for (auto _ : state) benchmark::DoNotOptimize(model::score_queries(params, cfg, history, batch.queries));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch.queries.size()));
}
BENCHMARK(BM_ScoreQueries)->Arg(20)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Khs(benchmark::State& state) {
  const auto data = cycle(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval::khs(data.all.front(), data.vocab.num_relations));
}
BENCHMARK(BM_Khs)->Arg(100)->Arg(1000);

}  // namespace
