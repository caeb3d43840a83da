// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "eth/geometry.hpp"
#include "eth/hyperbolic_ops.hpp"
#include "eth/ops.hpp"
#include "eth/tape.hpp"

namespace {

using namespace eth;

Tensor uniform(std::size_t r, std::size_t c, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor t(r, c);
  for (double& x : t.values()) x = u(rng);
  return t;
}

void BM_ExpLogRoundtrip(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto d = static_cast<std::size_t>(state.range(0));
  const Tensor v = uniform(1, d, 0.3, rng);
  const geo::TangentVector t(std::vector<double>(v.values().begin(), v.values().end()));
  const geo::Curvature c(1.3);
  for (auto _ : state) benchmark::DoNotOptimize(geo::log_map_zero(geo::exp_map_zero(t, c)));
}
BENCHMARK(BM_ExpLogRoundtrip)->Arg(32)->Arg(200);

void BM_Distance(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto d = static_cast<std::size_t>(state.range(0));
  const geo::Curvature c(0.7);
  auto point = [&] {
    const Tensor v = uniform(1, d, 0.5 / std::sqrt(static_cast<double>(d)), rng);
    return geo::PoincarePoint(std::vector<double>(v.values().begin(), v.values().end()), c);
  };
  const auto x = point(), y = point();
  for (auto _ : state) benchmark::DoNotOptimize(geo::poincare_distance(x, y));
}
BENCHMARK(BM_Distance)->Arg(32)->Arg(200);

// Query-by-candidate squared distances with backward, the hot path of the hyperbolic score.
void BM_PairSqdist(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto q = static_cast<std::size_t>(state.range(0)), n = static_cast<std::size_t>(state.range(1));
  const std::size_t d = 64;
  const Tensor x = uniform(q, d, 0.05, rng), h = uniform(n, d, 0.1, rng);
  const Tensor c(q, 1, 1.0);
  for (auto _ : state) {
    ad::Tape tape;
    auto xv = tape.leaf(x, true), hv = tape.leaf(h, true);
    auto out = ad::sum_all(ad::poincare_pair_sqdist(xv, hv, tape.constant(c)));
    tape.backward(out);
    benchmark::DoNotOptimize(tape.grad(hv.id));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * q * n));
}
BENCHMARK(BM_PairSqdist)->Args({64, 500})->Args({256, 2000});

}  // namespace
