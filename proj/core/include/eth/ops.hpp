// SPDX-License-Identifier: Apache-2.0
#pragma once

// Differentiable dense ops. Shapes are always explicit: the only broadcasts
// are the named row/column bias and row-scaling ops.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eth/tape.hpp"

namespace eth::ad {

using Index = std::uint32_t;

Var matmul(Var a, Var b);      // a * b
Var matmul_nt(Var a, Var b);   // a * b^T
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var add_row_bias(Var a, Var bias);  // n x m plus 1 x m
Var add_col_bias(Var a, Var bias);  // n x m plus n x 1
Var scale_rows(Var a, Var s);       // n x m times n x 1
Var scale(Var a, double k);         // k * a
Var affine(Var a, double k, double shift);  // k * a + shift
Var concat_cols(Var a, Var b);      // [a | b]

Var mean_rows(Var a);  // 1 x m column means
Var row_sum(Var a);    // n x 1
Var sum_all(Var a);    // 1 x 1
Var mean_all(Var a);   // 1 x 1

Var tanh(Var a);
Var sigmoid(Var a);
Var relu(Var a);
Var softplus(Var a);
Var arctanh_clamped(Var a, double eps = 1e-10);

struct RReluOptions {
  double lower = 1.0 / 8.0;
  double upper = 1.0 / 3.0;
  bool training = false;
  std::mt19937_64* rng = nullptr;  // required when training
};
// Randomized leaky ReLU. Training mode draws one slope per negative element
// and the backward pass reuses those draws; eval mode uses (lower+upper)/2.
Var rrelu(Var a, const RReluOptions& options);

// Per-row (x - mean) / (population_std + eps); no learnable affine.
Var layer_norm(Var a, double eps = 1e-8);
Var row_norm(Var a);  // n x 1 Euclidean norm of each row

Var gather_rows(Var a, std::span<const Index> rows);
// Row o of the n_out x m result is the mean of the rows e of `a` with
// index[e] == o, or zero when there are none.
Var scatter_mean_rows(Var a, std::span<const Index> index, std::size_t n_out);

// Mean over rows of -log softmax(z)[target].
Var softmax_cross_entropy(Var logits, std::span<const Index> targets);
// Mean over all entries of the logistic loss against 0/1 labels.
Var binary_cross_entropy(Var logits, const Tensor& labels);

}  // namespace eth::ad
