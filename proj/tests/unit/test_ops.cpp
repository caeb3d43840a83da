// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "eth/error.hpp"
#include "eth/ops.hpp"
#include "oracles.hpp"

using namespace eth;
using namespace eth::ad;
using eth::testing::check_gradients;
using eth::testing::random_tensor;
using eth::testing::weighted_sum;

namespace {

constexpr double kTol = 1e-4;

// Gradient check of weighted_sum(op(inputs...)).
void expect_fd(const std::vector<Tensor>& inputs,
               const std::function<Var(Tape&, std::span<const Var>)>& op, double tol = kTol) {
  const auto res = check_gradients(inputs, [&](Tape& t, std::span<const Var> v) {
    return weighted_sum(t, op(t, v));
  });
  EXPECT_GT(res.checked, 0u);
  EXPECT_LT(res.max_rel_error, tol) << res.worst;
}

}  // namespace

TEST(Tape, SquareGradient) {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(3.0), true);
  Var y = hadamard(x, x);
  tape.backward(y);
  EXPECT_DOUBLE_EQ(x.grad().item(), 6.0);
}

TEST(Tape, NonScalarRootThrows) {
  Tape tape;
  Var x = tape.leaf(Tensor(2, 2, 1.0), true);
  EXPECT_THROW(tape.backward(tanh(x)), InvalidArgument);
}

TEST(Tape, ParentsPrecedeChildren) {
  Tape tape;
  Var a = tape.leaf(Tensor(2, 2, 0.5), true);
  Var b = sigmoid(matmul(a, a));
  sum_all(add(b, a));
  for (std::size_t id = 0; id < tape.size(); ++id)
    for (std::size_t p : tape.parents(id)) EXPECT_LT(p, id);
}

TEST(Tape, NonFiniteOutputNamesOp) {
  Tape tape;
  Var a = tape.leaf(Tensor(1, 2, 1e300), true);
  try {
    hadamard(a, a);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("hadamard"), std::string::npos) << e.what();
  }
}

TEST(Tape, ShapeMismatchThrows) {
  Tape tape;
  Var a = tape.leaf(Tensor(2, 3), true);
  Var b = tape.leaf(Tensor(3, 2), true);
  EXPECT_THROW(add(a, b), InvalidArgument);
  EXPECT_THROW(hadamard(a, b), InvalidArgument);
  EXPECT_THROW(matmul(a, a), InvalidArgument);
  EXPECT_THROW(add_row_bias(a, b), InvalidArgument);
  EXPECT_THROW(scale_rows(a, b), InvalidArgument);
  EXPECT_THROW(concat_cols(a, b), InvalidArgument);
}

TEST(Tape, VarsFromDifferentTapesRejected) {
  Tape t1, t2;
  Var a = t1.leaf(Tensor(1, 1, 1.0), true);
  Var b = t2.leaf(Tensor(1, 1, 1.0), true);
  EXPECT_THROW(add(a, b), InvalidArgument);
}

TEST(Ops, Examples) {
  Tape tape;
  EXPECT_DOUBLE_EQ(sigmoid(tape.constant(Tensor::scalar(0.0))).value().item(), 0.5);
  const Tensor ln = layer_norm(tape.constant(Tensor::from_rows({{2, 4, 6}}))).value();
  EXPECT_NEAR(ln[0], -std::sqrt(1.5), 1e-7);
  EXPECT_NEAR(ln[1], 0.0, 1e-12);
  EXPECT_NEAR(ln[2], std::sqrt(1.5), 1e-7);
  std::mt19937_64 rng(1);
  const Tensor nonneg = Tensor::from_rows({{0.0, 1.5, 3.0}});
  for (bool training : {false, true}) {
    const Tensor r = rrelu(tape.constant(nonneg), {.training = training, .rng = &rng}).value();
    EXPECT_EQ(r, nonneg);
  }
  const Tensor neg = rrelu(tape.constant(Tensor::from_rows({{-2.0}})), {}).value();
  EXPECT_DOUBLE_EQ(neg.item(), -2.0 * (1.0 / 8 + 1.0 / 3) / 2);
}

TEST(Ops, RReluTrainingSlopesInRange) {
  Tape tape;
  std::mt19937_64 rng(4);
  const Tensor x(1, 1000, -1.0);
  const Tensor y = rrelu(tape.constant(x), {.training = true, .rng = &rng}).value();
  for (double v : y.values()) {
    EXPECT_GE(-v, 1.0 / 8);
    EXPECT_LE(-v, 1.0 / 3);
  }
  EXPECT_THROW(rrelu(tape.constant(x), {.training = true}), InvalidArgument);
}

TEST(Ops, RReluDeterministicGivenSeed) {
  auto run = [] {
    Tape tape;
    std::mt19937_64 rng(77);
    std::mt19937_64 data(3);
    Var x = tape.leaf(random_tensor(4, 5, data), true);
    Var y = sum_all(rrelu(x, {.training = true, .rng = &rng}));
    tape.backward(y);
    return x.grad();
  };
  EXPECT_EQ(run(), run());
}

TEST(Ops, LayerNormMoments) {
  std::mt19937_64 rng(8);
  Tape tape;
  const Tensor y = layer_norm(tape.constant(random_tensor(50, 16, rng, -5, 5))).value();
  for (std::size_t r = 0; r < y.rows(); ++r) {
    double mean = 0, var = 0;
    for (double v : y.row(r)) mean += v;
    mean /= 16;
    for (double v : y.row(r)) var += (v - mean) * (v - mean);
    EXPECT_LT(std::abs(mean), 1e-9);
    EXPECT_NEAR(std::sqrt(var / 16), 1.0, 1e-6);
  }
  const Tensor c = layer_norm(tape.constant(Tensor(1, 4, 3.0))).value();
  for (double v : c.values()) EXPECT_EQ(v, 0.0);
}

TEST(Ops, GatherScatter) {
  Tape tape;
  Var a = tape.constant(Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}}));
  const std::vector<Index> idx{2, 0, 2};
  const Tensor g = gather_rows(a, idx).value();
  EXPECT_EQ(g, Tensor::from_rows({{5, 6}, {1, 2}, {5, 6}}));
  const std::vector<Index> to{1, 1, 3};
  const Tensor s = scatter_mean_rows(a, to, 4).value();
  EXPECT_EQ(s, Tensor::from_rows({{0, 0}, {2, 3}, {0, 0}, {5, 6}}));
  const std::vector<Index> bad{5};
  EXPECT_THROW(gather_rows(a, bad), InvalidArgument);
}

TEST(Ops, SoftmaxCrossEntropyValues) {
  Tape tape;
  const std::vector<Index> t{2};
  EXPECT_NEAR(softmax_cross_entropy(tape.constant(Tensor(1, 4, 0.3)), t).value().item(), std::log(4.0), 1e-12);
  Tensor z(1, 4, 0.0);
  z[2] = 50;
  EXPECT_LT(softmax_cross_entropy(tape.constant(z), t).value().item(), 1e-20);
  const std::vector<Index> bad{4};
  EXPECT_THROW(softmax_cross_entropy(tape.constant(z), bad), InvalidArgument);
}

// ---- finite-difference checks, one per op ----

class OpGradients : public ::testing::Test {
 protected:
  std::mt19937_64 rng{2024};
  Tensor r(std::size_t n, std::size_t m, double lo = -1, double hi = 1) {
    return random_tensor(n, m, rng, lo, hi);
  }
};

TEST_F(OpGradients, Matmul) {
  expect_fd({r(3, 4), r(4, 2)}, [](Tape&, auto v) { return matmul(v[0], v[1]); });
  expect_fd({r(3, 4), r(5, 4)}, [](Tape&, auto v) { return matmul_nt(v[0], v[1]); });
}

TEST_F(OpGradients, Elementwise) {
  expect_fd({r(3, 4), r(3, 4)}, [](Tape&, auto v) { return add(v[0], v[1]); });
  expect_fd({r(3, 4), r(3, 4)}, [](Tape&, auto v) { return sub(v[0], v[1]); });
  expect_fd({r(3, 4), r(3, 4)}, [](Tape&, auto v) { return hadamard(v[0], v[1]); });
  expect_fd({r(3, 4)}, [](Tape&, auto v) { return scale(v[0], -2.5); });
  expect_fd({r(3, 4)}, [](Tape&, auto v) { return affine(v[0], -1.0, 1.0); });
  expect_fd({r(3, 4, -3, 3)}, [](Tape&, auto v) { return tanh(v[0]); });
  expect_fd({r(3, 4, -3, 3)}, [](Tape&, auto v) { return sigmoid(v[0]); });
  expect_fd({r(3, 4, -3, 3)}, [](Tape&, auto v) { return relu(v[0]); });
  expect_fd({r(3, 4, -3, 3)}, [](Tape&, auto v) { return softplus(v[0]); });
  expect_fd({r(3, 4, -0.9, 0.9)}, [](Tape&, auto v) { return arctanh_clamped(v[0]); });
}

TEST_F(OpGradients, Broadcasts) {
  expect_fd({r(3, 4), r(1, 4)}, [](Tape&, auto v) { return add_row_bias(v[0], v[1]); });
  expect_fd({r(3, 4), r(3, 1)}, [](Tape&, auto v) { return add_col_bias(v[0], v[1]); });
  expect_fd({r(3, 4), r(3, 1)}, [](Tape&, auto v) { return scale_rows(v[0], v[1]); });
}

TEST_F(OpGradients, ShapeAndReductions) {
  expect_fd({r(3, 4), r(3, 2)}, [](Tape&, auto v) { return concat_cols(v[0], v[1]); });
  expect_fd({r(3, 4)}, [](Tape&, auto v) { return mean_rows(v[0]); });
  expect_fd({r(3, 4)}, [](Tape&, auto v) { return row_sum(v[0]); });
  expect_fd({r(3, 4)}, [](Tape&, auto v) { return sum_all(v[0]); });
  expect_fd({r(3, 4)}, [](Tape&, auto v) { return mean_all(v[0]); });
  expect_fd({r(3, 4)}, [](Tape&, auto v) { return row_norm(v[0]); });
}

TEST_F(OpGradients, Normalization) {
  expect_fd({r(4, 6, -2, 2)}, [](Tape&, auto v) { return layer_norm(v[0]); });
}

TEST_F(OpGradients, RRelu) {
  expect_fd({r(4, 5, -2, 2)}, [](Tape&, auto v) { return rrelu(v[0], {}); });
  expect_fd({r(4, 5, -2, 2)}, [](Tape&, auto v) {
    // Fresh generator per evaluation so every pass draws the same slopes.
    static thread_local std::mt19937_64 gen;
    gen.seed(5);
    return rrelu(v[0], {.training = true, .rng = &gen});
  });
}

TEST_F(OpGradients, Indexing) {
  const std::vector<Index> idx{1, 0, 1, 3};
  expect_fd({r(4, 3)}, [&](Tape&, auto v) { return gather_rows(v[0], idx); });
  const std::vector<Index> to{2, 0, 2, 2, 4};
  expect_fd({r(5, 3)}, [&](Tape&, auto v) { return scatter_mean_rows(v[0], to, 5); });
}

TEST_F(OpGradients, Losses) {
  const std::vector<Index> t{1, 0, 3};
  const auto sce = check_gradients({r(3, 4, -3, 3)},
                                   [&](Tape&, auto v) { return softmax_cross_entropy(v[0], t); });
  EXPECT_LT(sce.max_rel_error, kTol) << sce.worst;
  Tensor y(3, 4);
  y(0, 1) = y(1, 0) = y(2, 3) = 1;
  const auto bce = check_gradients({r(3, 4, -3, 3)},
                                   [&](Tape&, auto v) { return binary_cross_entropy(v[0], y); });
  EXPECT_LT(bce.max_rel_error, kTol) << bce.worst;
}

TEST_F(OpGradients, Composite) {
  expect_fd({r(3, 4), r(4, 4), r(1, 4)}, [](Tape&, auto v) {
    Var h = tanh(add_row_bias(matmul(v[0], v[1]), v[2]));
    return layer_norm(hadamard(sigmoid(h), v[0]));
  });
}
