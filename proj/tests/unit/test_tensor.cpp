// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "eth/error.hpp"
#include "oracles.hpp"

using eth::Tensor;

namespace {

Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

void expect_near(const Tensor& a, const Tensor& b, double tol = 1e-12) {
  ASSERT_TRUE(a.same_shape(b));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "entry " << i;
}

}  // namespace

TEST(Tensor, ConstructionAndAccess) {
  Tensor t = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t(1, 2), 6.0);
  EXPECT_EQ(t.row(1)[0], 4.0);
  EXPECT_THROW(Tensor(2, 2, std::vector<double>{1, 2, 3}), eth::InvalidArgument);
  EXPECT_EQ(Tensor::scalar(3.5).item(), 3.5);
  EXPECT_THROW(t.item(), eth::InvalidArgument);
}

TEST(Tensor, MatmulVariantsMatchNaive) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 6, k = 1 + rng() % 6, m = 1 + rng() % 6;
    const Tensor a = eth::testing::random_tensor(n, k, rng);
    const Tensor b = eth::testing::random_tensor(k, m, rng);
    expect_near(eth::matmul(a, b), naive_matmul(a, b));
    expect_near(eth::matmul_nt(a, eth::transpose(b)), naive_matmul(a, b));
    expect_near(eth::matmul_tn(eth::transpose(a), b), naive_matmul(a, b));
  }
  EXPECT_THROW(eth::matmul(Tensor(2, 3), Tensor(2, 3)), eth::InvalidArgument);
}

TEST(Tensor, FiniteCheck) {
  Tensor t(1, 2);
  EXPECT_TRUE(t.all_finite());
  t[1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(t.all_finite());
}
