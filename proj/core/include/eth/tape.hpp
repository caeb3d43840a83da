// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal reverse-mode differentiation. A Tape records every forward op in
// creation order, so parents always precede children and backward is a single
// reverse sweep.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "eth/tensor.hpp"

namespace eth::ad {

class Tape;

// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Tensor& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, bool requires_grad = false);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  // Appends an op result. The backward closure is dropped when no parent
  // needs a gradient. Throws NumericError naming `op` on NaN/Inf output.
  Var record(std::string_view op, Tensor value, std::initializer_list<Var> parents,
             Backward backward);

  // Seeds d(root)/d(root) = 1 and propagates to every requires_grad input.
  void backward(Var root);
  void zero_grad();

  const Tensor& value(std::size_t id) const { return records_.at(id).value; }
  // Accumulated gradient; a zero tensor of the value's shape if none reached it.
  const Tensor& grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return records_.at(id).requires_grad; }
  std::string_view op_name(std::size_t id) const { return records_.at(id).op; }
  const std::vector<std::size_t>& parents(std::size_t id) const { return records_.at(id).parents; }
  std::size_t size() const { return records_.size(); }

  // Mutable gradient of `id`, allocated on first use. nullptr when the record
  // does not require a gradient, so backward closures can skip that branch.
  Tensor* grad_buffer(std::size_t id);

 private:
  struct Record {
    std::string op;
    Tensor value;
    mutable Tensor grad;
    std::vector<std::size_t> parents;
    Backward backward;
    bool requires_grad = false;
  };

  std::vector<Record> records_;
};

}  // namespace eth::ad
