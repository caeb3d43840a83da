// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eth/tensor.hpp"

namespace eth::ad {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Tensor m;
  Tensor v;
  std::uint64_t t = 0;
};

// One bias-corrected Adam update of `param` in place.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamOptions& options);

// Adam over a fixed, ordered list of parameter tensors.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // params[i] is updated with grads[i]. The list must keep the same length and
  // shapes across calls.
  void step(std::span<Tensor* const> params, std::span<const Tensor* const> grads);

  const AdamOptions& options() const { return options_; }
  const std::vector<AdamState>& state() const { return state_; }

 private:
  AdamOptions options_;
  std::vector<AdamState> state_;
};

// Rescales all gradients jointly so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_global_norm(std::span<Tensor* const> grads, double max_norm);

}  // namespace eth::ad
