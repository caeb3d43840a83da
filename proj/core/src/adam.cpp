// SPDX-License-Identifier: Apache-2.0
#include "eth/adam.hpp"

#include <cmath>
#include <string>

#include "eth/error.hpp"

namespace eth::ad {

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamOptions& options) {
  if (!param.same_shape(grad)) throw InvalidArgument("adam_step: parameter/gradient shape mismatch");
  if (!state.m.same_shape(param)) {
    state.m = Tensor(param.rows(), param.cols());
    state.v = Tensor(param.rows(), param.cols());
    state.t = 0;
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(options.beta1, t);
  const double c2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    state.m[i] = options.beta1 * state.m[i] + (1.0 - options.beta1) * g;
    state.v[i] = options.beta2 * state.v[i] + (1.0 - options.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    param[i] -= options.lr * m_hat / (std::sqrt(v_hat) + options.eps);
  }
  if (!param.all_finite()) throw NumericError("adam_step: non-finite parameter after update");
}

void Adam::step(std::span<Tensor* const> params, std::span<const Tensor* const> grads) {
  if (params.size() != grads.size()) throw InvalidArgument("Adam::step: params/grads length mismatch");
  if (state_.empty()) state_.resize(params.size());
  if (state_.size() != params.size()) {
    throw InvalidArgument("Adam::step: parameter list changed from " + std::to_string(state_.size()) +
                          " to " + std::to_string(params.size()) + " tensors");
  }
  for (std::size_t i = 0; i < params.size(); ++i) adam_step(*params[i], *grads[i], state_[i], options_);
}

double clip_global_norm(std::span<Tensor* const> grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor* g : grads) sq += squared_norm(g->values());
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double k = max_norm / norm;
    for (Tensor* g : grads) *g *= k;
  }
  return norm;
}

}  // namespace eth::ad
