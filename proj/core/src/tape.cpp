// SPDX-License-Identifier: Apache-2.0
#include "eth/tape.hpp"

#include <string>

#include "eth/error.hpp"

namespace eth::ad {

const Tensor& Var::value() const { return tape->value(id); }
const Tensor& Var::grad() const { return tape->grad(id); }

Var Tape::leaf(Tensor value, bool requires_grad) {
  if (!value.all_finite()) throw NumericError("tape: non-finite leaf value");
  Record r;
  r.op = "leaf";
  r.value = std::move(value);
  r.requires_grad = requires_grad;
  records_.push_back(std::move(r));
  return Var{this, records_.size() - 1};
}

Var Tape::record(std::string_view op, Tensor value, std::initializer_list<Var> parents,
                 Backward backward) {
  if (!value.all_finite()) {
    throw NumericError("op '" + std::string(op) + "' produced non-finite values");
  }
  Record r;
  r.op = std::string(op);
  r.value = std::move(value);
  for (const Var& p : parents) {
    if (p.tape != this || p.id >= records_.size()) {
      throw InvalidArgument("op '" + std::string(op) + "': operand from another tape");
    }
    r.parents.push_back(p.id);
    r.requires_grad = r.requires_grad || records_[p.id].requires_grad;
  }
  if (r.requires_grad) r.backward = std::move(backward);
  records_.push_back(std::move(r));
  return Var{this, records_.size() - 1};
}

const Tensor& Tape::grad(std::size_t id) const {
  const Record& r = records_.at(id);
  if (!r.grad.same_shape(r.value)) r.grad = Tensor(r.value.rows(), r.value.cols());
  return r.grad;
}

Tensor* Tape::grad_buffer(std::size_t id) {
  Record& r = records_.at(id);
  if (!r.requires_grad) return nullptr;
  if (!r.grad.same_shape(r.value)) r.grad = Tensor(r.value.rows(), r.value.cols());
  return &r.grad;
}

void Tape::backward(Var root) {
  if (root.tape != this) throw InvalidArgument("backward: root from another tape");
  const Tensor& v = value(root.id);
  if (v.rows() != 1 || v.cols() != 1) {
    throw InvalidArgument("backward: root must be scalar, got " + std::to_string(v.rows()) + "x" +
                          std::to_string(v.cols()));
  }
  Tensor* seed = grad_buffer(root.id);
  if (seed == nullptr) return;
  (*seed)[0] += 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Record& r = records_[i];
    if (!r.backward || !r.grad.same_shape(r.value)) continue;
    r.backward(*this, i);
  }
}

void Tape::zero_grad() {
  for (Record& r : records_) r.grad = Tensor();
}

}  // namespace eth::ad
