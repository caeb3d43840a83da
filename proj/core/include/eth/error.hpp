// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace eth {

// Shapes, ids or arguments that violate an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint or persisted-state problems (corruption, config mismatch).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf produced by a forward op, a loss, or a parameter update.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal invariant (e.g. a filter mask that hides the gold answer).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace eth
