// SPDX-License-Identifier: Apache-2.0
#include "eth/config.hpp"

#include <string>

#include "eth/error.hpp"

namespace eth::model {

void EthConfig::validate() const {
  if (dim < 2) throw InvalidArgument("embedding dim d must be >= 2");
  if (mix_dim < 1) throw InvalidArgument("mixing dim w must be >= 1");
  if (layers < 1) throw InvalidArgument("RGCN layer count must be >= 1");
  if (history < 1) throw InvalidArgument("history length m must be >= 1");
}

std::string_view to_string(Gamma g) { return g == Gamma::relu ? "relu" : "identity"; }

std::string_view to_string(BetaMode b) {
  switch (b) {
    case BetaMode::query_specific: return "query_specific";
    case BetaMode::fixed_zero: return "fixed_zero";
    case BetaMode::fixed_one: return "fixed_one";
    case BetaMode::per_relation_learned: return "per_relation_learned";
  }
  return "?";
}

std::string_view to_string(LossKind k) { return k == LossKind::softmax_ce ? "softmax" : "binary"; }

Gamma parse_gamma(std::string_view s) {
  if (s == "relu") return Gamma::relu;
  if (s == "identity") return Gamma::identity;
  throw InvalidArgument("unknown gamma '" + std::string(s) + "' (relu, identity)");
}

BetaMode parse_beta_mode(std::string_view s) {
  if (s == "query_specific" || s == "query") return BetaMode::query_specific;
  if (s == "fixed_zero" || s == "0") return BetaMode::fixed_zero;
  if (s == "fixed_one" || s == "1") return BetaMode::fixed_one;
  if (s == "per_relation_learned" || s == "learned") return BetaMode::per_relation_learned;
  throw InvalidArgument("unknown beta mode '" + std::string(s) +
                        "' (query_specific, fixed_zero, fixed_one, per_relation_learned)");
}

LossKind parse_loss_kind(std::string_view s) {
  if (s == "softmax" || s == "softmax_ce") return LossKind::softmax_ce;
  if (s == "binary" || s == "binary_ce") return LossKind::binary_ce;
  throw InvalidArgument("unknown loss '" + std::string(s) + "' (softmax, binary)");
}

EthConfig preset(std::string_view name) {
  EthConfig c;
  c.dim = c.mix_dim = 200;
  if (name == "icews14") {
    c.layers = 2;
    c.history = 10;
  } else if (name == "icews0515") {
    c.layers = 2;
    c.history = 24;
    c.gamma = Gamma::identity;
  } else if (name == "yago" || name == "wiki") {
    c.layers = 1;
    c.history = 2;
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) +
                          "' (icews14, icews0515, yago, wiki)");
  }
  return c;
}

}  // namespace eth::model
