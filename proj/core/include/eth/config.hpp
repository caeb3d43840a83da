// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace eth::model {

enum class Gamma { relu, identity };
enum class BetaMode { query_specific, fixed_zero, fixed_one, per_relation_learned };
enum class LossKind { softmax_ce, binary_ce };

struct EthConfig {
  std::size_t dim = 200;      // d
  std::size_t mix_dim = 200;  // w
  std::size_t layers = 2;     // l
  std::size_t history = 10;   // m
  Gamma gamma = Gamma::relu;
  BetaMode beta_mode = BetaMode::query_specific;
  bool semantic_encoder = true;   // off: -se
  bool tangent_transform = true;  // off: -tst
  bool query_transform = true;    // off: -q
  LossKind loss = LossKind::softmax_ce;

  // Throws InvalidArgument on d < 2 or w, l, m < 1.
  void validate() const;
  friend bool operator==(const EthConfig&, const EthConfig&) = default;
};

std::string_view to_string(Gamma g);
std::string_view to_string(BetaMode b);
std::string_view to_string(LossKind k);
Gamma parse_gamma(std::string_view s);
BetaMode parse_beta_mode(std::string_view s);
LossKind parse_loss_kind(std::string_view s);

// Dataset presets: icews14, icews0515, yago, wiki.
EthConfig preset(std::string_view name);

}  // namespace eth::model
