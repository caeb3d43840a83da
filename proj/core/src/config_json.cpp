// SPDX-License-Identifier: Apache-2.0
#include "eth/config_json.hpp"

#include <set>
#include <string>

#include "eth/error.hpp"

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const char* what) {
  if (!j.is_object()) throw eth::InputError(std::string(what) + " config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key))
      throw eth::InputError("unknown " + std::string(what) + " config key '" + key + "'");
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw eth::InputError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

namespace eth::model {

void to_json(nlohmann::json& j, const EthConfig& c) {
  j = nlohmann::json{{"d", c.dim},
                     {"w", c.mix_dim},
                     {"layers", c.layers},
                     {"m", c.history},
                     {"gamma", std::string(to_string(c.gamma))},
                     {"beta_mode", std::string(to_string(c.beta_mode))},
                     {"semantic_encoder", c.semantic_encoder},
                     {"tangent_transform", c.tangent_transform},
                     {"query_transform", c.query_transform},
                     {"loss", std::string(to_string(c.loss))}};
}

void from_json(const nlohmann::json& j, EthConfig& c) {
  reject_unknown(j,
                 {"d", "w", "layers", "m", "gamma", "beta_mode", "semantic_encoder",
                  "tangent_transform", "query_transform", "loss"},
                 "model");
  read(j, "d", c.dim);
  read(j, "w", c.mix_dim);
  read(j, "layers", c.layers);
  read(j, "m", c.history);
  read(j, "semantic_encoder", c.semantic_encoder);
  read(j, "tangent_transform", c.tangent_transform);
  read(j, "query_transform", c.query_transform);
  std::string s;
  try {
    if (j.contains("gamma") && !(s = j["gamma"].get<std::string>()).empty()) c.gamma = parse_gamma(s);
    if (j.contains("beta_mode") && !(s = j["beta_mode"].get<std::string>()).empty())
      c.beta_mode = parse_beta_mode(s);
    if (j.contains("loss") && !(s = j["loss"].get<std::string>()).empty()) c.loss = parse_loss_kind(s);
  } catch (const InvalidArgument& e) {
    throw InputError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model config: ") + e.what());
  }
}

}  // namespace eth::model

namespace eth::train {

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"lr", c.lr},
                     {"max_epochs", c.max_epochs},
                     {"patience", c.patience},
                     {"seed", c.seed}};
  j["grad_clip_norm"] = c.grad_clip_norm ? nlohmann::json(*c.grad_clip_norm) : nlohmann::json();
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  reject_unknown(j, {"lr", "max_epochs", "patience", "seed", "grad_clip_norm"}, "train");
  read(j, "lr", c.lr);
  read(j, "max_epochs", c.max_epochs);
  read(j, "patience", c.patience);
  read(j, "seed", c.seed);
  if (j.contains("grad_clip_norm")) {
    if (j["grad_clip_norm"].is_null()) {
      c.grad_clip_norm.reset();
    } else {
      double v = 0;
      read(j, "grad_clip_norm", v);
      c.grad_clip_norm = v;
    }
  }
}

}  // namespace eth::train
