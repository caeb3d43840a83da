// SPDX-License-Identifier: Apache-2.0
#include "eth/eval.hpp"

namespace eth::eval {

RankReport evaluate(const model::EthParams& params, const model::EthConfig& config,
                    const data::PreparedData& data, std::span<const data::Snapshot> targets,
                    FilterSetting filter) {
  std::vector<RankedQuery> out;
  for (const data::Snapshot& target : targets) {
    const model::QueryBatch batch = model::queries_from_snapshot(target);
    if (batch.queries.empty()) continue;
    const auto history = data::history_before(data.all, target.time(), config.history);
    ad::Tape tape;
    const auto bound = model::bind(tape, params, false);
    const auto fwd = model::forward(bound, config, history, batch.queries, {});
    const Tensor& logits = fwd.logits.value();
    FilterMask mask;
    if (filter == FilterSetting::time)
      mask = time_filter_mask(batch.queries, batch.targets, logits.cols());
    const auto ranks =
        rank_queries(logits, batch.targets, filter == FilterSetting::time ? &mask : nullptr);
    const Tensor& beta = fwd.beta.value();
    for (std::size_t i = 0; i < ranks.size(); ++i)
      out.push_back({batch.queries[i].entity, batch.queries[i].relation, batch.targets[i],
                     target.time(), ranks[i], beta[i]});
  }
  return RankReport::aggregate(std::move(out));
}

RankReport evaluate(const model::EthParams& params, const model::EthConfig& config,
                    const data::PreparedData& data, std::string_view split, FilterSetting filter) {
  return evaluate(params, config, data, data.split(split), filter);
}

}  // namespace eth::eval
