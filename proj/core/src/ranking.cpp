// SPDX-License-Identifier: Apache-2.0
#include "eth/eval.hpp"

#include <map>
#include <string>
#include <utility>

#include "eth/error.hpp"

namespace eth::eval {

FilterSetting parse_filter(std::string_view s) {
  if (s == "raw") return FilterSetting::raw;
  if (s == "time") return FilterSetting::time;
  throw InvalidArgument("unknown filter setting '" + std::string(s) + "' (raw, time)");
}

FilterMask time_filter_mask(std::span<const model::Query> queries,
                            std::span<const data::EntityId> golds, std::size_t num_candidates) {
  if (queries.size() != golds.size()) throw InvalidArgument("queries/golds length mismatch");
  std::map<std::pair<data::EntityId, data::RelationId>, std::vector<data::EntityId>> answers;
  for (std::size_t i = 0; i < queries.size(); ++i)
    answers[{queries[i].entity, queries[i].relation}].push_back(golds[i]);
  FilterMask mask(queries.size(), num_candidates);
  for (std::size_t i = 0; i < queries.size(); ++i)
    for (data::EntityId a : answers[{queries[i].entity, queries[i].relation}])
      if (a != golds[i]) mask.set(i, a);
  return mask;
}

std::vector<std::size_t> rank_queries(const Tensor& scores, std::span<const data::EntityId> golds,
                                      const FilterMask* mask) {
  if (scores.rows() != golds.size()) throw InvalidArgument("scores/golds row mismatch");
  if (mask && (mask->rows() != scores.rows() || mask->cols() != scores.cols()))
    throw InvalidArgument("filter mask shape mismatch");
  std::vector<std::size_t> ranks(golds.size());
  for (std::size_t q = 0; q < golds.size(); ++q) {
    const std::size_t g = golds[q];
    if (g >= scores.cols()) throw InvalidArgument("gold id out of range");
    if (mask && (*mask)(q, g))
      throw InternalError("gold " + std::to_string(g) + " of row " + std::to_string(q) + " is masked");
    const double sg = scores(q, g);
    std::size_t rank = 1;
    for (std::size_t a = 0; a < scores.cols(); ++a) {
      if (a == g || (mask && (*mask)(q, a))) continue;
      const double s = scores(q, a);
      if (s > sg || (s == sg && a < g)) ++rank;
    }
    ranks[q] = rank;
  }
  return ranks;
}

RankReport RankReport::aggregate(std::vector<RankedQuery> queries) {
  RankReport r;
  r.queries = std::move(queries);
  if (r.queries.empty()) return r;
  for (const RankedQuery& q : r.queries) {
    r.mrr += 1.0 / static_cast<double>(q.rank);
    r.hits1 += q.rank <= 1;
    r.hits3 += q.rank <= 3;
    r.hits10 += q.rank <= 10;
  }
  const double n = static_cast<double>(r.queries.size());
  r.mrr /= n;
  r.hits1 /= n;
  r.hits3 /= n;
  r.hits10 /= n;
  return r;
}

}  // namespace eth::eval
