// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eth/data.hpp"
#include "eth/model.hpp"

namespace eth::eval {

enum class FilterSetting { raw, time };
FilterSetting parse_filter(std::string_view s);

// |Q| x |V| boolean mask; true = candidate removed from the ranking.
class FilterMask {
 public:
  FilterMask() = default;
  FilterMask(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool operator()(std::size_t q, std::size_t a) const { return bits_[q * cols_ + a] != 0; }
  void set(std::size_t q, std::size_t a, bool v = true) { bits_[q * cols_ + a] = v ? 1 : 0; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Masks, for every row, the other golds of the same (entity, relation) in the batch.
FilterMask time_filter_mask(std::span<const model::Query> queries,
                            std::span<const data::EntityId> golds, std::size_t num_candidates);

// 1 + #{higher} + #{equal with smaller id}, ignoring masked candidates.
// `mask` may be null. Throws InternalError if a gold is masked.
std::vector<std::size_t> rank_queries(const Tensor& scores, std::span<const data::EntityId> golds,
                                      const FilterMask* mask);

struct RankedQuery {
  data::EntityId entity = 0;
  data::RelationId relation = 0;
  data::EntityId gold = 0;
  data::TimeIndex time = 0;
  std::size_t rank = 0;
  double beta = 0.0;
};

struct RankReport {
  std::vector<RankedQuery> queries;
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t count() const { return queries.size(); }

  static RankReport aggregate(std::vector<RankedQuery> queries);
};

// Scores every augmented fact of each target snapshot against all entities,
// with history taken from data.all before the target time.
RankReport evaluate(const model::EthParams& params, const model::EthConfig& config,
                    const data::PreparedData& data, std::span<const data::Snapshot> targets,
                    FilterSetting filter);
RankReport evaluate(const model::EthParams& params, const model::EthConfig& config,
                    const data::PreparedData& data, std::string_view split, FilterSetting filter);

// Krackhardt hierarchy score of a digraph on n nodes.
double khs(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);
// Uses only edges with relation < num_base_relations.
double khs(const data::Snapshot& snapshot, std::uint32_t num_base_relations);

struct Summary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};
// Quartiles by linear interpolation between order statistics.
Summary summarize(std::vector<double> values);

struct KhsReport {
  std::vector<data::TimeIndex> times;
  std::vector<double> values;
  Summary summary;
};
KhsReport khs_report(std::span<const data::Snapshot> snapshots, std::uint32_t num_base_relations);

// Writes norms.csv, curvature.csv, queries.csv and khs.csv into `dir`.
// Returns the written paths.
std::vector<std::filesystem::path> export_diagnostics(const model::EthParams& params,
                                                      const model::EthConfig& config,
                                                      const data::PreparedData& data,
                                                      const std::filesystem::path& dir);

}  // namespace eth::eval
