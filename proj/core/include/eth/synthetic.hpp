// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic temporal KGs for tests and desk-scale runs.

#include <cstdint>
#include <string_view>
#include <vector>

#include "eth/data.hpp"

namespace eth::data {

struct CycleSpec {
  std::uint32_t num_entities = 20;
  std::uint32_t num_relations = 4;
  std::uint32_t num_times = 60;
  std::uint32_t shift = 3;
};

// At time t, entity i links via relation (i mod R) to (i + 1 + (t mod shift)) mod N.
std::vector<Quadruple> synth_cycle_facts(const CycleSpec& spec);

// At time t, entity i links to i + 1 for i < N - 1 via relation (i mod R).
std::vector<Quadruple> synth_chain_facts(std::uint32_t num_entities, std::uint32_t num_relations,
                                         std::uint32_t num_times);

// Chronological split: the last `test_times` timestamps form the test split,
// the `valid_times` before them the validation split.
Dataset split_by_time(const Vocab& vocab, std::span<const Quadruple> facts, std::uint32_t valid_times,
                      std::uint32_t test_times);

// Cycle dataset split with max(1, T/6) validation and test timestamps
// (10/10 for the default 60 snapshots).
Dataset synth_cycle(const CycleSpec& spec);
Dataset synth_chain(std::uint32_t num_entities, std::uint32_t num_relations, std::uint32_t num_times);

// Parses "cycle", "cycle:n,r,T,shift", "chain" or "chain:n,r,T".
Dataset synth_from_string(std::string_view spec);

}  // namespace eth::data
