// SPDX-License-Identifier: Apache-2.0
#include "eth/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "eth/error.hpp"

namespace eth::data {
namespace {

std::vector<std::uint32_t> parse_list(std::string_view s, std::string_view whole) {
  std::vector<std::uint32_t> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view tok = s.substr(0, comma);
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw InvalidArgument("synthetic spec '" + std::string(whole) + "': bad number '" + std::string(tok) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::uint32_t default_split(std::uint32_t num_times) { return std::max<std::uint32_t>(1, num_times / 6); }

}  // namespace

std::vector<Quadruple> synth_cycle_facts(const CycleSpec& spec) {
  if (spec.num_entities < 4) throw InvalidArgument("synth_cycle: need at least 4 entities");
  if (spec.num_relations == 0 || spec.shift == 0) throw InvalidArgument("synth_cycle: relations and shift must be >= 1");
  std::vector<Quadruple> facts;
  facts.reserve(static_cast<std::size_t>(spec.num_entities) * spec.num_times);
  for (std::uint32_t t = 0; t < spec.num_times; ++t) {
    for (std::uint32_t i = 0; i < spec.num_entities; ++i) {
      facts.push_back({i, i % spec.num_relations, (i + 1 + t % spec.shift) % spec.num_entities, t});
    }
  }
  return facts;
}

std::vector<Quadruple> synth_chain_facts(std::uint32_t num_entities, std::uint32_t num_relations,
                                         std::uint32_t num_times) {
  if (num_entities < 2 || num_relations == 0) throw InvalidArgument("synth_chain: need >= 2 entities and >= 1 relation");
  std::vector<Quadruple> facts;
  for (std::uint32_t t = 0; t < num_times; ++t) {
    for (std::uint32_t i = 0; i + 1 < num_entities; ++i) facts.push_back({i, i % num_relations, i + 1, t});
  }
  return facts;
}

Dataset split_by_time(const Vocab& vocab, std::span<const Quadruple> facts, std::uint32_t valid_times,
                      std::uint32_t test_times) {
  TimeIndex max_t = 0;
  for (const Quadruple& q : facts) max_t = std::max(max_t, q.time);
  const std::uint32_t num_times = facts.empty() ? 0 : max_t + 1;
  if (valid_times + test_times >= num_times) {
    throw InvalidArgument("split_by_time: " + std::to_string(num_times) + " timestamps cannot hold " +
                          std::to_string(valid_times) + " valid + " + std::to_string(test_times) + " test");
  }
  const TimeIndex test_start = num_times - test_times;
  const TimeIndex valid_start = test_start - valid_times;
  Dataset ds;
  ds.vocab = vocab;
  for (const Quadruple& q : facts) {
    if (q.time >= test_start) {
      ds.test.push_back(q);
    } else if (q.time >= valid_start) {
      ds.valid.push_back(q);
    } else {
      ds.train.push_back(q);
    }
  }
  return ds;
}

Dataset synth_cycle(const CycleSpec& spec) {
  const auto facts = synth_cycle_facts(spec);
  const std::uint32_t k = default_split(spec.num_times);
  return split_by_time(Vocab{spec.num_entities, spec.num_relations}, facts, k, k);
}

Dataset synth_chain(std::uint32_t num_entities, std::uint32_t num_relations, std::uint32_t num_times) {
  const auto facts = synth_chain_facts(num_entities, num_relations, num_times);
  const std::uint32_t k = default_split(num_times);
  return split_by_time(Vocab{num_entities, num_relations}, facts, k, k);
}

Dataset synth_from_string(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::vector<std::uint32_t> args =
      colon == std::string_view::npos ? std::vector<std::uint32_t>{} : parse_list(spec.substr(colon + 1), spec);
  if (kind == "cycle") {
    CycleSpec c;
    if (!args.empty()) {
      if (args.size() != 4) throw InvalidArgument("synthetic spec 'cycle:n,r,T,shift' needs 4 numbers");
      c = CycleSpec{args[0], args[1], args[2], args[3]};
    }
    return synth_cycle(c);
  }
  if (kind == "chain") {
    if (args.empty()) return synth_chain(20, 4, 60);
    if (args.size() != 3) throw InvalidArgument("synthetic spec 'chain:n,r,T' needs 3 numbers");
    return synth_chain(args[0], args[1], args[2]);
  }
  throw InvalidArgument("unknown synthetic dataset '" + std::string(kind) + "' (expected cycle or chain)");
}

}  // namespace eth::data
