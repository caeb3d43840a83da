// SPDX-License-Identifier: Apache-2.0
#pragma once

// Temporal KG facts, per-timestamp snapshots and history windows.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace eth::data {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using TimeIndex = std::uint32_t;

struct Quadruple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;
  TimeIndex time = 0;
  friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

struct Triple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// |V| entities and |E| base relations. After inverse augmentation relation
// ids span 0 .. 2|E|-1, with r + |E| the inverse of r.
struct Vocab {
  std::uint32_t num_entities = 0;
  std::uint32_t num_relations = 0;

  std::uint32_t total_relations() const { return 2 * num_relations; }
  RelationId inverse(RelationId r) const {
    return r < num_relations ? r + num_relations : r - num_relations;
  }
  friend bool operator==(const Vocab&, const Vocab&) = default;
};

// All (augmented) triples sharing one timestamp, with per-object neighbour
// lists N_o = {(s, r)} mirroring the triples exactly. Self-loops are not
// stored; the encoder adds them.
class Snapshot {
 public:
  struct Neighbor {
    EntityId subject;
    RelationId relation;
  };

  Snapshot(TimeIndex time, std::vector<Triple> triples, std::uint32_t num_entities);

  TimeIndex time() const { return time_; }
  std::uint32_t num_entities() const { return num_entities_; }
  const std::vector<Triple>& triples() const { return triples_; }
  std::span<const Neighbor> neighbors(EntityId object) const;

  // Edge columns aligned with triples(), ready for gather/scatter ops.
  const std::vector<std::uint32_t>& subjects() const { return subjects_; }
  const std::vector<std::uint32_t>& relations() const { return relations_; }
  const std::vector<std::uint32_t>& objects() const { return objects_; }

 private:
  TimeIndex time_;
  std::uint32_t num_entities_;
  std::vector<Triple> triples_;
  std::vector<std::uint32_t> subjects_;
  std::vector<std::uint32_t> relations_;
  std::vector<std::uint32_t> objects_;
  std::vector<std::size_t> offsets_;  // CSR over objects
  std::vector<Neighbor> neighbors_;
};

// Up to m snapshots strictly before the target time, oldest first.
struct HistoryWindow {
  std::vector<const Snapshot*> history;
  const Snapshot* target = nullptr;
};

struct Dataset {
  Vocab vocab;
  std::vector<Quadruple> train;
  std::vector<Quadruple> valid;
  std::vector<Quadruple> test;
};

// Reads `s r o t` lines (extra columns ignored) and a stat file whose first
// line is `|V| |E|`. Timestamps of all splits are jointly renumbered to dense
// order-preserving indices. Duplicate facts are kept.
Dataset load_dataset(const std::filesystem::path& train, const std::filesystem::path& valid,
                     const std::filesystem::path& test, const std::filesystem::path& stat);
Vocab load_stat(const std::filesystem::path& stat);

// Writes train.txt, valid.txt, test.txt and stat.txt into `dir`.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
void write_quadruples(std::span<const Quadruple> quads, const std::filesystem::path& path);

// Appends (o, r + |E|, s, t) for every fact. Rejects relation ids >= |E|,
// which also catches double augmentation.
std::vector<Quadruple> add_inverses(std::span<const Quadruple> quads, const Vocab& vocab);

// Groups facts by timestamp, ascending.
std::vector<Snapshot> build_snapshots(std::span<const Quadruple> quads, std::uint32_t num_entities);

// The last m snapshots of `pool` (sorted by time) with time < target_time.
std::vector<const Snapshot*> history_before(std::span<const Snapshot> pool, TimeIndex target_time,
                                            std::size_t m);
std::vector<HistoryWindow> history_windows(std::span<const Snapshot> pool, std::size_t m,
                                           std::span<const Snapshot> targets);

// Inverse-augmented snapshots per split plus their union, which serves as the
// ground-truth history pool during evaluation.
struct PreparedData {
  Vocab vocab;
  std::vector<Snapshot> train;
  std::vector<Snapshot> valid;
  std::vector<Snapshot> test;
  std::vector<Snapshot> all;

  const std::vector<Snapshot>& split(std::string_view name) const;
};

PreparedData prepare(const Dataset& dataset);

}  // namespace eth::data
