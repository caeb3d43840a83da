// SPDX-License-Identifier: Apache-2.0
#include "eth/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "eth/error.hpp"

namespace eth::data {
namespace {

namespace fs = std::filesystem;

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

// Parses the first `n` whitespace-separated non-negative integers of a line.
bool parse_fields(const std::string& line, std::size_t n, std::vector<std::uint64_t>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (out.size() < n) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) return false;
    std::uint64_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t' && *next != '\r')) {
      return false;
    }
    out.push_back(v);
    p = next;
  }
  return true;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; });
}

struct RawFact {
  std::uint64_t s, r, o, t;
};

std::vector<RawFact> read_facts(const fs::path& path, const Vocab& vocab) {
  std::ifstream in = open_input(path);
  std::vector<RawFact> facts;
  std::vector<std::uint64_t> f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (!parse_fields(line, 4, f)) throw InputError(where + ": malformed line '" + line + "'");
    if (f[0] >= vocab.num_entities || f[2] >= vocab.num_entities) {
      throw InputError(where + ": entity id out of bounds (|V|=" + std::to_string(vocab.num_entities) + ")");
    }
    if (f[1] >= vocab.num_relations) {
      throw InputError(where + ": relation id out of bounds (|E|=" + std::to_string(vocab.num_relations) + ")");
    }
    facts.push_back({f[0], f[1], f[2], f[3]});
  }
  if (facts.empty()) throw InputError("empty split: " + path.string());
  return facts;
}

}  // namespace

Snapshot::Snapshot(TimeIndex time, std::vector<Triple> triples, std::uint32_t num_entities)
    : time_(time), num_entities_(num_entities), triples_(std::move(triples)) {
  offsets_.assign(num_entities_ + 1, 0);
  subjects_.reserve(triples_.size());
  relations_.reserve(triples_.size());
  objects_.reserve(triples_.size());
  for (const Triple& tr : triples_) {
    if (tr.subject >= num_entities_ || tr.object >= num_entities_) {
      throw InvalidArgument("snapshot: entity id out of bounds");
    }
    subjects_.push_back(tr.subject);
    relations_.push_back(tr.relation);
    objects_.push_back(tr.object);
    ++offsets_[tr.object + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  neighbors_.resize(triples_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Triple& tr : triples_) neighbors_[fill[tr.object]++] = {tr.subject, tr.relation};
}

std::span<const Snapshot::Neighbor> Snapshot::neighbors(EntityId object) const {
  if (object >= num_entities_) throw InvalidArgument("snapshot: entity id out of bounds");
  return {neighbors_.data() + offsets_[object], offsets_[object + 1] - offsets_[object]};
}

Vocab load_stat(const fs::path& stat) {
  std::ifstream in = open_input(stat);
  std::string line;
  std::vector<std::uint64_t> f;
  if (!std::getline(in, line) || !parse_fields(line, 2, f)) {
    throw InputError(stat.string() + ":1: expected '|V| |E|'");
  }
  if (f[0] == 0 || f[1] == 0 || f[0] > UINT32_MAX || f[1] > UINT32_MAX / 2) {
    throw InputError(stat.string() + ":1: invalid vocabulary sizes");
  }
  return Vocab{static_cast<std::uint32_t>(f[0]), static_cast<std::uint32_t>(f[1])};
}

Dataset load_dataset(const fs::path& train, const fs::path& valid, const fs::path& test,
                     const fs::path& stat) {
  Dataset ds;
  ds.vocab = load_stat(stat);
  std::vector<RawFact> raw[3] = {read_facts(train, ds.vocab), read_facts(valid, ds.vocab),
                                 read_facts(test, ds.vocab)};
  std::vector<std::uint64_t> times;
  for (const auto& split : raw) {
    for (const RawFact& f : split) times.push_back(f.t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  auto dense = [&](std::uint64_t t) {
    return static_cast<TimeIndex>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };
  std::vector<Quadruple>* out[3] = {&ds.train, &ds.valid, &ds.test};
  for (int k = 0; k < 3; ++k) {
    out[k]->reserve(raw[k].size());
    for (const RawFact& f : raw[k]) {
      out[k]->push_back({static_cast<EntityId>(f.s), static_cast<RelationId>(f.r),
                         static_cast<EntityId>(f.o), dense(f.t)});
    }
  }
  return ds;
}

void write_quadruples(std::span<const Quadruple> quads, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  for (const Quadruple& q : quads) {
    out << q.subject << '\t' << q.relation << '\t' << q.object << '\t' << q.time << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

void write_dataset(const Dataset& dataset, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_quadruples(dataset.train, dir / "train.txt");
  write_quadruples(dataset.valid, dir / "valid.txt");
  write_quadruples(dataset.test, dir / "test.txt");
  std::ofstream stat(dir / "stat.txt");
  if (!stat) throw InputError("cannot write " + (dir / "stat.txt").string());
  stat << dataset.vocab.num_entities << '\t' << dataset.vocab.num_relations << '\n';
}

std::vector<Quadruple> add_inverses(std::span<const Quadruple> quads, const Vocab& vocab) {
  std::vector<Quadruple> out(quads.begin(), quads.end());
  out.reserve(2 * quads.size());
  for (const Quadruple& q : quads) {
    if (q.relation >= vocab.num_relations) {
      throw InvalidArgument("add_inverses: relation " + std::to_string(q.relation) +
                            " >= |E|; facts already augmented?");
    }
    out.push_back({q.object, q.relation + vocab.num_relations, q.subject, q.time});
  }
  return out;
}

std::vector<Snapshot> build_snapshots(std::span<const Quadruple> quads, std::uint32_t num_entities) {
  std::map<TimeIndex, std::vector<Triple>> by_time;
  for (const Quadruple& q : quads) by_time[q.time].push_back({q.subject, q.relation, q.object});
  std::vector<Snapshot> out;
  out.reserve(by_time.size());
  for (auto& [t, triples] : by_time) out.emplace_back(t, std::move(triples), num_entities);
  return out;
}

std::vector<const Snapshot*> history_before(std::span<const Snapshot> pool, TimeIndex target_time,
                                            std::size_t m) {
  if (m == 0) throw InvalidArgument("history length m must be >= 1");
  auto end = std::lower_bound(pool.begin(), pool.end(), target_time,
                              [](const Snapshot& s, TimeIndex t) { return s.time() < t; });
  const auto available = static_cast<std::size_t>(end - pool.begin());
  const std::size_t n = std::min(m, available);
  std::vector<const Snapshot*> out;
  out.reserve(n);
  for (auto it = end - static_cast<std::ptrdiff_t>(n); it != end; ++it) out.push_back(&*it);
  return out;
}

std::vector<HistoryWindow> history_windows(std::span<const Snapshot> pool, std::size_t m,
                                           std::span<const Snapshot> targets) {
  std::vector<HistoryWindow> out;
  out.reserve(targets.size());
  for (const Snapshot& target : targets) out.push_back({history_before(pool, target.time(), m), &target});
  return out;
}

const std::vector<Snapshot>& PreparedData::split(std::string_view name) const {
  if (name == "train") return train;
  if (name == "valid") return valid;
  if (name == "test") return test;
  throw InvalidArgument("unknown split '" + std::string(name) + "'");
}

PreparedData prepare(const Dataset& dataset) {
  PreparedData p;
  p.vocab = dataset.vocab;
  const std::uint32_t n = dataset.vocab.num_entities;
  const auto train = add_inverses(dataset.train, dataset.vocab);
  const auto valid = add_inverses(dataset.valid, dataset.vocab);
  const auto test = add_inverses(dataset.test, dataset.vocab);
  p.train = build_snapshots(train, n);
  p.valid = build_snapshots(valid, n);
  p.test = build_snapshots(test, n);
  std::vector<Quadruple> all = train;
  all.insert(all.end(), valid.begin(), valid.end());
  all.insert(all.end(), test.begin(), test.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const Quadruple& a, const Quadruple& b) { return a.time < b.time; });
  p.all = build_snapshots(all, n);
  return p;
}

}  // namespace eth::data
