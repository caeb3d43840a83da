// SPDX-License-Identifier: Apache-2.0
#include "eth/eval.hpp"

#include <algorithm>
#include <numeric>

#include "eth/error.hpp"

namespace eth::eval {

double khs(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw InvalidArgument("khs: edge endpoint out of range");
    adj[u].push_back(v);
  }
  // reach[i * n + j]: j reachable from i by a path of length >= 1.
  std::vector<std::uint8_t> reach(n * n, 0);
  std::vector<std::uint32_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    stack.assign(adj[s].begin(), adj[s].end());
    while (!stack.empty()) {
      const std::uint32_t u = stack.back();
      stack.pop_back();
      if (reach[s * n + u]) continue;
      reach[s * n + u] = 1;
      for (std::uint32_t v : adj[u])
        if (!reach[s * n + v]) stack.push_back(v);
    }
  }
  std::size_t reachable = 0, symmetric = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !reach[i * n + j]) continue;
      ++reachable;
      symmetric += reach[j * n + i];
    }
  if (reachable == 0) return 0.0;
  return 1.0 - static_cast<double>(symmetric) / static_cast<double>(reachable);
}

double khs(const data::Snapshot& snapshot, std::uint32_t num_base_relations) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const data::Triple& t : snapshot.triples())
    if (t.relation < num_base_relations) edges.emplace_back(t.subject, t.object);
  return khs(snapshot.num_entities(), edges);
}

Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  s.min = v.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = v.back();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

KhsReport khs_report(std::span<const data::Snapshot> snapshots, std::uint32_t num_base_relations) {
  KhsReport r;
  for (const data::Snapshot& s : snapshots) {
    r.times.push_back(s.time());
    r.values.push_back(khs(s, num_base_relations));
  }
  r.summary = summarize(r.values);
  return r;
}

}  // namespace eth::eval
