// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "eth/error.hpp"
#include "eth/eval.hpp"

namespace eth::eval {
namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, const char* header) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << header << '\n';
  return out;
}

double row_norm(const Tensor& t, std::size_t r) { return std::sqrt(squared_norm(t.row(r))); }

}  // namespace

std::vector<std::filesystem::path> export_diagnostics(const model::EthParams& params,
                                                      const model::EthConfig& config,
                                                      const data::PreparedData& data,
                                                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  const std::vector<std::filesystem::path> paths{dir / "norms.csv", dir / "curvature.csv",
                                                 dir / "queries.csv", dir / "khs.csv"};

  auto norms = open_csv(paths[0], "kind,entity,relation,time,norm");
  for (std::size_t k = 0; k < data.test.size(); ++k) {
    const data::Snapshot& target = data.test[k];
    const model::QueryBatch batch = model::queries_from_snapshot(target);
    if (batch.queries.empty()) continue;
    const auto history = data::history_before(data.all, target.time(), config.history);
    ad::Tape tape;
    const auto bound = model::bind(tape, params, false);
    const auto fwd = model::forward(bound, config, history, batch.queries, {});
    if (k + 1 == data.test.size()) {
      const Tensor& cand = fwd.candidates.tangent.value();
      for (std::size_t a = 0; a < cand.rows(); ++a)
        norms << "candidate," << a << ",," << target.time() << ',' << g6(row_norm(cand, a)) << '\n';
    }
    const Tensor& qg = fwd.queries.tangent.value();
    for (std::size_t i = 0; i < batch.queries.size(); ++i)
      norms << "query," << batch.queries[i].entity << ',' << batch.queries[i].relation << ','
            << target.time() << ',' << g6(row_norm(qg, i)) << '\n';
  }

  auto curv = open_csv(paths[1], "relation,c");
  for (std::size_t r = 0; r < params.curvature_raw.rows(); ++r) {
    const double x = params.curvature_raw[r];
    const double c = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    curv << r << ',' << g6(c) << '\n';
  }

  auto qcsv = open_csv(paths[2], "time,query_entity,relation,gold,beta,rank,neg_log10_rank");
  const RankReport report = evaluate(params, config, data, data.test, FilterSetting::time);
  for (const RankedQuery& q : report.queries)
    qcsv << q.time << ',' << q.entity << ',' << q.relation << ',' << q.gold << ',' << g6(q.beta)
         << ',' << q.rank << ',' << g6(-std::log10(static_cast<double>(q.rank))) << '\n';

  auto kcsv = open_csv(paths[3], "time,khs");
  const KhsReport kr = khs_report(data.all, data.vocab.num_relations);
  for (std::size_t i = 0; i < kr.times.size(); ++i) kcsv << kr.times[i] << ',' << g6(kr.values[i]) << '\n';

  for (auto* f : {&norms, &curv, &qcsv, &kcsv}) {
    f->flush();
    if (!*f) throw InputError("failed writing diagnostics in " + dir.string());
  }
  return paths;
}

}  // namespace eth::eval
