// SPDX-License-Identifier: Apache-2.0
#include "eth/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eth/checkpoint.hpp"
#include "eth/config_json.hpp"
#include "eth/error.hpp"
#include "eth/eval.hpp"
#include "eth/synthetic.hpp"

namespace eth::cli {
namespace fs = std::filesystem;
using nlohmann::json;

model::EthConfig AblationMode::apply(model::EthConfig c) const {
  if (name == "-se") c.semantic_encoder = false;
  else if (name == "-tst") c.tangent_transform = false;
  else if (name == "-q") c.query_transform = false;
  else if (name == "beta0") c.beta_mode = model::BetaMode::fixed_zero;
  else if (name == "beta1") c.beta_mode = model::BetaMode::fixed_one;
  else if (name == "beta-learned") c.beta_mode = model::BetaMode::per_relation_learned;
  return c;
}

AblationMode parse_ablation(std::string_view s) {
  std::string n(s);
  if (n == "se" || n == "tst" || n == "q") n = "-" + n;
  if (n == "beta=0" || n == "b0") n = "beta0";
  if (n == "beta=1" || n == "b1") n = "beta1";
  if (n == "beta_learned" || n == "learned") n = "beta-learned";
  for (const char* known : {"full", "-se", "-tst", "-q", "beta0", "beta1", "beta-learned"})
    if (n == known) return {n};
  throw InputError("unknown ablation mode '" + std::string(s) +
                   "' (full, -se, -tst, -q, beta0, beta1, beta-learned)");
}

std::vector<AblationMode> parse_ablations(std::string_view list) {
  std::vector<AblationMode> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, comma - start);
    if (!item.empty()) out.push_back(parse_ablation(item));
    start = comma + 1;
  }
  if (out.empty()) throw InputError("no ablation modes given");
  return out;
}

std::vector<std::size_t> parse_size_list(std::string_view list) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, comma - start);
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size() || v == 0)
      throw InputError("bad positive integer list '" + std::string(list) + "'");
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

data::Dataset load(const DataSource& source) {
  if (!source.synthetic.empty()) {
    try {
      return data::synth_from_string(source.synthetic);
    } catch (const InvalidArgument& e) {
      throw InputError(e.what());
    }
  }
  DataSource s = source;
  const char* root = std::getenv("ETH_DATA_DIR");
  auto fill = [&](fs::path& p, const char* file) {
    if (!p.empty()) return;
    if (root == nullptr || *root == '\0')
      throw InputError(std::string("no --") + fs::path(file).stem().string() +
                       " path given and ETH_DATA_DIR is unset");
    p = fs::path(root) / file;
  };
  fill(s.train, "train.txt");
  fill(s.valid, "valid.txt");
  fill(s.test, "test.txt");
  fill(s.stat, "stat.txt");
  return data::load_dataset(s.train, s.valid, s.test, s.stat);
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

json to_json(const RunConfig& rc) {
  json data{{"train", rc.data.train.string()}, {"valid", rc.data.valid.string()},
            {"test", rc.data.test.string()},   {"stat", rc.data.stat.string()},
            {"synthetic", rc.data.synthetic}};
  return json{{"data", data}, {"model", rc.model}, {"train", rc.train},
              {"m_grid", rc.m_grid}, {"out", rc.out.string()}};
}

void apply_config_file(const fs::path& path, RunConfig& rc) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw InputError(path.string() + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") {
      rc.model = model::preset(value.get<std::string>());
    }
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "preset") continue;
      if (key == "model") model::from_json(value, rc.model);
      else if (key == "train") train::from_json(value, rc.train);
      else if (key == "out") rc.out = value.get<std::string>();
      else if (key == "m_grid") rc.m_grid = value.get<std::vector<std::size_t>>();
      else if (key == "data") {
        for (const auto& [k, v] : value.items()) {
          const std::string s = v.get<std::string>();
          if (k == "train") rc.data.train = s;
          else if (k == "valid") rc.data.valid = s;
          else if (k == "test") rc.data.test = s;
          else if (k == "stat") rc.data.stat = s;
          else if (k == "synthetic") rc.data.synthetic = s;
          else throw InputError("unknown data config key '" + k + "'");
        }
      } else {
        throw InputError("unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw InputError(path.string() + ": key '" + key + "': " + e.what());
    }
  }
}

// Raw flag values; empty optionals were not given on the command line.
struct Flags {
  std::string config_file, preset;
  std::string train, valid, test, stat, synthetic, out;
  std::optional<std::size_t> d, w, layers, epochs, patience;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr, clip;
  std::string m, gamma, beta_mode, loss;
  bool no_clip = false;
  std::string checkpoint, ablate, split = "test", filter = "time";
};

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_file, "JSON run config");
  app.add_option("--preset", f.preset, "icews14 | icews0515 | yago | wiki");
  app.add_option("--train", f.train, "train quadruples");
  app.add_option("--valid", f.valid, "validation quadruples");
  app.add_option("--test", f.test, "test quadruples");
  app.add_option("--stat", f.stat, "stat file with |V| |E|");
  app.add_option("--synthetic", f.synthetic, "cycle[:n,r,T,shift] | chain[:n,r,T]");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--d", f.d, "embedding dimension");
  app.add_option("--w", f.w, "mixing vector dimension");
  app.add_option("--layers", f.layers, "RGCN layers");
  app.add_option("--m", f.m, "history length, or a comma-separated grid");
  app.add_option("--gamma", f.gamma, "relu | identity");
  app.add_option("--beta-mode", f.beta_mode, "query_specific | fixed_zero | fixed_one | per_relation_learned");
  app.add_option("--loss", f.loss, "softmax | binary");
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--lr", f.lr, "Adam learning rate");
  app.add_option("--epochs", f.epochs, "maximum epochs");
  app.add_option("--patience", f.patience, "early-stopping patience");
  app.add_option("--clip", f.clip, "gradient clipping global norm");
  app.add_flag("--no-clip", f.no_clip, "disable gradient clipping");
}

RunConfig resolve(const Flags& f) {
  RunConfig rc;
  if (!f.config_file.empty()) apply_config_file(f.config_file, rc);
  if (!f.preset.empty()) {
    const model::EthConfig p = model::preset(f.preset);
    rc.model.dim = p.dim;
    rc.model.mix_dim = p.mix_dim;
    rc.model.layers = p.layers;
    rc.model.history = p.history;
    rc.model.gamma = p.gamma;
  }
  if (!f.train.empty()) rc.data.train = f.train;
  if (!f.valid.empty()) rc.data.valid = f.valid;
  if (!f.test.empty()) rc.data.test = f.test;
  if (!f.stat.empty()) rc.data.stat = f.stat;
  if (!f.synthetic.empty()) rc.data.synthetic = f.synthetic;
  if (!f.out.empty()) rc.out = f.out;
  if (f.d) rc.model.dim = *f.d;
  if (f.w) rc.model.mix_dim = *f.w;
  if (f.layers) rc.model.layers = *f.layers;
  if (!f.m.empty()) {
    rc.m_grid = parse_size_list(f.m);
    rc.model.history = rc.m_grid.front();
    if (rc.m_grid.size() == 1) rc.m_grid.clear();
  }
  if (!f.gamma.empty()) rc.model.gamma = model::parse_gamma(f.gamma);
  if (!f.beta_mode.empty()) rc.model.beta_mode = model::parse_beta_mode(f.beta_mode);
  if (!f.loss.empty()) rc.model.loss = model::parse_loss_kind(f.loss);
  if (f.seed) rc.train.seed = *f.seed;
  if (f.lr) rc.train.lr = *f.lr;
  if (f.epochs) rc.train.max_epochs = *f.epochs;
  if (f.patience) rc.train.patience = *f.patience;
  if (f.clip) rc.train.grad_clip_norm = *f.clip;
  if (f.no_clip) rc.train.grad_clip_norm.reset();
  rc.model.validate();
  rc.train.validate();
  return rc;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
}

struct TrainedRun {
  train::FitResult fit;
  model::EthConfig config;
};

TrainedRun train_one(const data::PreparedData& data, const model::EthConfig& config,
                     const train::TrainConfig& tc, const fs::path& dir, std::ostream& out) {
  ensure_dir(dir);
  std::ofstream log(dir / "train_log.jsonl");
  if (!log) throw InputError("cannot write " + (dir / "train_log.jsonl").string());
  train::FitOptions opts;
  opts.log = &log;
  TrainedRun run{train::fit(data, config, tc, opts), config};
  json meta{{"model", config}, {"train", tc}, {"best_epoch", run.fit.best_epoch},
            {"best_val_mrr", run.fit.best_val_mrr}};
  model::save_checkpoint(dir / "checkpoint.bin", config, data.vocab, run.fit.best_params, meta);
  out << "m=" << config.history << " epochs=" << run.fit.log.size()
      << " best_epoch=" << run.fit.best_epoch << " val_MRR=" << pct(run.fit.best_val_mrr) << '\n';
  return run;
}

int cmd_train(const Flags& f, std::ostream& out) {
  const RunConfig rc = resolve(f);
  const data::PreparedData data = data::prepare(load(rc.data));
  ensure_dir(rc.out);
  write_json(rc.out / "config.json", to_json(rc));
  if (rc.m_grid.empty()) {
    train_one(data, rc.model, rc.train, rc.out, out);
    return kOk;
  }
  json grid = json::array();
  std::size_t best_m = 0;
  double best = -1.0;
  for (std::size_t m : rc.m_grid) {
    model::EthConfig c = rc.model;
    c.history = m;
    const TrainedRun run = train_one(data, c, rc.train, rc.out / ("m" + std::to_string(m)), out);
    grid.push_back({{"m", m}, {"val_mrr", run.fit.best_val_mrr},
                    {"checkpoint", (rc.out / ("m" + std::to_string(m)) / "checkpoint.bin").string()}});
    if (run.fit.best_val_mrr > best) {
      best = run.fit.best_val_mrr;
      best_m = m;
    }
  }
  write_json(rc.out / "grid.json", json{{"runs", grid}, {"best_m", best_m}});
  out << "best m=" << best_m << " val_MRR=" << pct(best) << '\n';
  return kOk;
}

void print_metrics(const eval::RankReport& r, std::ostream& out) {
  out << "MRR  H@1  H@3  H@10\n"
      << pct(r.mrr) << "  " << pct(r.hits1) << "  " << pct(r.hits3) << "  " << pct(r.hits10) << '\n';
}

void check_vocab(const data::Vocab& ck, const data::Vocab& ds) {
  if (ck != ds)
    throw StateError("checkpoint vocab (" + std::to_string(ck.num_entities) + " entities, " +
                     std::to_string(ck.num_relations) + " relations) does not match dataset (" +
                     std::to_string(ds.num_entities) + " entities, " +
                     std::to_string(ds.num_relations) + " relations)");
}

int cmd_eval(const Flags& f, std::ostream& out) {
  if (f.checkpoint.empty()) throw InputError("eval needs --checkpoint");
  const RunConfig rc = resolve(f);
  const model::Checkpoint ck = model::load_checkpoint(f.checkpoint);
  model::EthConfig config = ck.config;
  if (!f.m.empty()) config.history = rc.model.history;
  const data::PreparedData data = data::prepare(load(rc.data));
  check_vocab(ck.vocab, data.vocab);
  const auto report = eval::evaluate(ck.params, config, data, f.split, eval::parse_filter(f.filter));
  print_metrics(report, out);
  ensure_dir(rc.out);
  std::ofstream ranks(rc.out / "ranks.csv");
  if (!ranks) throw InputError("cannot write " + (rc.out / "ranks.csv").string());
  ranks << "time,query_entity,relation,gold,rank\n";
  for (const auto& q : report.queries)
    ranks << q.time << ',' << q.entity << ',' << q.relation << ',' << q.gold << ',' << q.rank << '\n';
  return kOk;
}

int cmd_ablate(const Flags& f, std::ostream& out) {
  const auto modes = parse_ablations(f.ablate);
  const RunConfig rc = resolve(f);
  const data::PreparedData data = data::prepare(load(rc.data));
  ensure_dir(rc.out);
  write_json(rc.out / "config.json", to_json(rc));
  json rows = json::array();
  std::vector<std::pair<std::string, eval::RankReport>> results;
  for (const AblationMode& mode : modes) {
    const model::EthConfig c = mode.apply(rc.model);
    const fs::path dir = rc.out / ("ablate_" + (mode.name[0] == '-' ? mode.name.substr(1) : mode.name));
    const TrainedRun run = train_one(data, c, rc.train, dir, out);
    results.emplace_back(mode.name,
                         eval::evaluate(run.fit.best_params, c, data, data.test, eval::FilterSetting::time));
  }
  out << std::left << std::setw(14) << "mode" << "MRR\n";
  for (const auto& [name, report] : results) {
    out << std::left << std::setw(14) << name << pct(report.mrr) << '\n';
    rows.push_back({{"mode", name}, {"mrr", report.mrr}, {"hits1", report.hits1},
                    {"hits3", report.hits3}, {"hits10", report.hits10}});
  }
  write_json(rc.out / "ablation.json", rows);
  return kOk;
}

int cmd_analyze(const Flags& f, std::ostream& out) {
  const RunConfig rc = resolve(f);
  const data::PreparedData data = data::prepare(load(rc.data));
  if (!f.checkpoint.empty()) {
    const model::Checkpoint ck = model::load_checkpoint(f.checkpoint);
    check_vocab(ck.vocab, data.vocab);
    for (const auto& p : eval::export_diagnostics(ck.params, ck.config, data, rc.out))
      out << "wrote " << p.string() << '\n';
    return kOk;
  }
  const auto report = eval::khs_report(data.all, data.vocab.num_relations);
  const auto& s = report.summary;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6g  %.6g  %.6g  %.6g  %.6g  %.6g", s.min, s.q1, s.median, s.q3,
                s.max, s.mean);
  out << "snapshots " << report.values.size() << '\n'
      << "Khs min  q1  median  q3  max  mean\n"
      << buf << '\n';
  return kOk;
}

int cmd_synth(const Flags& f, std::ostream& out) {
  if (f.synthetic.empty()) throw InputError("synth needs --synthetic");
  if (f.out.empty()) throw InputError("synth needs --out");
  DataSource src;
  src.synthetic = f.synthetic;
  const data::Dataset ds = load(src);
  data::write_dataset(ds, f.out);
  out << "wrote " << ds.train.size() << '/' << ds.valid.size() << '/' << ds.test.size()
      << " train/valid/test facts to " << f.out << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporal KG extrapolation with hybrid Euclidean/hyperbolic scoring", "eth"};
  app.require_subcommand(1);
  Flags f;
  auto* train_cmd = app.add_subcommand("train", "fit a model and write the best checkpoint");
  auto* eval_cmd = app.add_subcommand("eval", "rank a split with a checkpoint");
  auto* ablate_cmd = app.add_subcommand("ablate", "train and compare ablation modes");
  auto* analyze_cmd = app.add_subcommand("analyze", "Khs summary, or diagnostics with --checkpoint");
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset");
  for (auto* c : {train_cmd, eval_cmd, ablate_cmd, analyze_cmd}) add_common(*c, f);
  for (auto* c : {eval_cmd, analyze_cmd}) c->add_option("--checkpoint", f.checkpoint, "checkpoint file");
  eval_cmd->add_option("--split", f.split, "valid | test")->check(CLI::IsMember({"train", "valid", "test"}));
  eval_cmd->add_option("--filter", f.filter, "time | raw")->check(CLI::IsMember({"time", "raw"}));
  ablate_cmd->add_option("--ablate", f.ablate, "comma-separated modes")->required();
  synth_cmd->add_option("--synthetic", f.synthetic, "cycle[:n,r,T,shift] | chain[:n,r,T]")->required();
  synth_cmd->add_option("--out", f.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  try {
    if (*train_cmd) return cmd_train(f, out);
    if (*eval_cmd) return cmd_eval(f, out);
    if (*ablate_cmd) return cmd_ablate(f, out);
    if (*analyze_cmd) return cmd_analyze(f, out);
    if (*synth_cmd) return cmd_synth(f, out);
  } catch (const InputError& e) {
    err << "eth: " << e.what() << '\n';
    return kInputError;
  } catch (const InvalidArgument& e) {
    err << "eth: " << e.what() << '\n';
    return kInputError;
  } catch (const StateError& e) {
    err << "eth: " << e.what() << '\n';
    return kStateError;
  } catch (const NumericError& e) {
    err << "eth: numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "eth: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace eth::cli
