#ifndef ALGOEVO_CLI_HPP
#define ALGOEVO_CLI_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "algoevo/bdm.hpp"
#include "algoevo/binary_matrix.hpp"
#include "algoevo/ctm.hpp"
#include "algoevo/errors.hpp"
#include "algoevo/evolve.hpp"
#include "algoevo/experiments.hpp"
#include "algoevo/graphs.hpp"
#include "algoevo/stats.hpp"
#include "algoevo/trace_json.hpp"

namespace algoevo::cli {

inline constexpr const char* kTableEnvVar = "ALGOEVO_CTM_TABLE";
inline constexpr const char* kSeedMixingId = "splitmix64-chain-v1";

// Exit codes: 0 ok, 2 config error, 3 data error, 4 resource limit.
enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kResourceLimit = 4 };

// ---------------------------------------------------------------------------
// key=value parameter handling
// ---------------------------------------------------------------------------

class Params {
 public:
  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end())
      throw config_error("missing required key `" + key + "`");
    consumed_.insert(key);
    resolved_[key] = it->second;
    return it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    consumed_.insert(key);
    auto it = values_.find(key);
    const std::string v = it == values_.end() ? fallback : it->second;
    resolved_[key] = v;
    return v;
  }

  std::optional<std::string> str_opt(const std::string& key) {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    resolved_[key] = it->second;
    return it->second;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    return parse_int(key, str(key, std::to_string(fallback)));
  }
  std::int64_t integer(const std::string& key) {
    return parse_int(key, str(key));
  }

  std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) {
    const std::string v = str(key, std::to_string(fallback));
    try {
      std::size_t used = 0;
      const std::uint64_t r = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw config_error("key `" + key + "`: not an unsigned integer: " + v);
    }
  }

  double real(const std::string& key, double fallback) {
    const std::string v = str(key, format_number(fallback));
    try {
      std::size_t used = 0;
      const double r = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw config_error("key `" + key + "`: not a number: " + v);
    }
  }

  bool boolean(const std::string& key, bool fallback) {
    const std::string v = str(key, fallback ? "1" : "0");
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw config_error("key `" + key + "`: expected 0/1/true/false, got " + v);
  }

  // Rejects any key that no getter asked about.
  void reject_unknown() const {
    for (const auto& kv : values_)
      if (!consumed_.count(kv.first))
        throw config_error("unknown key `" + kv.first + "`");
  }

  const std::map<std::string, std::string>& resolved() const {
    return resolved_;
  }

 private:
  std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const std::int64_t r = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw config_error("key `" + key + "`: not an integer: " + v);
    }
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
};

struct Invocation {
  std::string command;
  Params params;
};

inline void apply_token(Params& params, const std::string& token) {
  std::string t = token;
  if (t.rfind("--", 0) == 0) t = t.substr(2);
  const auto eq = t.find('=');
  if (eq == std::string::npos || eq == 0)
    throw config_error("expected key=value, got `" + token + "`");
  params.set(t.substr(0, eq), t.substr(eq + 1));
}

inline void load_config_file(Params& params, const std::string& path,
                             const std::set<std::string>& overridden) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open config file: " + path);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::string t = line.substr(first);
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      throw config_error("config file `" + path + "`: expected key=value: " +
                         line);
    const std::string key = t.substr(0, eq);
    if (!overridden.count(key)) params.set(key, t.substr(eq + 1));
  }
}

inline Invocation parse_invocation(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------
// Output bookkeeping: declared outputs are removed again if the command
// fails part-way.
// ---------------------------------------------------------------------------

class OutputSet {
 public:
  void write(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for write: " + path);
    os << content;
    if (!os.good()) throw data_error("write failed: " + path);
    paths_.push_back(path);
  }

  void note(const std::string& path) { paths_.push_back(path); }

  const std::vector<std::string>& paths() const { return paths_; }

  void remove_all() {
    for (const auto& p : paths_) std::remove(p.c_str());
    paths_.clear();
  }

 private:
  std::vector<std::string> paths_;
};

inline std::uint64_t file_fingerprint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("cannot open: " + path);
  std::uint64_t h = 0xCBF29CE484222325ull;
  char c;
  while (is.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Shared parameter blocks
// ---------------------------------------------------------------------------

struct TableRef {
  std::optional<CtmTable> table;
  std::string path;
  const CtmTable* get() const { return table ? &*table : nullptr; }
};

inline TableRef load_table_param(Params& p, bool required) {
  TableRef ref;
  std::optional<std::string> path = p.str_opt("table");
  if (!path) {
    if (const char* env = std::getenv(kTableEnvVar)) path = std::string(env);
  }
  if (!path) {
    if (required)
      throw config_error("this command requires table=<path> (or " +
                         std::string(kTableEnvVar) + ")");
    return ref;
  }
  ref.path = *path;
  ref.table = CtmTable::load(*path);
  return ref;
}

// Strategy parameters shared by every arm; the kind itself comes from
// `strategy=` or a `strategies=` list depending on the command.
inline Strategy strategy_common(Params& p) {
  Strategy st;
  st.epsilon = p.real("epsilon", 1e-10);
  st.block_size = static_cast<int>(p.integer("block", 4));
  st.bdm_block_size = static_cast<int>(p.integer("bdm_block", 4));
  return st;
}

inline StrategyKind strategy_kind_param(Params& p, const std::string& key,
                                        const std::string& fallback) {
  try {
    return parse_strategy_kind(fallback.empty() ? p.str(key)
                                                : p.str(key, fallback));
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

inline EvolutionConfig config_from_params(Params& p, const Strategy& st,
                                          std::int64_t threshold_fallback) {
  EvolutionConfig cfg;
  cfg.strategy = st;
  cfg.shifts = static_cast<int>(p.integer("shifts", 1));
  cfg.replacement = p.boolean("replacement", false);
  cfg.extinction_threshold = p.integer("threshold", threshold_fallback);
  cfg.convergence_alpha = p.real("alpha", 0.0);
  return cfg;
}

// Resolves `target=` (built-in name) or `target_file=` (0/1 text matrix).
inline BinaryMatrix target_from_params(Params& p) {
  const auto name = p.str_opt("target");
  const auto file = p.str_opt("target_file");
  if (name && file)
    throw config_error("give either target= or target_file=, not both");
  if (name) {
    try {
      return target_by_name(*name);
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
  }
  if (file) {
    std::ifstream is(*file);
    if (!is) throw data_error("cannot open matrix file: " + *file);
    try {
      return BinaryMatrix::read_text(is);
    } catch (const std::invalid_argument& e) {
      throw data_error(std::string("bad matrix file: ") + e.what());
    }
  }
  throw config_error("missing target= or target_file=");
}

inline json manifest_skeleton(const std::string& command, const Params& p,
                              const OutputSet& outputs) {
  json m;
  m["command"] = command;
  json cfg = json::object();
  for (const auto& kv : p.resolved()) cfg[kv.first] = kv.second;
  m["config"] = std::move(cfg);
  json outs = json::array();
  for (const auto& o : outputs.paths()) outs.push_back(o);
  m["outputs"] = std::move(outs);
  m["derived"] = json::object();
  m["derived"]["seed_mixing"] = kSeedMixingId;
  return m;
}

inline void write_manifest(const std::string& primary_output, json manifest,
                           OutputSet& outputs) {
  const std::string path = primary_output + ".manifest.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot open for write: " + path);
  os << manifest.dump(2) << '\n';
  if (!os.good()) throw data_error("write failed: " + path);
  outputs.note(path);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline void cmd_gen_ctm(Params& p, OutputSet& outputs) {
  const int states = static_cast<int>(p.integer("states"));
  const int cap = static_cast<int>(p.integer("cap"));
  const std::string out = p.str("out");
  CtmBuildOptions opts;
  opts.budget = p.uinteger("budget", opts.budget);
  opts.threads = static_cast<int>(p.integer("threads", 0));
  p.reject_unknown();

  const CtmTable table = build_ctm_table(states, cap, opts);
  std::ostringstream body;
  table.save(body);
  outputs.write(out, body.str());

  json manifest = manifest_skeleton("gen-ctm", p, outputs);
  manifest["derived"]["table_fingerprint"] = hash_hex(file_fingerprint(out));
  manifest["derived"]["entries"] = table.entries().size();
  write_manifest(out, std::move(manifest), outputs);
}

inline void cmd_bdm(Params& p, OutputSet& outputs, std::ostream& stdout_sink) {
  const BinaryMatrix m = target_from_params(p);
  TableRef table = load_table_param(p, true);
  const int block = static_cast<int>(p.integer("block", 4));
  const auto out = p.str_opt("out");
  p.reject_unknown();

  json report;
  report["size"] = m.size();
  report["block_size"] = block;
  report["bdm"] = bdm(m, *table.get(), block);
  report["bit_entropy"] = bit_entropy(m);
  if (m.size() % block == 0) report["block_entropy"] = block_entropy(m, block);
  if (out) {
    outputs.write(*out, report.dump(2) + "\n");
    json manifest = manifest_skeleton("bdm", p, outputs);
    manifest["derived"]["table_fingerprint"] =
        hash_hex(file_fingerprint(table.path));
    write_manifest(*out, std::move(manifest), outputs);
  } else {
    stdout_sink << report.dump(2) << '\n';
  }
}

inline void cmd_evolve(Params& p, OutputSet& outputs) {
  const BinaryMatrix target = target_from_params(p);
  Strategy st = strategy_common(p);
  st.kind = strategy_kind_param(p, "strategy", "");
  EvolutionConfig cfg = config_from_params(p, st, 2500);
  cfg.seed = p.uinteger("seed", 1);
  TableRef table = load_table_param(p, st.needs_table());
  const std::string out = p.str("out");
  const auto init_file = p.str_opt("init_file");
  p.reject_unknown();
  cfg.validate(target.size());

  BinaryMatrix initial(target.size());
  std::uint64_t init_seed = 0;
  if (init_file) {
    std::ifstream is(*init_file);
    if (!is) throw data_error("cannot open matrix file: " + *init_file);
    initial = BinaryMatrix::read_text(is);
    if (initial.size() != target.size())
      throw data_error("initial matrix size does not match target");
  } else {
    init_seed = mix_seed(cfg.seed, {kSeedTagInit});
    Rng rng(init_seed);
    initial = BinaryMatrix::random(rng, target.size());
  }

  const EvolutionTrace trace = evolve_run(initial, target, cfg, table.get());
  outputs.write(out, trace_to_json(trace, cfg).dump(2) + "\n");

  json manifest = manifest_skeleton("evolve", p, outputs);
  manifest["derived"]["run_seed"] = cfg.seed;
  if (!init_file) manifest["derived"]["init_seed"] = init_seed;
  if (!table.path.empty())
    manifest["derived"]["table_fingerprint"] =
        hash_hex(file_fingerprint(table.path));
  write_manifest(out, std::move(manifest), outputs);
}

// targets=complete8,star8 or targets=random:20 with size=.
inline std::pair<std::vector<BinaryMatrix>, std::vector<std::string>>
targets_from_params(Params& p, std::uint64_t master_seed) {
  const std::string spec = p.str("targets");
  std::vector<BinaryMatrix> targets;
  std::vector<std::string> ids;
  if (spec.rfind("random:", 0) == 0) {
    int count = 0;
    try {
      count = std::stoi(spec.substr(7));
    } catch (const std::exception&) {
      throw config_error("targets=random:<count>: bad count");
    }
    if (count < 1) throw config_error("targets=random:<count>: bad count");
    const int size = static_cast<int>(p.integer("size", 8));
    for (int j = 0; j < count; ++j) {
      Rng rng(mix_seed(master_seed, {kSeedTagTarget, static_cast<std::uint64_t>(j)}));
      targets.push_back(BinaryMatrix::random(rng, size));
      ids.push_back("random" + std::to_string(j));
    }
    return {targets, ids};
  }
  std::istringstream ss(spec);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    try {
      targets.push_back(target_by_name(name));
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
    ids.push_back(name);
  }
  if (targets.empty()) throw config_error("targets= resolved to nothing");
  return {targets, ids};
}

inline std::vector<ArmSpec> arms_from_params(Params& p,
                                             const EvolutionConfig& base,
                                             const std::string& fallback) {
  const std::string list = p.str("strategies", fallback);
  std::vector<ArmSpec> arms;
  std::istringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    ArmSpec arm;
    arm.name = name;
    arm.cfg = base;
    try {
      arm.cfg.strategy.kind = parse_strategy_kind(name);
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
    arms.push_back(std::move(arm));
  }
  if (arms.empty()) throw config_error("strategies= resolved to nothing");
  return arms;
}

inline void cmd_batch(Params& p, OutputSet& outputs) {
  ExperimentSpec spec;
  spec.master_seed = p.uinteger("master_seed", 1);
  auto [targets, ids] = targets_from_params(p, spec.master_seed);
  spec.targets = std::move(targets);
  spec.target_ids = std::move(ids);
  spec.replicates = static_cast<int>(p.integer("replicates"));
  if (spec.replicates < 1)
    throw config_error("replicates must be a positive integer");
  Strategy st = strategy_common(p);
  EvolutionConfig base = config_from_params(p, st, 2500);
  spec.arms = arms_from_params(p, base, "uniform,bdm");
  spec.threads = static_cast<int>(p.integer("threads", 0));
  spec.report_block_size = st.bdm_block_size;
  bool needs_table = false;
  for (const auto& arm : spec.arms)
    needs_table |= arm.cfg.strategy.needs_table();
  TableRef table = load_table_param(p, needs_table);
  const std::string out = p.str("out");
  p.reject_unknown();

  const BatchResult batch = run_batch(spec, table.get());
  outputs.write(out, results_csv(spec, batch));

  json manifest = manifest_skeleton("batch", p, outputs);
  manifest["derived"]["replicate_seed_rule"] =
      "run[j][i][arm] = mix(master, {run, j, i, arm}); "
      "init[j][i] = mix(master, {init, j, i})";
  if (!table.path.empty())
    manifest["derived"]["table_fingerprint"] =
        hash_hex(file_fingerprint(table.path));
  write_manifest(out, std::move(manifest), outputs);
}

inline void cmd_sequence(Params& p, OutputSet& outputs) {
  ExperimentSpec spec;
  spec.master_seed = p.uinteger("master_seed", 1);
  const int nodes = static_cast<int>(p.integer("nodes", 8));
  spec.targets = edge_removal_sequence(nodes);
  for (std::size_t j = 0; j < spec.targets.size(); ++j)
    spec.target_ids.push_back("removal" + std::to_string(j + 1));
  spec.replicates = static_cast<int>(p.integer("replicates", 50));
  Strategy st = strategy_common(p);
  st.kind = strategy_kind_param(p, "strategy", "bdm");
  EvolutionConfig base =
      config_from_params(p, st, nodes <= 8 ? 2500 : 10000);
  ArmSpec uniform_arm{"uniform", base};
  uniform_arm.cfg.strategy.kind = StrategyKind::uniform;
  ArmSpec f_arm{strategy_name(st.kind), base};
  spec.arms = {uniform_arm, f_arm};
  spec.threads = static_cast<int>(p.integer("threads", 0));
  spec.report_block_size = st.bdm_block_size;
  TableRef table =
      load_table_param(p, f_arm.cfg.strategy.needs_table());
  const std::string out = p.str("out");
  const auto results_out = p.str_opt("results_out");
  p.reject_unknown();

  const SpeedUpReport report = speedup_curve(spec, table.get());
  outputs.write(out, speedup_curve_csv(report, f_arm.name));
  if (results_out) {
    const BatchResult batch = run_batch(spec, table.get());
    outputs.write(*results_out, results_csv(spec, batch));
  }

  json manifest = manifest_skeleton("sequence", p, outputs);
  if (!table.path.empty())
    manifest["derived"]["table_fingerprint"] =
        hash_hex(file_fingerprint(table.path));
  write_manifest(out, std::move(manifest), outputs);
}

inline void cmd_chase(Params& p, OutputSet& outputs) {
  const std::uint64_t master_seed = p.uinteger("master_seed", 1);
  DynamicKind kind;
  try {
    kind = parse_dynamic_kind(p.str("kind"));
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  const int nodes = static_cast<int>(p.integer("nodes", 16));
  const int replicates = static_cast<int>(p.integer("replicates", 100));
  Strategy st = strategy_common(p);
  EvolutionConfig base = config_from_params(p, st, 10000);
  std::vector<ArmSpec> arms =
      arms_from_params(p, base, "uniform,bdm,local_bdm");
  const bool seed_stage0 = p.boolean("seed_stage0", false);
  const int threads = static_cast<int>(p.integer("threads", 0));
  bool needs_table = false;
  for (const auto& arm : arms) needs_table |= arm.cfg.strategy.needs_table();
  TableRef table = load_table_param(p, needs_table);
  const std::string out = p.str("out");
  p.reject_unknown();

  const DynamicSequence seq = dynamic_sequence(kind, nodes);
  const ChaseResult chase = chase_dynamic(seq, replicates, arms, table.get(),
                                          master_seed, threads, seed_stage0);
  outputs.write(out, chase_curve_csv(chase));

  json manifest = manifest_skeleton("chase", p, outputs);
  manifest["derived"]["stages"] = seq.stages.size();
  if (!table.path.empty())
    manifest["derived"]["table_fingerprint"] =
        hash_hex(file_fingerprint(table.path));
  write_manifest(out, std::move(manifest), outputs);
}

inline void cmd_evonet(Params& p, OutputSet& outputs) {
  const BinaryMatrix target = target_from_params(p);
  const std::uint64_t master_seed = p.uinteger("master_seed", 1);
  const int replicates = static_cast<int>(p.integer("replicates", 50));
  if (replicates < 1) throw config_error("replicates must be >= 1");
  Strategy st = strategy_common(p);
  st.kind = strategy_kind_param(p, "strategy", "bdm");
  EvolutionConfig base = config_from_params(p, st, 10000);
  const int min_count = static_cast<int>(p.integer("min_count", 2));
  TableRef table = load_table_param(p, st.needs_table());
  const std::string prefix = p.str("out");
  p.reject_unknown();
  base.validate(target.size());

  std::vector<EvolutionTrace> traces;
  traces.reserve(replicates);
  for (int i = 0; i < replicates; ++i) {
    Rng init_rng(mix_seed(master_seed, {kSeedTagInit, 0, static_cast<std::uint64_t>(i)}));
    const BinaryMatrix m0 = BinaryMatrix::random(init_rng, target.size());
    EvolutionConfig cfg = base;
    cfg.seed = mix_seed(master_seed, {kSeedTagRun, 0, static_cast<std::uint64_t>(i), 0});
    traces.push_back(evolve_run(m0, target, cfg, table.get()));
  }
  const EvolutionaryNetwork net = build_evolutionary_network(
      traces, table.get(), min_count, st.bdm_block_size);

  outputs.write(prefix + "edges.csv", evonet_edges_csv(net));
  outputs.write(prefix + "nodes.csv", evonet_nodes_csv(net));
  outputs.write(prefix + "forward.csv", evonet_forward_csv(net));

  json manifest = manifest_skeleton("evonet", p, outputs);
  manifest["derived"]["nodes"] = net.nodes.size();
  if (!table.path.empty())
    manifest["derived"]["table_fingerprint"] =
        hash_hex(file_fingerprint(table.path));
  write_manifest(prefix + "edges.csv", std::move(manifest), outputs);
}

inline void cmd_analyze(Params& p, OutputSet& outputs,
                        std::ostream& stdout_sink) {
  const std::string in = p.str("in");
  const auto out = p.str_opt("out");
  p.reject_unknown();

  std::ifstream is(in);
  if (!is) throw data_error("cannot open: " + in);
  std::string line;
  if (!std::getline(is, line)) throw data_error("empty curve file: " + in);
  std::map<std::string, double> bdm_by_target;
  std::map<std::string, double> delta_by_target;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4)
      throw data_error(in + " line " + std::to_string(lineno) +
                       ": expected 4 fields");
    double value = std::numeric_limits<double>::quiet_NaN();
    if (fields[3] != "NaN") {
      try {
        value = std::stod(fields[3]);
      } catch (const std::exception&) {
        throw data_error(in + " line " + std::to_string(lineno) +
                         ": bad value");
      }
    }
    if (fields[2] == "target_bdm") bdm_by_target[fields[0]] = value;
    if (fields[2] == "delta") delta_by_target[fields[0]] = value;
  }
  std::vector<double> xs, ys;
  for (const auto& kv : bdm_by_target) {
    auto it = delta_by_target.find(kv.first);
    if (it == delta_by_target.end() || std::isnan(it->second) ||
        std::isnan(kv.second))
      continue;
    xs.push_back(kv.second);
    ys.push_back(it->second);
  }
  if (xs.size() < 3)
    throw data_error("curve file has fewer than 3 usable (bdm, delta) rows");

  const SpearmanResult sp = spearman(xs, ys);
  json report;
  report["n"] = sp.n;
  report["spearman_rho"] = sp.rho;
  report["spearman_p"] = sp.p_value;
  if (xs.size() >= 4) {
    json fit = json::array();
    for (double c : polyfit(xs, ys, 3)) fit.push_back(c);
    report["cubic_fit"] = std::move(fit);
  }
  if (out) {
    outputs.write(*out, report.dump(2) + "\n");
    write_manifest(*out, manifest_skeleton("analyze", p, outputs), outputs);
  } else {
    stdout_sink << report.dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline Invocation parse_invocation(const std::vector<std::string>& args) {
  if (args.empty())
    throw config_error(
        "usage: algoevo <gen-ctm|bdm|evolve|batch|sequence|chase|evonet|"
        "analyze> key=value ... | algoevo manifest=<path>");
  Invocation inv;
  std::size_t start = 0;
  if (args[0].rfind("manifest=", 0) == 0) {
    const std::string path = args[0].substr(9);
    std::ifstream is(path);
    if (!is) throw data_error("cannot open manifest: " + path);
    json m;
    try {
      m = json::parse(is);
    } catch (const std::exception& e) {
      throw data_error("bad manifest json: " + std::string(e.what()));
    }
    if (!m.contains("command") || !m.contains("config"))
      throw data_error("manifest missing command/config");
    inv.command = m["command"].get<std::string>();
    for (const auto& kv : m["config"].items())
      inv.params.set(kv.key(), kv.value().get<std::string>());
    start = 1;
  } else {
    inv.command = args[0];
    start = 1;
  }
  std::set<std::string> overridden;
  std::optional<std::string> config_path;
  for (std::size_t i = start; i < args.size(); ++i) {
    std::string t = args[i];
    if (t.rfind("--", 0) == 0) t = t.substr(2);
    if (t.rfind("config=", 0) == 0) {
      config_path = t.substr(7);
      continue;
    }
    apply_token(inv.params, args[i]);
    const auto eq = t.find('=');
    overridden.insert(t.substr(0, eq));
  }
  if (config_path) load_config_file(inv.params, *config_path, overridden);
  return inv;
}

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  OutputSet outputs;
  try {
    Invocation inv = parse_invocation(args);
    if (inv.command == "gen-ctm")
      cmd_gen_ctm(inv.params, outputs);
    else if (inv.command == "bdm")
      cmd_bdm(inv.params, outputs, out);
    else if (inv.command == "evolve")
      cmd_evolve(inv.params, outputs);
    else if (inv.command == "batch")
      cmd_batch(inv.params, outputs);
    else if (inv.command == "sequence")
      cmd_sequence(inv.params, outputs);
    else if (inv.command == "chase")
      cmd_chase(inv.params, outputs);
    else if (inv.command == "evonet")
      cmd_evonet(inv.params, outputs);
    else if (inv.command == "analyze")
      cmd_analyze(inv.params, outputs, out);
    else
      throw config_error("unknown command `" + inv.command + "`");
    return kOk;
  } catch (const config_error& e) {
    outputs.remove_all();
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const resource_limit_error& e) {
    outputs.remove_all();
    err << "resource limit: " << e.what() << '\n';
    return kResourceLimit;
  } catch (const std::invalid_argument& e) {
    outputs.remove_all();
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    outputs.remove_all();
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    outputs.remove_all();
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace algoevo::cli

#endif  // ALGOEVO_CLI_HPP
