#ifndef ALGOEVO_EXPERIMENTS_HPP
#define ALGOEVO_EXPERIMENTS_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "algoevo/bdm.hpp"
#include "algoevo/binary_matrix.hpp"
#include "algoevo/ctm.hpp"
#include "algoevo/errors.hpp"
#include "algoevo/evolve.hpp"
#include "algoevo/graphs.hpp"
#include "algoevo/rng.hpp"
#include "algoevo/stats.hpp"

namespace algoevo {

// Seed-derivation tags; every stream the harness uses is
// mix_seed(master, {tag, coordinates...}).
inline constexpr std::uint64_t kSeedTagInit = 0x696e6974;    // initial matrices
inline constexpr std::uint64_t kSeedTagRun = 0x72756e;       // evolution runs
inline constexpr std::uint64_t kSeedTagChase = 0x6368617365;
inline constexpr std::uint64_t kSeedTagTarget = 0x74676574;  // random targets

// Numeric formatting for the CSV surfaces: >= 12 significant digits,
// NaN spelled literally.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Batch runner
// ---------------------------------------------------------------------------

struct RunOutcome {
  bool converged = false;
  std::int64_t total_steps = 0;
};

// Extinct replicates never contribute to the mean; a fully extinct arm
// reports NaN.
struct SummaryStats {
  int n_converged = 0;
  int n_extinct = 0;
  double mean_steps = std::numeric_limits<double>::quiet_NaN();
  double se_steps = std::numeric_limits<double>::quiet_NaN();

  static SummaryStats from_runs(const std::vector<RunOutcome>& runs) {
    SummaryStats s;
    std::vector<double> steps;
    for (const auto& r : runs) {
      if (r.converged) {
        ++s.n_converged;
        steps.push_back(static_cast<double>(r.total_steps));
      } else {
        ++s.n_extinct;
      }
    }
    if (!steps.empty()) {
      s.mean_steps = mean_of(steps);
      s.se_steps = se_of(steps);
    }
    return s;
  }
};

struct ArmSpec {
  std::string name;
  EvolutionConfig cfg;  // cfg.seed is ignored; replicate seeds are derived
};

struct ExperimentSpec {
  std::vector<BinaryMatrix> targets;
  std::vector<std::string> target_ids;  // parallel to targets
  int replicates = 100;
  std::vector<ArmSpec> arms;
  std::uint64_t master_seed = 1;
  int threads = 0;             // 0 = hardware concurrency
  int report_block_size = 4;   // block size for the target_bdm column
};

struct CellResult {
  SummaryStats stats;
  std::vector<RunOutcome> runs;  // by replicate index
};

struct BatchResult {
  std::vector<std::vector<CellResult>> cells;  // [target][arm]
  std::vector<double> target_bdm;              // NaN when no table given
};

// Paired design: replicate i of target j starts from the same initial
// matrix in every arm (seed mix(master, {init, j, i})), while the evolution
// stream is mix(master, {run, j, i, arm}). Replicates fan out over a worker
// pool and land in slots indexed by replicate, so any schedule produces the
// same result.
inline BatchResult run_batch(const ExperimentSpec& spec,
                             const CtmTable* table) {
  if (spec.targets.empty()) throw std::invalid_argument("no targets");
  if (spec.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (spec.arms.empty()) throw std::invalid_argument("no strategy arms");
  if (!spec.target_ids.empty() && spec.target_ids.size() != spec.targets.size())
    throw std::invalid_argument("target_ids do not match targets");
  const int size = spec.targets.front().size();
  for (const auto& t : spec.targets)
    if (t.size() != size)
      throw std::invalid_argument("all targets must share one size");
  for (const auto& arm : spec.arms) {
    arm.cfg.validate(size);
    if (arm.cfg.strategy.needs_table() && table == nullptr)
      throw std::invalid_argument("arm `" + arm.name +
                                  "` requires a ctm table");
  }

  const std::size_t n_targets = spec.targets.size();
  const std::size_t n_arms = spec.arms.size();
  const std::size_t n_reps = static_cast<std::size_t>(spec.replicates);

  BatchResult result;
  result.cells.assign(n_targets, std::vector<CellResult>(n_arms));
  for (auto& row : result.cells)
    for (auto& cell : row) cell.runs.resize(n_reps);

  const std::size_t total_tasks = n_targets * n_arms * n_reps;
  std::atomic<std::size_t> cursor{0};
  int threads = spec.threads > 0
                    ? spec.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = cursor.fetch_add(1);
      if (task >= total_tasks) return;
      const std::size_t j = task / (n_arms * n_reps);
      const std::size_t a = (task / n_reps) % n_arms;
      const std::size_t i = task % n_reps;
      Rng init_rng(mix_seed(spec.master_seed, {kSeedTagInit, j, i}));
      const BinaryMatrix m0 = BinaryMatrix::random(init_rng, size);
      EvolutionConfig cfg = spec.arms[a].cfg;
      cfg.seed = mix_seed(spec.master_seed, {kSeedTagRun, j, i, a});
      const EvolutionTrace trace =
          evolve_run(m0, spec.targets[j], cfg, table);
      result.cells[j][a].runs[i] = {trace.terminal == RunTerminal::converged,
                                    trace.total_steps};
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& row : result.cells)
    for (auto& cell : row) cell.stats = SummaryStats::from_runs(cell.runs);
  result.target_bdm.reserve(n_targets);
  for (const auto& t : spec.targets)
    result.target_bdm.push_back(
        table ? bdm(t, *table, spec.report_block_size)
              : std::numeric_limits<double>::quiet_NaN());
  return result;
}

// ---------------------------------------------------------------------------
// Speed-up
// ---------------------------------------------------------------------------

// delta = S_u / S_f: how many times faster the f strategy converges than
// uniform. Defined only when both arms have converged runs.
inline double speedup_quotient(const SummaryStats& uniform_arm,
                               const SummaryStats& f_arm) {
  if (std::isnan(uniform_arm.mean_steps) || std::isnan(f_arm.mean_steps))
    throw std::invalid_argument(
        "speed-up undefined: an arm has no converged runs");
  return uniform_arm.mean_steps / f_arm.mean_steps;
}

struct SpeedUpRow {
  std::string target_id;
  double target_bdm = 0.0;
  SummaryStats uniform_stats;
  SummaryStats f_stats;
  double delta = std::numeric_limits<double>::quiet_NaN();
  int extinction_diff = 0;  // E_u - E_f
};

struct SpeedUpReport {
  std::vector<SpeedUpRow> rows;
  // Least-squares cubic of delta over target BDM; advisory only, and absent
  // when fewer than 4 rows have a defined delta.
  std::optional<std::vector<double>> fit;
};

// One row per target of an ordered target sequence, uniform arm vs f arm.
inline SpeedUpReport speedup_curve(const ExperimentSpec& spec,
                                   const CtmTable* table) {
  if (spec.arms.size() != 2)
    throw std::invalid_argument("speedup_curve expects exactly two arms");
  const BatchResult batch = run_batch(spec, table);
  SpeedUpReport report;
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < spec.targets.size(); ++j) {
    SpeedUpRow row;
    row.target_id = spec.target_ids.empty() ? std::to_string(j)
                                            : spec.target_ids[j];
    row.target_bdm = batch.target_bdm[j];
    row.uniform_stats = batch.cells[j][0].stats;
    row.f_stats = batch.cells[j][1].stats;
    if (!std::isnan(row.uniform_stats.mean_steps) &&
        !std::isnan(row.f_stats.mean_steps)) {
      row.delta = speedup_quotient(row.uniform_stats, row.f_stats);
      xs.push_back(row.target_bdm);
      ys.push_back(row.delta);
    }
    row.extinction_diff =
        row.uniform_stats.n_extinct - row.f_stats.n_extinct;
    report.rows.push_back(std::move(row));
  }
  if (xs.size() >= 4) report.fit = polyfit(xs, ys, 3);
  return report;
}

// ---------------------------------------------------------------------------
// Dynamic-network chasing
// ---------------------------------------------------------------------------

struct ChaseStageStats {
  double mean_cumulative = std::numeric_limits<double>::quiet_NaN();
  double se_cumulative = std::numeric_limits<double>::quiet_NaN();
  int n_alive = 0;
};

struct ChaseResult {
  std::vector<std::string> arm_names;
  // [arm][stage]: cumulative steps to reach that stage, averaged over the
  // replicates still alive (not extinct).
  std::vector<std::vector<ChaseStageStats>> stages;
};

// Follows a moving target: each replicate starts from a random matrix,
// evolves to stage 0, then from each stage's matrix to the next stage.
// With seed_stage0_directly the random start is replaced by stage 0 itself
// and the first leg is skipped.
inline ChaseResult chase_dynamic(const DynamicSequence& seq, int replicates,
                                 const std::vector<ArmSpec>& arms,
                                 const CtmTable* table,
                                 std::uint64_t master_seed, int threads = 0,
                                 bool seed_stage0_directly = false) {
  if (seq.stages.size() < 2)
    throw std::invalid_argument("chase needs at least 2 stages");
  for (std::size_t i = 0; i + 1 < seq.stages.size(); ++i)
    for (std::size_t j = i + 1; j < seq.stages.size(); ++j)
      if (seq.stages[i] == seq.stages[j])
        throw std::invalid_argument("chase stages must be pairwise distinct");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  const int size = seq.stages.front().size();
  for (const auto& arm : arms) {
    arm.cfg.validate(size);
    if (arm.cfg.strategy.needs_table() && table == nullptr)
      throw std::invalid_argument("arm `" + arm.name +
                                  "` requires a ctm table");
  }

  const std::size_t n_arms = arms.size();
  const std::size_t n_stages = seq.stages.size();
  const std::size_t n_reps = static_cast<std::size_t>(replicates);
  // cumulative[arm][rep][stage]; < 0 marks extinct-from-here-on.
  std::vector<std::vector<std::vector<double>>> cumulative(
      n_arms, std::vector<std::vector<double>>(
                  n_reps, std::vector<double>(n_stages, -1.0)));

  std::atomic<std::size_t> cursor{0};
  const std::size_t total_tasks = n_arms * n_reps;
  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  auto worker = [&] {
    for (;;) {
      const std::size_t task = cursor.fetch_add(1);
      if (task >= total_tasks) return;
      const std::size_t a = task / n_reps;
      const std::size_t r = task % n_reps;
      Rng init_rng(mix_seed(master_seed, {kSeedTagChase, kSeedTagInit, r}));
      BinaryMatrix current =
          seed_stage0_directly ? seq.stages[0]
                               : BinaryMatrix::random(init_rng, size);
      std::int64_t acc = 0;
      bool alive = true;
      for (std::size_t s = 0; s < n_stages && alive; ++s) {
        if (s == 0 && seed_stage0_directly) {
          cumulative[a][r][0] = 0.0;
          continue;
        }
        const BinaryMatrix& target = seq.stages[s];
        if (current != target) {
          EvolutionConfig cfg = arms[a].cfg;
          cfg.seed = mix_seed(master_seed, {kSeedTagChase, r, s, a});
          const EvolutionTrace trace =
              evolve_run(current, target, cfg, table);
          acc += trace.total_steps;
          if (trace.terminal != RunTerminal::converged) {
            alive = false;
            break;
          }
          current = trace.final_matrix;
        }
        cumulative[a][r][s] = static_cast<double>(acc);
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ChaseResult result;
  for (const auto& arm : arms) result.arm_names.push_back(arm.name);
  result.stages.assign(n_arms, std::vector<ChaseStageStats>(n_stages));
  for (std::size_t a = 0; a < n_arms; ++a)
    for (std::size_t s = 0; s < n_stages; ++s) {
      std::vector<double> alive;
      for (std::size_t r = 0; r < n_reps; ++r)
        if (cumulative[a][r][s] >= 0.0) alive.push_back(cumulative[a][r][s]);
      auto& cell = result.stages[a][s];
      cell.n_alive = static_cast<int>(alive.size());
      if (!alive.empty()) {
        cell.mean_cumulative = mean_of(alive);
        cell.se_cumulative = se_of(alive);
      }
    }
  return result;
}

// ---------------------------------------------------------------------------
// Evolutionary networks
// ---------------------------------------------------------------------------

struct EvoNetNode {
  std::uint64_t hash = 0;
  int fitness = 0;    // Hamming distance to the shared target
  double bdm = std::numeric_limits<double>::quiet_NaN();
};

struct EvoNetEdge {
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  std::int64_t count = 0;
};

struct EvolutionaryNetwork {
  int min_count = 2;
  std::map<std::string, EvoNetNode> nodes;  // key: bitstring
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::int64_t> edges;
  // Forward mutations: the observed improving transitions into the target,
  // as count / (total arrivals at the target).
  std::vector<EvoNetEdge> forward_in_edges;
  std::vector<double> forward_probabilities;

  // Edges used more than min_count - 1 times; the full multiset stays in
  // `edges`.
  std::vector<EvoNetEdge> exported_edges() const {
    std::vector<EvoNetEdge> out;
    for (const auto& kv : edges)
      if (kv.second >= min_count)
        out.push_back({kv.first.first, kv.first.second, kv.second});
    return out;
  }
};

// Aggregates the improving transitions of many traces over one shared
// target into a weighted directed network.
inline EvolutionaryNetwork build_evolutionary_network(
    const std::vector<EvolutionTrace>& traces, const CtmTable* table,
    int min_count = 2, int bdm_block_size = 4) {
  if (traces.empty()) throw std::invalid_argument("no traces");
  const BinaryMatrix& target = traces.front().target;
  for (const auto& t : traces)
    if (t.target != target)
      throw std::invalid_argument("traces must share a target");

  EvolutionaryNetwork net;
  net.min_count = min_count;
  auto touch = [&](const BinaryMatrix& m) {
    const std::string key = m.to_bitstring();
    auto it = net.nodes.find(key);
    if (it == net.nodes.end()) {
      EvoNetNode node;
      node.hash = m.fingerprint();
      node.fitness = hamming(m, target);
      if (table) node.bdm = bdm(m, *table, bdm_block_size);
      it = net.nodes.emplace(key, node).first;
    }
    return it->second.hash;
  };
  const std::uint64_t target_hash = target.fingerprint();
  for (const auto& trace : traces) {
    std::uint64_t prev = touch(trace.initial);
    for (const auto& state : trace.states) {
      const std::uint64_t cur = touch(state);
      net.edges[{prev, cur}] += 1;
      prev = cur;
    }
  }
  std::int64_t arrivals = 0;
  for (const auto& kv : net.edges)
    if (kv.first.second == target_hash) arrivals += kv.second;
  for (const auto& kv : net.edges)
    if (kv.first.second == target_hash) {
      net.forward_in_edges.push_back(
          {kv.first.first, kv.first.second, kv.second});
      net.forward_probabilities.push_back(
          static_cast<double>(kv.second) / static_cast<double>(arrivals));
    }
  return net;
}

// ---------------------------------------------------------------------------
// CSV surfaces
// ---------------------------------------------------------------------------

// target_id,target_bdm,strategy,shifts,replacement,replicates,n_converged,
// n_extinct,mean_steps,se_steps
inline std::string results_csv(const ExperimentSpec& spec,
                               const BatchResult& batch) {
  std::string out =
      "target_id,target_bdm,strategy,shifts,replacement,replicates,"
      "n_converged,n_extinct,mean_steps,se_steps\n";
  for (std::size_t j = 0; j < spec.targets.size(); ++j) {
    const std::string tid =
        spec.target_ids.empty() ? std::to_string(j) : spec.target_ids[j];
    for (std::size_t a = 0; a < spec.arms.size(); ++a) {
      const auto& stats = batch.cells[j][a].stats;
      const auto& cfg = spec.arms[a].cfg;
      out += tid + ',' + format_number(batch.target_bdm[j]) + ',' +
             spec.arms[a].name + ',' + std::to_string(cfg.shifts) + ',' +
             (cfg.replacement ? "1" : "0") + ',' +
             std::to_string(spec.replicates) + ',' +
             std::to_string(stats.n_converged) + ',' +
             std::to_string(stats.n_extinct) + ',' +
             format_number(stats.mean_steps) + ',' +
             format_number(stats.se_steps) + '\n';
    }
  }
  return out;
}

// stage_or_target,strategy,cumulative_or_delta,value
inline std::string speedup_curve_csv(const SpeedUpReport& report,
                                     const std::string& f_arm_name) {
  std::string out = "stage_or_target,strategy,cumulative_or_delta,value\n";
  for (const auto& row : report.rows) {
    out += row.target_id + ",target,target_bdm," +
           format_number(row.target_bdm) + '\n';
    out += row.target_id + ',' + f_arm_name + ",delta," +
           format_number(row.delta) + '\n';
    out += row.target_id + ',' + f_arm_name + ",extinction_diff," +
           format_number(row.extinction_diff) + '\n';
  }
  if (report.fit)
    for (std::size_t i = 0; i < report.fit->size(); ++i)
      out += std::to_string(i) + ',' + f_arm_name + ",fit_coeff," +
             format_number((*report.fit)[i]) + '\n';
  return out;
}

inline std::string chase_curve_csv(const ChaseResult& chase) {
  std::string out = "stage_or_target,strategy,cumulative_or_delta,value\n";
  for (std::size_t a = 0; a < chase.arm_names.size(); ++a)
    for (std::size_t s = 0; s < chase.stages[a].size(); ++s) {
      const auto& cell = chase.stages[a][s];
      out += std::to_string(s) + ',' + chase.arm_names[a] + ",cumulative," +
             format_number(cell.mean_cumulative) + '\n';
      out += std::to_string(s) + ',' + chase.arm_names[a] +
             ",cumulative_se," + format_number(cell.se_cumulative) + '\n';
      out += std::to_string(s) + ',' + chase.arm_names[a] + ",n_alive," +
             format_number(cell.n_alive) + '\n';
    }
  return out;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline std::string evonet_edges_csv(const EvolutionaryNetwork& net) {
  std::string out = "from_hash,to_hash,count\n";
  for (const auto& e : net.exported_edges())
    out += hash_hex(e.from) + ',' + hash_hex(e.to) + ',' +
           std::to_string(e.count) + '\n';
  return out;
}

inline std::string evonet_nodes_csv(const EvolutionaryNetwork& net) {
  std::string out = "hash,fitness,bdm\n";
  for (const auto& kv : net.nodes)
    out += hash_hex(kv.second.hash) + ',' + std::to_string(kv.second.fitness) +
           ',' + format_number(kv.second.bdm) + '\n';
  return out;
}

inline std::string evonet_forward_csv(const EvolutionaryNetwork& net) {
  std::string out = "from_hash,to_hash,probability\n";
  for (std::size_t i = 0; i < net.forward_in_edges.size(); ++i)
    out += hash_hex(net.forward_in_edges[i].from) + ',' +
           hash_hex(net.forward_in_edges[i].to) + ',' +
           format_number(net.forward_probabilities[i]) + '\n';
  return out;
}

}  // namespace algoevo

#endif  // ALGOEVO_EXPERIMENTS_HPP
