#ifndef ALGOEVO_EVOLVE_HPP
#define ALGOEVO_EVOLVE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "algoevo/bdm.hpp"
#include "algoevo/binary_matrix.hpp"
#include "algoevo/ctm.hpp"
#include "algoevo/errors.hpp"
#include "algoevo/rng.hpp"

namespace algoevo {

// ---------------------------------------------------------------------------
// Strategies and configuration
// ---------------------------------------------------------------------------

enum class StrategyKind {
  uniform,
  bdm,
  local_bdm,
  entropy_linear,
  entropy_exp,
  block_entropy_linear,
  block_entropy_exp,
};

inline const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::uniform: return "uniform";
    case StrategyKind::bdm: return "bdm";
    case StrategyKind::local_bdm: return "local_bdm";
    case StrategyKind::entropy_linear: return "entropy_linear";
    case StrategyKind::entropy_exp: return "entropy_exp";
    case StrategyKind::block_entropy_linear: return "block_entropy_linear";
    case StrategyKind::block_entropy_exp: return "block_entropy_exp";
  }
  return "?";
}

inline StrategyKind parse_strategy_kind(const std::string& name) {
  for (StrategyKind k :
       {StrategyKind::uniform, StrategyKind::bdm, StrategyKind::local_bdm,
        StrategyKind::entropy_linear, StrategyKind::entropy_exp,
        StrategyKind::block_entropy_linear, StrategyKind::block_entropy_exp})
    if (name == strategy_name(k)) return k;
  throw std::invalid_argument("unknown strategy: " + name);
}

struct Strategy {
  StrategyKind kind = StrategyKind::uniform;
  // Guard added to entropy denominators so zero-entropy candidates keep a
  // finite (maximal) weight.
  double epsilon = 1e-10;
  // Submatrix side for local_bdm and block side for the block-entropy kinds.
  int block_size = 4;
  // Decomposition block side used when scoring candidates by BDM. Kept
  // separate from block_size because desk-scale generated tables fully cover
  // 4-bit blocks (2x2) long before they cover 16-bit ones.
  int bdm_block_size = 4;

  bool needs_table() const {
    return kind == StrategyKind::bdm || kind == StrategyKind::local_bdm;
  }
};

struct EvolutionConfig {
  Strategy strategy;
  int shifts = 1;          // exact number of bit flips per mutation
  bool replacement = false;
  std::int64_t extinction_threshold = 2500;
  double convergence_alpha = 0.0;
  std::uint64_t seed = 0;

  void validate(int matrix_size) const {
    if (shifts < 1 || shifts > matrix_size * matrix_size)
      throw std::invalid_argument("shifts must be in [1, n^2]");
    if (extinction_threshold < 1)
      throw std::invalid_argument("extinction threshold must be >= 1");
    if (convergence_alpha < 0)
      throw std::invalid_argument("convergence alpha must be >= 0");
    if (strategy.epsilon <= 0)
      throw std::invalid_argument("strategy epsilon must be > 0");
    const bool uses_block =
        strategy.kind == StrategyKind::local_bdm ||
        strategy.kind == StrategyKind::block_entropy_linear ||
        strategy.kind == StrategyKind::block_entropy_exp;
    if (uses_block && matrix_size % strategy.block_size != 0)
      throw std::invalid_argument("block_size must divide the matrix size");
    if (strategy.needs_table() &&
        matrix_size % strategy.bdm_block_size != 0)
      throw std::invalid_argument("bdm_block_size must divide the matrix size");
  }
};

// ---------------------------------------------------------------------------
// Mutation neighborhood: all matrices at Hamming distance exactly k
// ---------------------------------------------------------------------------

inline std::uint64_t binomial_capped(int n, int k,
                                     std::uint64_t cap = ~0ull) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > cap) return cap;
  }
  return static_cast<std::uint64_t>(r);
}

// Candidates are identified by the sorted k-tuple of flat bit positions they
// flip, ordered lexicographically; `rank` is the index in that order.
class Neighborhood {
 public:
  Neighborhood(int matrix_size, int k)
      : n_bits_(matrix_size * matrix_size), k_(k) {
    if (k < 1 || k > n_bits_)
      throw std::invalid_argument("shift count out of range");
    size_ = binomial_capped(n_bits_, k_);
  }

  std::uint64_t size() const { return size_; }
  int shifts() const { return k_; }
  int bits() const { return n_bits_; }

  std::vector<int> flips(std::uint64_t rank) const {
    if (rank >= size_) throw std::out_of_range("candidate rank");
    std::vector<int> out;
    out.reserve(k_);
    int v = 0;
    for (int slot = k_; slot >= 1; --slot) {
      for (;; ++v) {
        const std::uint64_t with_v = binomial_capped(n_bits_ - 1 - v, slot - 1);
        if (rank < with_v) {
          out.push_back(v++);
          break;
        }
        rank -= with_v;
      }
    }
    return out;
  }

  std::uint64_t rank(std::span<const int> flips) const {
    std::uint64_t r = 0;
    int prev = -1;
    for (int slot = 0; slot < k_; ++slot) {
      const int p = flips[slot];
      for (int v = prev + 1; v < p; ++v)
        r += binomial_capped(n_bits_ - 1 - v, k_ - slot - 1);
      prev = p;
    }
    return r;
  }

 private:
  int n_bits_;
  int k_;
  std::uint64_t size_;
};

// ---------------------------------------------------------------------------
// Weighted sampling without replacement (Fenwick tree over weights)
// ---------------------------------------------------------------------------

namespace detail {

class FenwickSampler {
 public:
  explicit FenwickSampler(std::vector<double> weights)
      : weights_(std::move(weights)), tree_(weights_.size() + 1, 0.0) {
    const std::size_t n = weights_.size();
    for (std::size_t i = 1; i <= n; ++i) {
      tree_[i] += weights_[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n) tree_[parent] += tree_[i];
    }
    for (double w : weights_)
      if (w > 0.0) ++remaining_;
    highbit_ = 1;
    while ((highbit_ << 1) <= n) highbit_ <<= 1;
  }

  std::size_t size() const { return weights_.size(); }
  std::size_t remaining() const { return remaining_; }
  double weight(std::size_t i) const { return weights_[i]; }

  double total() const {
    double t = 0.0;
    for (std::size_t i = weights_.size(); i > 0; i -= i & (~i + 1))
      t += tree_[i];
    return t;
  }

  // Index of the candidate containing `point` in the cumulative weight line.
  std::size_t locate(double point) const {
    std::size_t pos = 0;
    for (std::size_t step = highbit_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= weights_.size() && tree_[next] <= point) {
        point -= tree_[next];
        pos = next;
      }
    }
    // pos items lie wholly at or below `point`; the hit is the next one.
    std::size_t idx = pos;
    while (idx < weights_.size() && weights_[idx] == 0.0) ++idx;
    if (idx >= weights_.size()) {
      // Rounding pushed the point past the last positive weight.
      idx = weights_.size();
      while (idx > 0 && weights_[idx - 1] == 0.0) --idx;
      if (idx == 0) throw std::logic_error("draw from empty pool");
      --idx;
    }
    return idx;
  }

  void remove(std::size_t i) {
    add(i, -weights_[i]);
    weights_[i] = 0.0;
    --remaining_;
  }

 private:
  void add(std::size_t i, double delta) {
    for (std::size_t j = i + 1; j <= weights_.size(); j += j & (~j + 1))
      tree_[j] += delta;
  }

  std::vector<double> weights_;
  std::vector<double> tree_;
  std::size_t remaining_ = 0;
  std::size_t highbit_ = 1;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Candidate distributions
// ---------------------------------------------------------------------------

// Probability assignment over the mutation neighborhood of one matrix,
// together with the draw state for an evolution instance. Weights per kind:
//   uniform              1
//   bdm                  2^(-BDM(candidate))
//   entropy_linear       1 / (h(candidate) + epsilon)
//   entropy_exp          2^(-h(candidate))
//   block_entropy_*      as above with block entropy
//   local_bdm            per draw: uniform submatrix choice, then BDM weights
//                        over the candidates confined to that submatrix
// Weight normalization is implicit: draw probabilities are weights divided
// by the current total, so removals renormalize automatically.
class CandidateDistribution {
 public:
  static constexpr std::uint64_t kMaterializeBudget = 1ull << 22;

  CandidateDistribution(const BinaryMatrix& current,
                        const EvolutionConfig& cfg, const CtmTable* table)
      : neighborhood_(current.size(), cfg.shifts),
        cfg_(cfg),
        size_(neighborhood_.size()) {
    cfg.validate(current.size());
    const Strategy& st = cfg.strategy;
    if (st.needs_table() && table == nullptr)
      throw std::invalid_argument("strategy requires a ctm table");

    if (st.kind == StrategyKind::uniform && size_ > kMaterializeBudget) {
      // Too large to materialize; uniform draws do not need weights.
      sparse_uniform_ = true;
      if (!cfg.replacement &&
          size_ < static_cast<std::uint64_t>(cfg.extinction_threshold) * 4)
        throw resource_limit_error(
            "uniform pool too large to materialize but too small to sample "
            "without replacement by rejection");
      return;
    }
    if (size_ > kMaterializeBudget)
      throw resource_limit_error(
          "weighted strategies need the full candidate pool in memory; "
          "pool of " + std::to_string(size_) + " exceeds budget");

    std::vector<double> weights(static_cast<std::size_t>(size_), 1.0);
    switch (st.kind) {
      case StrategyKind::uniform:
        break;
      case StrategyKind::bdm:
      case StrategyKind::local_bdm: {
        BdmContext ctx(current, *table, st.bdm_block_size);
        fill_exp2_weights(weights, [&](std::span<const int> flips) {
          return ctx.bdm_with_flips(flips);
        });
        break;
      }
      case StrategyKind::entropy_linear:
      case StrategyKind::entropy_exp: {
        const int ones = current.ones();
        const int bits = current.bit_count();
        auto h = [&](std::span<const int> flips) {
          int delta = 0;
          for (int f : flips) delta += current.get_flat(f) ? -1 : 1;
          return entropy_of_counts(ones + delta, bits);
        };
        if (st.kind == StrategyKind::entropy_linear)
          fill_weights(weights,
                       [&](auto f) { return 1.0 / (h(f) + st.epsilon); });
        else
          fill_weights(weights, [&](auto f) { return std::exp2(-h(f)); });
        break;
      }
      case StrategyKind::block_entropy_linear:
      case StrategyKind::block_entropy_exp: {
        BlockEntropyContext ctx(current, st.block_size);
        auto h = [&](std::span<const int> flips) {
          return ctx.entropy_with_flips(flips);
        };
        if (st.kind == StrategyKind::block_entropy_linear)
          fill_weights(weights,
                       [&](auto f) { return 1.0 / (h(f) + st.epsilon); });
        else
          fill_weights(weights, [&](auto f) { return std::exp2(-h(f)); });
        break;
      }
    }

    if (st.kind == StrategyKind::local_bdm) {
      const int n = current.size();
      const int side = n / st.block_size;
      submatrix_of_.assign(static_cast<std::size_t>(size_), -1);
      std::vector<std::vector<std::uint64_t>> members(
          static_cast<std::size_t>(side) * side);
      for (std::uint64_t r = 0; r < size_; ++r) {
        const auto flips = neighborhood_.flips(r);
        int sub = -1;
        bool confined = true;
        for (int f : flips) {
          const int s =
              (f / n / st.block_size) * side + (f % n) / st.block_size;
          if (sub == -1) sub = s;
          else if (sub != s) confined = false;
        }
        if (confined) {
          submatrix_of_[r] = sub;
          members[sub].push_back(r);
        }
      }
      for (auto& m : members) {
        std::vector<double> w;
        w.reserve(m.size());
        for (auto r : m) w.push_back(weights[r]);
        local_pools_.emplace_back(std::move(w));
        local_members_.push_back(std::move(m));
      }
      drawable_ = 0;
      for (const auto& p : local_pools_) drawable_ += p.remaining();
    } else {
      sampler_.emplace(std::move(weights));
      drawable_ = sampler_->remaining();
    }
  }

  const Neighborhood& neighborhood() const { return neighborhood_; }

  // Candidates that can ever be drawn. Equals the neighborhood size except
  // under local_bdm with k >= 2, where flips may not span submatrices.
  std::uint64_t pool_size() const {
    return sparse_uniform_ ? size_ : drawable_ + drawn_count_;
  }
  std::uint64_t remaining() const {
    return sparse_uniform_ ? size_ - drawn_count_ : drawable_;
  }
  bool exhausted() const { return remaining() == 0; }

  struct Draw {
    std::uint64_t rank = 0;
    std::vector<int> flips;
  };

  // Samples one candidate according to the current weights; without
  // replacement the candidate leaves the pool and the rest renormalize.
  Draw draw(Rng& rng) {
    if (exhausted()) throw std::logic_error("candidate pool exhausted");
    Draw d;
    if (sparse_uniform_) {
      for (;;) {
        std::vector<int> flips = sample_k_subset(rng);
        std::uint64_t rank = neighborhood_.rank(flips);
        if (!cfg_.replacement && !drawn_ranks_.insert(rank).second) continue;
        d.rank = rank;
        d.flips = std::move(flips);
        break;
      }
      if (!cfg_.replacement) ++drawn_count_;
      return d;
    }
    std::size_t idx = 0;
    int pool = -1;
    if (local_pools_.empty()) {
      idx = sampler_->locate(rng.u01() * sampler_->total());
    } else {
      for (;;) {
        pool = static_cast<int>(rng.bounded(local_pools_.size()));
        if (local_pools_[pool].remaining() > 0) break;
      }
      idx = local_pools_[pool].locate(rng.u01() *
                                      local_pools_[pool].total());
    }
    if (!cfg_.replacement) {
      if (pool >= 0)
        local_pools_[pool].remove(idx);
      else
        sampler_->remove(idx);
      --drawable_;
      ++drawn_count_;
    }
    d.rank = pool >= 0 ? local_members_[pool][idx]
                       : static_cast<std::uint64_t>(idx);
    d.flips = neighborhood_.flips(d.rank);
    return d;
  }

  // Current draw probability of a candidate (marginal over the submatrix
  // choice for local_bdm). Zero for removed or unreachable candidates.
  double probability(std::uint64_t rank) const {
    if (sparse_uniform_) {
      if (!cfg_.replacement && drawn_ranks_.count(rank)) return 0.0;
      return 1.0 / static_cast<double>(size_ - drawn_count_);
    }
    if (!local_pools_.empty()) {
      const int sub = submatrix_of_[rank];
      if (sub < 0) return 0.0;
      std::size_t active = 0;
      for (const auto& p : local_pools_)
        if (p.remaining() > 0) ++active;
      const auto& members = local_members_[sub];
      const std::size_t idx =
          std::lower_bound(members.begin(), members.end(), rank) -
          members.begin();
      const double t = local_pools_[sub].total();
      if (t <= 0.0 || active == 0) return 0.0;
      return local_pools_[sub].weight(idx) / t / static_cast<double>(active);
    }
    const double t = sampler_->total();
    return t > 0.0 ? sampler_->weight(rank) / t : 0.0;
  }

 private:
  template <typename Score>
  void fill_exp2_weights(std::vector<double>& weights, Score&& score) {
    std::vector<double> bits(weights.size());
    double lowest = std::numeric_limits<double>::infinity();
    for (std::uint64_t r = 0; r < size_; ++r) {
      const auto flips = neighborhood_.flips(r);
      bits[r] = score(std::span<const int>(flips));
      lowest = std::min(lowest, bits[r]);
    }
    // Shift by the minimum before exponentiating; the normalized
    // distribution is unchanged and the weights cannot underflow.
    for (std::uint64_t r = 0; r < size_; ++r)
      weights[r] = std::exp2(lowest - bits[r]);
  }

  template <typename Weight>
  void fill_weights(std::vector<double>& weights, Weight&& weight) {
    for (std::uint64_t r = 0; r < size_; ++r) {
      const auto flips = neighborhood_.flips(r);
      weights[r] = weight(std::span<const int>(flips));
    }
  }

  std::vector<int> sample_k_subset(Rng& rng) {
    // Floyd's algorithm over flat bit positions.
    const int n = neighborhood_.bits();
    const int k = neighborhood_.shifts();
    std::set<int> chosen;
    for (int j = n - k; j < n; ++j) {
      const int t = static_cast<int>(rng.bounded(j + 1));
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
  }

  Neighborhood neighborhood_;
  EvolutionConfig cfg_;
  std::uint64_t size_;

  std::optional<detail::FenwickSampler> sampler_;
  std::vector<detail::FenwickSampler> local_pools_;
  std::vector<std::vector<std::uint64_t>> local_members_;
  std::vector<int> submatrix_of_;

  bool sparse_uniform_ = false;
  std::set<std::uint64_t> drawn_ranks_;
  std::uint64_t drawn_count_ = 0;
  std::uint64_t drawable_ = 0;
};

inline CandidateDistribution build_distribution(const BinaryMatrix& m,
                                                const EvolutionConfig& cfg,
                                                const CtmTable* table) {
  return CandidateDistribution(m, cfg, table);
}

// ---------------------------------------------------------------------------
// Instances and runs
// ---------------------------------------------------------------------------

enum class InstanceOutcome { improved, converged, extinct };

struct InstanceResult {
  InstanceOutcome outcome = InstanceOutcome::extinct;
  std::optional<BinaryMatrix> matrix;  // set for improved / converged
  std::int64_t steps = 0;              // draws consumed, including the last
  int fitness_after = 0;               // Hamming distance after the instance
};

using DrawObserver = std::function<void(std::span<const int>)>;

// One draw-until-improvement episode. Draws candidates from the strategy
// distribution until one strictly improves the Hamming distance to the
// target (or reaches alpha: converged), the extinction threshold is hit, or
// the pool runs dry without replacement.
inline InstanceResult evolve_instance(const BinaryMatrix& m,
                                      const BinaryMatrix& target,
                                      const EvolutionConfig& cfg,
                                      const CtmTable* table, Rng& rng,
                                      const DrawObserver& observer = {}) {
  const int d0 = hamming(m, target);
  if (d0 <= cfg.convergence_alpha)
    throw std::invalid_argument(
        "instance precondition: fitness already at or below alpha");
  CandidateDistribution dist(m, cfg, table);
  InstanceResult res;
  res.fitness_after = d0;
  while (res.steps < cfg.extinction_threshold) {
    if (dist.exhausted()) {
      res.outcome = InstanceOutcome::extinct;
      return res;
    }
    auto d = dist.draw(rng);
    ++res.steps;
    if (observer) observer(std::span<const int>(d.flips));
    int nd = d0;
    for (int f : d.flips)
      nd += (m.get_flat(f) == target.get_flat(f)) ? 1 : -1;
    if (nd <= cfg.convergence_alpha || nd < d0) {
      BinaryMatrix next = m;
      for (int f : d.flips) next.flip_flat(f);
      res.outcome = nd <= cfg.convergence_alpha ? InstanceOutcome::converged
                                                : InstanceOutcome::improved;
      res.matrix = std::move(next);
      res.fitness_after = nd;
      return res;
    }
  }
  res.outcome = InstanceOutcome::extinct;
  return res;
}

enum class RunTerminal { converged, extinct };

struct TraceInstance {
  std::int64_t steps = 0;
  int fitness_after = 0;
  InstanceOutcome outcome = InstanceOutcome::improved;
};

struct EvolutionTrace {
  BinaryMatrix initial;
  BinaryMatrix target;
  std::vector<TraceInstance> instances;
  std::vector<BinaryMatrix> states;  // matrix after each improving instance
  RunTerminal terminal = RunTerminal::extinct;
  std::int64_t total_steps = 0;
  BinaryMatrix final_matrix;
};

// Chains instances, feeding each improved matrix forward, until convergence
// or extinction. Deterministic given cfg.seed.
inline EvolutionTrace evolve_run(const BinaryMatrix& m0,
                                 const BinaryMatrix& target,
                                 const EvolutionConfig& cfg,
                                 const CtmTable* table,
                                 const DrawObserver& observer = {}) {
  if (m0.size() != target.size())
    throw std::invalid_argument("initial and target sizes differ");
  Rng rng(cfg.seed);
  EvolutionTrace trace;
  trace.initial = m0;
  trace.target = target;
  BinaryMatrix current = m0;
  for (;;) {
    if (hamming(current, target) <= cfg.convergence_alpha) {
      trace.terminal = RunTerminal::converged;
      break;
    }
    InstanceResult inst =
        evolve_instance(current, target, cfg, table, rng, observer);
    trace.total_steps += inst.steps;
    trace.instances.push_back(
        {inst.steps, inst.fitness_after, inst.outcome});
    if (inst.outcome == InstanceOutcome::extinct) {
      trace.terminal = RunTerminal::extinct;
      break;
    }
    current = *inst.matrix;
    trace.states.push_back(current);
    if (inst.outcome == InstanceOutcome::converged) {
      trace.terminal = RunTerminal::converged;
      break;
    }
  }
  trace.final_matrix = current;
  return trace;
}

// ---------------------------------------------------------------------------
// Persistent structures
// ---------------------------------------------------------------------------

struct PersistentStructureReport {
  std::string block_bits;                    // block value, row-major
  std::vector<std::pair<int, int>> positions;  // (block row, block col)
  double support = 0.0;                      // highest per-position support
  std::optional<double> gamma_estimate;      // -log2(1 - support), support<1
  bool low_complexity = false;               // ctm below the table median
};

// Scans a set of drawn candidate matrices for block values that recur at a
// fixed block position in at least `support_threshold` of them.
inline std::vector<PersistentStructureReport> detect_persistent_structures(
    const std::vector<BinaryMatrix>& drawn, const CtmTable& table,
    double support_threshold, int block_size = 4) {
  if (drawn.empty()) throw std::invalid_argument("empty drawn set");
  const int n = drawn.front().size();
  if (n % block_size != 0)
    throw std::invalid_argument("block size must divide the matrix size");
  const int side = n / block_size;
  const double total = static_cast<double>(drawn.size());

  std::map<std::string, PersistentStructureReport> by_value;
  for (int br = 0; br < side; ++br)
    for (int bc = 0; bc < side; ++bc) {
      std::map<std::string, int> counts;
      for (const auto& m : drawn) {
        std::string bits(static_cast<std::size_t>(block_size) * block_size,
                         '0');
        for (int r = 0; r < block_size; ++r)
          for (int c = 0; c < block_size; ++c)
            if (m.get(br * block_size + r, bc * block_size + c))
              bits[r * block_size + c] = '1';
        counts[bits] += 1;
      }
      for (const auto& kv : counts) {
        const double support = kv.second / total;
        if (support < support_threshold) continue;
        auto& rep = by_value[kv.first];
        rep.block_bits = kv.first;
        rep.positions.emplace_back(br, bc);
        rep.support = std::max(rep.support, support);
      }
    }

  std::vector<PersistentStructureReport> out;
  out.reserve(by_value.size());
  for (auto& kv : by_value) {
    auto& rep = kv.second;
    if (rep.support < 1.0) rep.gamma_estimate = -std::log2(1.0 - rep.support);
    rep.low_complexity = table.lookup(rep.block_bits) < table.median_bits();
    out.push_back(std::move(rep));
  }
  std::sort(out.begin(), out.end(),
            [](const PersistentStructureReport& a,
               const PersistentStructureReport& b) {
              if (a.support != b.support) return a.support > b.support;
              return a.block_bits < b.block_bits;
            });
  return out;
}

}  // namespace algoevo

#endif  // ALGOEVO_EVOLVE_HPP
