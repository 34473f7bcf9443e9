#ifndef ALGOEVO_CTM_HPP
#define ALGOEVO_CTM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "algoevo/errors.hpp"
#include "algoevo/turing_machine.hpp"

namespace algoevo {

inline std::string complement_bits(const std::string& s) {
  std::string c = s;
  for (auto& ch : c) ch = (ch == '0') ? '1' : '0';
  return c;
}

// Coding-theorem lookup table: complexity in bits per binary output string,
// estimated as -log2 of the string's frequency over an exhaustive run of
// all (4n+2)^(2n) n-state machines.
//
// Counting is symmetrized over the 0<->1 symbol swap: each halting machine
// contributes its output and the output's complement. Swapping read and
// write symbols in every rule is an involution of the rule space that turns
// the blank-1 run of a machine into the complemented blank-0 run, so this
// equals enumerating under both blank conventions and makes
// ctm(s) == ctm(complement(s)) hold exactly.
class CtmTable {
 public:
  struct Meta {
    int states = 0;
    int step_cap = 0;
    std::uint64_t halting = 0;  // total output mass (symmetrized count)
    std::uint64_t total_enumerated = 0;
    std::string source = "generated";
  };

  CtmTable() = default;

  CtmTable(std::map<std::string, double> entries, Meta meta)
      : entries_(std::move(entries)), meta_(std::move(meta)) {
    finalize();
  }

  const std::map<std::string, double>& entries() const { return entries_; }
  const Meta& meta() const { return meta_; }
  bool empty() const { return entries_.empty(); }

  // Largest block the table accepts for lookup. Missing blocks up to this
  // length fall back to max_bits() + 1; longer blocks are an error. The
  // floor of 16 bits keeps 4x4 matrix blocks queryable against desk-scale
  // tables whose enumerated outputs are all shorter.
  std::size_t max_block_bits() const { return max_block_bits_; }

  double max_bits() const { return max_bits_; }
  double median_bits() const { return median_bits_; }

  // Exact stored value when present, otherwise the documented fallback of
  // max_bits() + 1 (missing means rarer than everything observed).
  double lookup(const std::string& block) const {
    if (block.size() > max_block_bits_)
      throw std::invalid_argument("block longer than supported size");
    auto it = entries_.find(block);
    return it != entries_.end() ? it->second : max_bits_ + 1.0;
  }

  bool contains(const std::string& block) const {
    return entries_.count(block) != 0;
  }

  // --- text format -------------------------------------------------------
  // Header: ctm v1 states=<n> cap=<steps> halting=<N> total=<M> source=<tag>
  // Body:   <bitstring>\t<ctm_bits>          (sorted by length, then lex)

  void save(std::ostream& os) const {
    os << "ctm v1 states=" << meta_.states << " cap=" << meta_.step_cap
       << " halting=" << meta_.halting << " total=" << meta_.total_enumerated
       << " source=" << meta_.source << "\n";
    std::vector<const std::string*> keys;
    keys.reserve(entries_.size());
    for (const auto& kv : entries_) keys.push_back(&kv.first);
    std::sort(keys.begin(), keys.end(),
              [](const std::string* a, const std::string* b) {
                if (a->size() != b->size()) return a->size() < b->size();
                return *a < *b;
              });
    char buf[64];
    for (const auto* k : keys) {
      std::snprintf(buf, sizeof(buf), "%.17g", entries_.at(*k));
      os << *k << '\t' << buf << '\n';
    }
  }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for write: " + path);
    save(os);
    if (!os.good()) throw data_error("write failed: " + path);
  }

  static CtmTable load(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw data_error("empty ctm table file");
    Meta meta = parse_header(header);
    std::map<std::string, double> entries;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw data_error("ctm table line " + std::to_string(lineno) +
                         ": missing tab");
      const std::string bits = line.substr(0, tab);
      for (char c : bits)
        if (c != '0' && c != '1')
          throw data_error("ctm table line " + std::to_string(lineno) +
                           ": bad bitstring");
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(line.substr(tab + 1), &used);
      } catch (const std::exception&) {
        throw data_error("ctm table line " + std::to_string(lineno) +
                         ": bad value");
      }
      if (value < 0.0)
        throw data_error("ctm table line " + std::to_string(lineno) +
                         ": negative ctm_bits");
      if (!entries.emplace(bits, value).second)
        throw data_error("ctm table line " + std::to_string(lineno) +
                         ": duplicate bitstring");
    }
    return CtmTable(std::move(entries), std::move(meta));
  }

  static CtmTable load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open ctm table: " + path);
    return load(is);
  }

 private:
  static Meta parse_header(const std::string& header) {
    std::istringstream ss(header);
    std::string word;
    ss >> word;
    if (word != "ctm") throw data_error("not a ctm table file");
    ss >> word;
    if (word != "v1") throw data_error("unsupported ctm table version");
    Meta meta;
    while (ss >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos)
        throw data_error("bad ctm header field: " + word);
      const std::string key = word.substr(0, eq);
      const std::string value = word.substr(eq + 1);
      try {
        if (key == "states")
          meta.states = std::stoi(value);
        else if (key == "cap")
          meta.step_cap = std::stoi(value);
        else if (key == "halting")
          meta.halting = std::stoull(value);
        else if (key == "total")
          meta.total_enumerated = std::stoull(value);
        else if (key == "source")
          meta.source = value;
        else
          throw data_error("unknown ctm header field: " + key);
      } catch (const data_error&) {
        throw;
      } catch (const std::exception&) {
        throw data_error("bad ctm header value: " + word);
      }
    }
    return meta;
  }

  void finalize() {
    max_bits_ = 0.0;
    std::vector<double> values;
    values.reserve(entries_.size());
    std::size_t longest = 0;
    for (const auto& kv : entries_) {
      longest = std::max(longest, kv.first.size());
      values.push_back(kv.second);
      max_bits_ = std::max(max_bits_, kv.second);
    }
    max_block_bits_ = std::max<std::size_t>(16, longest);
    if (!values.empty()) {
      std::sort(values.begin(), values.end());
      const std::size_t n = values.size();
      median_bits_ = (n % 2 == 1)
                         ? values[n / 2]
                         : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }
  }

  std::map<std::string, double> entries_;
  Meta meta_;
  std::size_t max_block_bits_ = 16;
  double max_bits_ = 0.0;
  double median_bits_ = 0.0;
};

struct CtmBuildOptions {
  std::uint64_t budget = 100'000'000;  // max machines to enumerate
  int threads = 0;                     // 0 = hardware concurrency
};

// Runs every n-state machine once from a blank tape and tabulates the
// symmetrized output frequencies. Deterministic: counts are integers and
// merge associatively, so the result is independent of thread count and
// schedule.
inline CtmTable build_ctm_table(int states, int step_cap,
                                const CtmBuildOptions& opts = {}) {
  if (states < 1 || states > 4)
    throw std::invalid_argument("ctm enumeration supports 1..4 states");
  if (step_cap < 1) throw std::invalid_argument("step_cap must be >= 1");
  const std::uint64_t total = TuringMachineSpec::total_rules(states);
  if (total > opts.budget)
    throw resource_limit_error(
        "enumeration of " + std::to_string(total) +
        " machines exceeds budget " + std::to_string(opts.budget));

  int threads = opts.threads > 0
                    ? opts.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  const std::uint64_t chunk = (total + threads - 1) / threads;

  std::vector<std::unordered_map<std::string, std::uint64_t>> partial(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      const std::uint64_t begin = chunk * static_cast<std::uint64_t>(w);
      const std::uint64_t end = std::min(total, begin + chunk);
      auto& counts = partial[w];
      detail::TapeScratch scratch(step_cap);
      for (std::uint64_t idx = begin; idx < end; ++idx) {
        TuringMachineSpec spec(states, idx);
        if (auto out = scratch.run(spec, step_cap)) {
          counts[*out] += 1;
          counts[complement_bits(*out)] += 1;
        }
      }
    });
  }
  for (auto& t : workers) t.join();

  std::map<std::string, std::uint64_t> counts;
  std::uint64_t mass = 0;
  for (const auto& part : partial) {
    for (const auto& kv : part) {
      counts[kv.first] += kv.second;
      mass += kv.second;
    }
  }

  std::map<std::string, double> entries;
  const double log2_mass = std::log2(static_cast<double>(mass));
  for (const auto& kv : counts)
    entries[kv.first] = log2_mass - std::log2(static_cast<double>(kv.second));

  CtmTable::Meta meta;
  meta.states = states;
  meta.step_cap = step_cap;
  meta.halting = mass;
  meta.total_enumerated = total;
  meta.source = "generated";
  return CtmTable(std::move(entries), std::move(meta));
}

}  // namespace algoevo

#endif  // ALGOEVO_CTM_HPP
