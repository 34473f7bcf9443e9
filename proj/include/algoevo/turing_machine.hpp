#ifndef ALGOEVO_TURING_MACHINE_HPP
#define ALGOEVO_TURING_MACHINE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace algoevo {

// One-tape machines over the binary alphabet with an explicit halt state,
// in the classic busy-beaver rule format: for every (state, read symbol)
// pair the entry is either (write, move left/right, next state) or
// (write, halt). The tape is blank-0. With n states that is 4n+2 choices
// per pair and (4n+2)^(2n) machines total; rule_index identifies a machine
// by its base-(4n+2) digit string, pair order (s0,read0),(s0,read1),(s1,read0),...
//
// Output convention: when the machine halts, the output is the contents of
// every tape cell the head occupied during the run, leftmost cell first.
// The starting cell counts as occupied, so output length is always >= 1.

struct TmEntry {
  bool halt = false;
  std::uint8_t write = 0;
  std::int8_t move = 1;  // -1 left, +1 right; meaningless when halt is set
  std::uint16_t next = 0;
};

class TuringMachineSpec {
 public:
  static constexpr int kMaxStates = 6;  // (4n+2)^(2n) must fit in 64 bits

  static std::uint64_t total_rules(int states) {
    check_states(states);
    const std::uint64_t base = 4ull * states + 2ull;
    std::uint64_t total = 1;
    for (int i = 0; i < 2 * states; ++i) total *= base;
    return total;
  }

  TuringMachineSpec(int states, std::uint64_t rule_index)
      : states_(states), entries_(2 * static_cast<std::size_t>(states)) {
    if (rule_index >= total_rules(states))
      throw std::invalid_argument("rule_index out of range for state count");
    const std::uint64_t base = 4ull * states + 2ull;
    std::uint64_t rest = rule_index;
    for (auto& e : entries_) {
      e = decode_entry(static_cast<std::uint32_t>(rest % base), states);
      rest /= base;
    }
  }

  static TuringMachineSpec from_entries(int states,
                                        std::vector<TmEntry> entries) {
    check_states(states);
    if (entries.size() != 2 * static_cast<std::size_t>(states))
      throw std::invalid_argument("need one entry per (state, symbol) pair");
    TuringMachineSpec spec;
    spec.states_ = states;
    spec.entries_ = std::move(entries);
    for (const auto& e : spec.entries_) {
      if (e.write > 1) throw std::invalid_argument("write symbol must be 0/1");
      if (!e.halt && (e.next >= static_cast<std::uint16_t>(states) ||
                      (e.move != -1 && e.move != 1)))
        throw std::invalid_argument("bad transition entry");
    }
    return spec;
  }

  int states() const { return states_; }

  const TmEntry& entry(int state, int symbol) const {
    return entries_[static_cast<std::size_t>(state) * 2 + symbol];
  }

  std::uint64_t encode() const {
    const std::uint64_t base = 4ull * states_ + 2ull;
    std::uint64_t index = 0;
    for (std::size_t i = entries_.size(); i-- > 0;)
      index = index * base + encode_entry(entries_[i], states_);
    return index;
  }

 private:
  TuringMachineSpec() = default;

  static void check_states(int states) {
    if (states < 1 || states > kMaxStates)
      throw std::invalid_argument("state count out of range");
  }

  static TmEntry decode_entry(std::uint32_t digit, int states) {
    TmEntry e;
    const std::uint32_t moving = 4u * states;
    if (digit < moving) {
      e.halt = false;
      e.write = digit & 1u;
      e.move = (digit & 2u) ? 1 : -1;
      e.next = static_cast<std::uint16_t>(digit >> 2);
    } else {
      e.halt = true;
      e.write = static_cast<std::uint8_t>(digit - moving);
    }
    return e;
  }

  static std::uint32_t encode_entry(const TmEntry& e, int states) {
    if (e.halt) return 4u * states + e.write;
    return (static_cast<std::uint32_t>(e.next) << 2) |
           (e.move > 0 ? 2u : 0u) | e.write;
  }

  int states_ = 0;
  std::vector<TmEntry> entries_;
};

namespace detail {

// Scratch tape reused across runs during enumeration. Sized so a run of
// step_cap steps can never leave the buffer: the head moves at most one
// cell per step from the centre.
class TapeScratch {
 public:
  explicit TapeScratch(int step_cap)
      : centre_(step_cap + 1),
        cells_(2 * static_cast<std::size_t>(step_cap) + 3, 0) {}

  // Returns the halting output, or nullopt if the machine is still running
  // after step_cap steps. The touched region is wiped before returning so
  // the scratch can be reused.
  std::optional<std::string> run(const TuringMachineSpec& spec, int step_cap) {
    int pos = centre_;
    int lo = pos, hi = pos;
    int state = 0;
    bool halted = false;
    for (int step = 0; step < step_cap; ++step) {
      const TmEntry& e = spec.entry(state, cells_[pos]);
      cells_[pos] = e.write;
      if (e.halt) {
        halted = true;
        break;
      }
      pos += e.move;
      if (pos < lo) lo = pos;
      if (pos > hi) hi = pos;
      state = e.next;
    }
    std::optional<std::string> out;
    if (halted) {
      std::string s(static_cast<std::size_t>(hi - lo + 1), '0');
      for (int i = lo; i <= hi; ++i) s[i - lo] += cells_[i];
      out = std::move(s);
    }
    for (int i = lo; i <= hi; ++i) cells_[i] = 0;
    return out;
  }

 private:
  int centre_;
  std::vector<std::uint8_t> cells_;
};

}  // namespace detail

// Runs a single machine from a blank tape. Returns the halting output per
// the convention above, or nullopt if the machine has not halted within
// step_cap steps (step_cap = 0 never halts).
inline std::optional<std::string> run_machine(const TuringMachineSpec& spec,
                                              int step_cap) {
  if (step_cap < 0) throw std::invalid_argument("step_cap must be >= 0");
  detail::TapeScratch scratch(step_cap);
  return scratch.run(spec, step_cap);
}

}  // namespace algoevo

#endif  // ALGOEVO_TURING_MACHINE_HPP
