#ifndef ALGOEVO_BDM_HPP
#define ALGOEVO_BDM_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "algoevo/binary_matrix.hpp"
#include "algoevo/ctm.hpp"

namespace algoevo {

// Shannon entropy in bits of a {0,1} source with `ones` ones in `total`
// draws. Zero when all draws agree.
inline double entropy_of_counts(int ones, int total) {
  if (ones <= 0 || ones >= total) return 0.0;
  const double p = static_cast<double>(ones) / total;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Empirical single-bit entropy of the matrix, in [0, 1].
inline double bit_entropy(const BinaryMatrix& m) {
  return entropy_of_counts(m.ones(), m.bit_count());
}

namespace detail {

// Non-overlapping block partition of a square matrix. Each block is encoded
// as an integer whose bit i is the block's i-th cell in row-major order,
// matching the canonical flattening used for CTM lookup.
class BlockGrid {
 public:
  BlockGrid(const BinaryMatrix& m, int block_size) {
    if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
    if (block_size * block_size > 64)
      throw std::invalid_argument("block size above 8x8 is not supported");
    if (m.size() % block_size != 0)
      throw std::invalid_argument(
          "block size must divide the matrix size (partial blocks are not "
          "defined for this table)");
    n_ = m.size();
    bs_ = block_size;
    side_ = n_ / bs_;
    values_.resize(static_cast<std::size_t>(side_) * side_, 0);
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c)
        if (m.get(r, c)) {
          const int b = (r / bs_) * side_ + (c / bs_);
          values_[b] |= 1ull << in_block_bit(r, c);
        }
  }

  int block_count() const { return side_ * side_; }
  int bits_per_block() const { return bs_ * bs_; }
  std::uint64_t value(int block) const { return values_[block]; }

  int block_of_flat(int flat) const {
    const int r = flat / n_, c = flat % n_;
    return (r / bs_) * side_ + (c / bs_);
  }
  int bit_of_flat(int flat) const {
    return in_block_bit(flat / n_, flat % n_);
  }

  std::string bitstring(std::uint64_t value) const {
    std::string s(static_cast<std::size_t>(bits_per_block()), '0');
    for (int i = 0; i < bits_per_block(); ++i)
      if (value & (1ull << i)) s[i] = '1';
    return s;
  }

  // XOR masks per affected block for a set of flat bit positions.
  std::vector<std::pair<int, std::uint64_t>> flip_masks(
      std::span<const int> flats) const {
    std::vector<std::pair<int, std::uint64_t>> masks;
    for (int flat : flats) {
      const int b = block_of_flat(flat);
      const std::uint64_t bit = 1ull << bit_of_flat(flat);
      bool found = false;
      for (auto& bm : masks)
        if (bm.first == b) {
          bm.second ^= bit;
          found = true;
          break;
        }
      if (!found) masks.emplace_back(b, bit);
    }
    return masks;
  }

 private:
  int in_block_bit(int r, int c) const {
    return (r % bs_) * bs_ + (c % bs_);
  }

  int n_ = 0, bs_ = 0, side_ = 0;
  std::vector<std::uint64_t> values_;
};

// Multiset of block values with an incrementally evaluable score of the
// form sum over distinct values of term(value, count). Both the BDM score
// and the block-entropy score are instances.
template <typename Term>
class BlockScore {
 public:
  BlockScore(const BinaryMatrix& m, int block_size, Term term)
      : grid_(m, block_size), term_(std::move(term)) {
    for (int b = 0; b < grid_.block_count(); ++b) counts_[grid_.value(b)] += 1;
    score_ = 0.0;
    for (const auto& kv : counts_) score_ += term_(kv.first, kv.second);
  }

  const BlockGrid& grid() const { return grid_; }
  double score() const { return score_; }

  // Score of the matrix with the given flat bit positions flipped; the
  // context itself is left untouched. Cost is O(flips), independent of the
  // matrix size.
  double score_with_flips(std::span<const int> flats) const {
    const auto masks = grid_.flip_masks(flats);
    double score = score_;
    // Tiny overlay of count adjustments; at most 2*flips entries.
    std::vector<std::pair<std::uint64_t, int>> delta;
    auto count_of = [&](std::uint64_t v) {
      int c = 0;
      auto it = counts_.find(v);
      if (it != counts_.end()) c = static_cast<int>(it->second);
      for (const auto& d : delta)
        if (d.first == v) c += d.second;
      return c;
    };
    auto adjust = [&](std::uint64_t v, int by) {
      const int before = count_of(v);
      const int after = before + by;
      if (before > 0) score -= term_(v, before);
      if (after > 0) score += term_(v, after);
      for (auto& d : delta)
        if (d.first == v) {
          d.second += by;
          return;
        }
      delta.emplace_back(v, by);
    };
    for (const auto& bm : masks) {
      if (bm.second == 0) continue;  // an even number of flips in one cell
      const std::uint64_t v = grid_.value(bm.first);
      adjust(v, -1);
      adjust(v ^ bm.second, +1);
    }
    return score;
  }

 private:
  BlockGrid grid_;
  Term term_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  double score_;
};

}  // namespace detail

// Block-decomposition score context bound to one matrix and one table.
// The evolution engine builds one of these per instance and scores every
// mutation candidate through score_with_flips.
class BdmContext {
 public:
  BdmContext(const BinaryMatrix& m, const CtmTable& table, int block_size)
      : table_(&table),
        score_(m, checked_block_size(table, block_size), TermFn{this}) {}

  double bdm() const { return score_.score(); }
  double bdm_with_flips(std::span<const int> flats) const {
    return score_.score_with_flips(flats);
  }

 private:
  struct TermFn {
    BdmContext* ctx;
    double operator()(std::uint64_t value, std::int64_t count) const {
      return ctx->ctm_of(value) + std::log2(static_cast<double>(count));
    }
  };

  static int checked_block_size(const CtmTable& table, int block_size) {
    if (block_size < 1 || block_size * block_size > 64 ||
        static_cast<std::size_t>(block_size * block_size) >
            table.max_block_bits())
      throw std::invalid_argument("unsupported block size for this table");
    return block_size;
  }

  double ctm_of(std::uint64_t value) const {
    auto it = ctm_cache_.find(value);
    if (it != ctm_cache_.end()) return it->second;
    const double bits = table_->lookup(score_.grid().bitstring(value));
    ctm_cache_.emplace(value, bits);
    return bits;
  }

  const CtmTable* table_;
  mutable std::unordered_map<std::uint64_t, double> ctm_cache_;
  detail::BlockScore<TermFn> score_;
};

// BDM(m) = sum over distinct block values v of ctm(v) + log2(multiplicity).
// Blocks are the non-overlapping block_size x block_size submatrices,
// flattened row-major for table lookup.
inline double bdm(const BinaryMatrix& m, const CtmTable& table,
                  int block_size = 4) {
  return BdmContext(m, table, block_size).bdm();
}

// BDM of the matrix with the given cells flipped, computed by updating only
// the affected blocks. Agrees with a full recompute to within rounding.
inline double bdm_delta(const BinaryMatrix& m, const CtmTable& table,
                        const std::vector<std::pair<int, int>>& flips,
                        int block_size = 4) {
  std::vector<int> flats;
  flats.reserve(flips.size());
  for (const auto& rc : flips) {
    if (rc.first < 0 || rc.first >= m.size() || rc.second < 0 ||
        rc.second >= m.size())
      throw std::out_of_range("flip position out of bounds");
    const int flat = rc.first * m.size() + rc.second;
    for (int seen : flats)
      if (seen == flat) throw std::invalid_argument("duplicate flip position");
    flats.push_back(flat);
  }
  return BdmContext(m, table, block_size).bdm_with_flips(flats);
}

// Block-entropy context with the same incremental interface as BdmContext.
class BlockEntropyContext {
 public:
  BlockEntropyContext(const BinaryMatrix& m, int block_size)
      : score_(m, block_size, TermFn{m.size() / block_size}) {}

  double entropy() const { return score_.score(); }
  double entropy_with_flips(std::span<const int> flats) const {
    return score_.score_with_flips(flats);
  }

 private:
  struct TermFn {
    int side;
    double operator()(std::uint64_t, std::int64_t count) const {
      const double p =
          static_cast<double>(count) / (static_cast<double>(side) * side);
      return -p * std::log2(p);
    }
  };
  detail::BlockScore<TermFn> score_;
};

// Shannon entropy of the empirical distribution over non-overlapping block
// values, in [0, log2(block count)].
inline double block_entropy(const BinaryMatrix& m, int block_size = 4) {
  return BlockEntropyContext(m, block_size).entropy();
}

}  // namespace algoevo

#endif  // ALGOEVO_BDM_HPP
