#ifndef ALGOEVO_BINARY_MATRIX_HPP
#define ALGOEVO_BINARY_MATRIX_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "algoevo/rng.hpp"

namespace algoevo {

// Square n-by-n grid of bits, row-major. Doubles as the genome of the
// evolutionary model and as the adjacency matrix of an n-node graph.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;

  explicit BinaryMatrix(int size) : size_(size), bits_(check_size(size), 0) {}

  static BinaryMatrix from_bitstring(int size, const std::string& bits) {
    BinaryMatrix m(size);
    if (bits.size() != m.bits_.size())
      throw std::invalid_argument("bitstring length does not match size^2");
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1')
        throw std::invalid_argument("bitstring must contain only 0/1");
      m.bits_[i] = static_cast<std::uint8_t>(bits[i] - '0');
    }
    return m;
  }

  int size() const { return size_; }
  int bit_count() const { return size_ * size_; }

  bool get(int row, int col) const { return bits_[index(row, col)] != 0; }
  void set(int row, int col, bool v) {
    bits_[index(row, col)] = v ? 1 : 0;
  }
  void flip(int row, int col) { bits_[index(row, col)] ^= 1; }

  // Flat accessors over the canonical row-major order.
  bool get_flat(int i) const { return bits_[check_flat(i)] != 0; }
  void flip_flat(int i) { bits_[check_flat(i)] ^= 1; }

  int ones() const {
    int c = 0;
    for (auto b : bits_) c += b;
    return c;
  }

  BinaryMatrix complemented() const {
    BinaryMatrix m = *this;
    for (auto& b : m.bits_) b ^= 1;
    return m;
  }

  std::string to_bitstring() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) s[i] += bits_[i];
    return s;
  }

  // Row-major 0/1 text lines, one row per line. This is the on-disk matrix
  // format used by the CLI.
  void write_text(std::ostream& os) const {
    for (int r = 0; r < size_; ++r) {
      for (int c = 0; c < size_; ++c) os.put(get(r, c) ? '1' : '0');
      os.put('\n');
    }
  }

  static BinaryMatrix read_text(std::istream& is) {
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      rows.push_back(line);
    }
    if (rows.empty()) throw std::invalid_argument("empty matrix text");
    const int n = static_cast<int>(rows.size());
    std::string flat;
    flat.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != n)
        throw std::invalid_argument("matrix text is not square");
      flat += r;
    }
    return from_bitstring(n, flat);
  }

  static BinaryMatrix random(Rng& rng, int size, double density = 0.5) {
    if (density < 0.0 || density > 1.0)
      throw std::invalid_argument("density must be in [0,1]");
    BinaryMatrix m(size);
    for (auto& b : m.bits_) b = rng.coin(density) ? 1 : 0;
    return m;
  }

  // Stable 64-bit fingerprint of the bit contents (FNV-1a over the packed
  // rows). Used as the node id in evolutionary-network exports.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto eat = [&h](std::uint64_t byte) {
      h ^= byte;
      h *= 0x100000001B3ull;
    };
    eat(static_cast<std::uint64_t>(size_));
    std::uint64_t acc = 0;
    int filled = 0;
    for (auto b : bits_) {
      acc = (acc << 1) | b;
      if (++filled == 8) {
        eat(acc);
        acc = 0;
        filled = 0;
      }
    }
    if (filled > 0) eat(acc | (1ull << filled));
    return h;
  }

  friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
    return a.size_ == b.size_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const BinaryMatrix& a, const BinaryMatrix& b) {
    return !(a == b);
  }
  friend bool operator<(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.size_ != b.size_) return a.size_ < b.size_;
    return a.bits_ < b.bits_;
  }

 private:
  static std::size_t check_size(int size) {
    if (size <= 0) throw std::invalid_argument("matrix size must be positive");
    return static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
  }
  std::size_t index(int row, int col) const {
    if (row < 0 || row >= size_ || col < 0 || col >= size_)
      throw std::out_of_range("matrix position out of range");
    return static_cast<std::size_t>(row) * size_ + col;
  }
  std::size_t check_flat(int i) const {
    if (i < 0 || i >= bit_count()) throw std::out_of_range("bit index");
    return static_cast<std::size_t>(i);
  }

  int size_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Number of positions where the two matrices differ. This is the fitness
// function of the Max One style setup: evolution minimizes the distance to
// the target matrix.
inline int hamming(const BinaryMatrix& a, const BinaryMatrix& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("hamming: size mismatch");
  int d = 0;
  for (int i = 0; i < a.bit_count(); ++i) d += a.get_flat(i) != b.get_flat(i);
  return d;
}

}  // namespace algoevo

#endif  // ALGOEVO_BINARY_MATRIX_HPP
