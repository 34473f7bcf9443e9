#ifndef ALGOEVO_GRAPHS_HPP
#define ALGOEVO_GRAPHS_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "algoevo/binary_matrix.hpp"
#include "algoevo/errors.hpp"

namespace algoevo {

// ---------------------------------------------------------------------------
// Static targets
// ---------------------------------------------------------------------------

enum class GraphKind { complete, star, grid, empty };

struct GraphSpec {
  GraphKind kind = GraphKind::complete;
  int nodes = 8;
  // Lattice shape for GraphKind::grid; rows * cols must equal nodes.
  int grid_rows = 2;
  int grid_cols = 4;
};

// Undirected adjacency matrix: symmetric, zero diagonal.
inline BinaryMatrix make_static_target(const GraphSpec& spec) {
  if (spec.nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  BinaryMatrix m(spec.nodes);
  auto edge = [&m](int a, int b) {
    m.set(a, b, true);
    m.set(b, a, true);
  };
  switch (spec.kind) {
    case GraphKind::complete:
      for (int i = 0; i < spec.nodes; ++i)
        for (int j = i + 1; j < spec.nodes; ++j) edge(i, j);
      break;
    case GraphKind::star:
      for (int j = 1; j < spec.nodes; ++j) edge(0, j);
      break;
    case GraphKind::grid: {
      if (spec.grid_rows * spec.grid_cols != spec.nodes)
        throw std::invalid_argument("grid rows*cols must equal node count");
      // Vertices number down the columns; gridRxC names use this labelling.
      auto at = [&spec](int r, int c) { return c * spec.grid_rows + r; };
      for (int r = 0; r < spec.grid_rows; ++r)
        for (int c = 0; c < spec.grid_cols; ++c) {
          if (c + 1 < spec.grid_cols) edge(at(r, c), at(r, c + 1));
          if (r + 1 < spec.grid_rows) edge(at(r, c), at(r + 1, c));
        }
      break;
    }
    case GraphKind::empty:
      break;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Edge-removal target sequence
// ---------------------------------------------------------------------------

// Starting from the complete graph, removes one undirected edge at a time in
// lexicographic (i, j) order until the empty graph. Returns the C(nodes, 2)
// post-removal matrices; the complete graph itself is not included.
inline std::vector<BinaryMatrix> edge_removal_sequence(int nodes) {
  if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  BinaryMatrix m = make_static_target({GraphKind::complete, nodes});
  std::vector<BinaryMatrix> out;
  out.reserve(static_cast<std::size_t>(nodes) * (nodes - 1) / 2);
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j) {
      m.set(i, j, false);
      m.set(j, i, false);
      out.push_back(m);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Recursively generated dynamic networks
// ---------------------------------------------------------------------------

enum class DynamicKind { zk, kary_tree, growing_star, star_to_path };

struct DynamicSequence {
  DynamicKind kind = DynamicKind::zk;
  int nodes = 16;
  std::vector<BinaryMatrix> stages;
};

namespace detail {

// Directed edge set on 1-based vertex labels, capped at `nodes`.
class EdgeSetGraph {
 public:
  explicit EdgeSetGraph(int nodes) : nodes_(nodes) {}

  bool fits(int v) const { return v >= 1 && v <= nodes_; }

  void add_directed(int a, int b) { edges_.insert({a, b}); }
  void add_undirected(int a, int b) {
    edges_.insert({a, b});
    edges_.insert({b, a});
  }
  void remove_undirected(int a, int b) {
    edges_.erase({a, b});
    edges_.erase({b, a});
  }
  bool has_undirected(int a, int b) const {
    return edges_.count({a, b}) != 0 || edges_.count({b, a}) != 0;
  }

  // Total degree (in + out), counting each stored arc once.
  int degree(int v) const {
    int d = 0;
    for (const auto& e : edges_) d += (e.first == v) + (e.second == v);
    return d;
  }
  int max_degree() const {
    int best = 0;
    for (int v = 1; v <= nodes_; ++v) best = std::max(best, degree(v));
    return best;
  }

  BinaryMatrix matrix() const {
    BinaryMatrix m(nodes_);
    for (const auto& e : edges_) m.set(e.first - 1, e.second - 1, true);
    return m;
  }

 private:
  int nodes_;
  std::set<std::pair<int, int>> edges_;
};

}  // namespace detail

// The four dynamic families, transcribed from their generating recurrences
// onto a fixed vertex count. Stages stop at the last one expressible in
// `nodes` vertices.
inline DynamicSequence dynamic_sequence(DynamicKind kind, int nodes = 16) {
  if (nodes < 3) throw std::invalid_argument("need at least 3 nodes");
  DynamicSequence seq;
  seq.kind = kind;
  seq.nodes = nodes;
  switch (kind) {
    case DynamicKind::zk: {
      // Start from the arc 1->2; repeatedly let h be (max total degree)+1
      // and add arcs h -> h+1 ... h + (h - degree(h)), i.e. the vertex
      // labelled one above the current maximum degree fans out until its
      // label exceeds its own degree deficit.
      detail::EdgeSetGraph g(nodes);
      g.add_directed(1, 2);
      seq.stages.push_back(g.matrix());
      for (;;) {
        const int hub = g.max_degree() + 1;
        const int fan_end = hub + hub - g.degree(hub);
        if (!g.fits(hub) || !g.fits(fan_end)) break;
        for (int v = hub + 1; v <= fan_end; ++v) g.add_directed(hub, v);
        seq.stages.push_back(g.matrix());
      }
      break;
    }
    case DynamicKind::kary_tree: {
      // Binary (k = 2) tree on v vertices in heap order, arcs parent->child,
      // for v = 1 .. nodes.
      for (int v = 1; v <= nodes; ++v) {
        detail::EdgeSetGraph g(nodes);
        for (int child = 2; child <= v; ++child)
          g.add_directed(child / 2, child);
        seq.stages.push_back(g.matrix());
      }
      break;
    }
    case DynamicKind::growing_star: {
      // Stage i >= 3 is the union of directed stars for n = 3..i, each with
      // centre 2n+1 and leaves 2n+2 .. 3n, so consecutive stars overlap.
      for (int i = 3; 3 * i <= nodes; ++i) {
        detail::EdgeSetGraph g(nodes);
        for (int n = 3; n <= i; ++n)
          for (int leaf = 2 * n + 2; leaf <= 3 * n; ++leaf)
            g.add_directed(2 * n + 1, leaf);
        seq.stages.push_back(g.matrix());
      }
      break;
    }
    case DynamicKind::star_to_path: {
      // Undirected. Start from the star centred at 1; step j adds cycle
      // edge (j, j+1 mod n) and deletes spoke (1, j+1), with the two
      // steps whose added and deleted edge coincide collapsing to no-ops.
      detail::EdgeSetGraph g(nodes);
      for (int leaf = 2; leaf <= nodes; ++leaf) g.add_undirected(1, leaf);
      seq.stages.push_back(g.matrix());
      std::vector<std::pair<int, int>> adds, dels;
      for (int j = 1; j < nodes; ++j) adds.push_back({j, j + 1});
      adds.push_back({1, nodes});
      for (int leaf = 2; leaf <= nodes; ++leaf) dels.push_back({1, leaf});
      dels.push_back({1, nodes});
      for (std::size_t j = 0; j < adds.size(); ++j) {
        if (adds[j] == dels[j]) continue;
        g.add_undirected(adds[j].first, adds[j].second);
        g.remove_undirected(dels[j].first, dels[j].second);
        seq.stages.push_back(g.matrix());
      }
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < seq.stages.size(); ++i)
    for (std::size_t j = i + 1; j < seq.stages.size(); ++j)
      if (seq.stages[i] == seq.stages[j])
        throw std::logic_error("dynamic sequence stages must be distinct");
  return seq;
}

inline DynamicKind parse_dynamic_kind(const std::string& name) {
  if (name == "zk") return DynamicKind::zk;
  if (name == "kary_tree") return DynamicKind::kary_tree;
  if (name == "growing_star") return DynamicKind::growing_star;
  if (name == "star_to_path") return DynamicKind::star_to_path;
  throw std::invalid_argument("unknown dynamic network kind: " + name);
}

// ---------------------------------------------------------------------------
// Edge-list ingestion
// ---------------------------------------------------------------------------

struct EdgeListResult {
  BinaryMatrix matrix;
  std::vector<std::string> names;
  std::vector<std::string> warnings;
};

// Format: header `nodes: name1,name2,...`, then one `srcName\ttgtName` line
// per directed edge. Node indices are assigned in header order.
inline EdgeListResult load_edge_list(std::istream& is, int matrix_size = -1) {
  std::string line;
  if (!std::getline(is, line)) throw data_error("edge list: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string prefix = "nodes:";
  if (line.compare(0, prefix.size(), prefix) != 0)
    throw data_error("edge list: missing `nodes:` header");
  std::vector<std::string> names;
  std::map<std::string, int> index;
  {
    std::string rest = line.substr(prefix.size());
    std::istringstream ss(rest);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto a = name.find_first_not_of(" \t");
      const auto b = name.find_last_not_of(" \t");
      if (a == std::string::npos) throw data_error("edge list: empty name");
      name = name.substr(a, b - a + 1);
      if (!index.emplace(name, static_cast<int>(names.size())).second)
        throw data_error("edge list: duplicate node name " + name);
      names.push_back(name);
    }
  }
  if (names.empty()) throw data_error("edge list: no nodes declared");
  if (matrix_size < 0) matrix_size = static_cast<int>(names.size());
  if (static_cast<int>(names.size()) > matrix_size)
    throw data_error("edge list: " + std::to_string(names.size()) +
                     " nodes do not fit a matrix of size " +
                     std::to_string(matrix_size));

  EdgeListResult result{BinaryMatrix(matrix_size), std::move(names), {}};
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw data_error("edge list line " + std::to_string(lineno) +
                       ": expected srcName<TAB>tgtName");
    const std::string src = line.substr(0, tab);
    const std::string tgt = line.substr(tab + 1);
    const auto si = index.find(src), ti = index.find(tgt);
    if (si == index.end() || ti == index.end())
      throw data_error("edge list line " + std::to_string(lineno) +
                       ": unknown node name");
    if (si->second == ti->second)
      throw data_error("edge list line " + std::to_string(lineno) +
                       ": self-loops are not supported");
    if (result.matrix.get(si->second, ti->second))
      result.warnings.push_back("duplicate edge " + src + " -> " + tgt);
    result.matrix.set(si->second, ti->second, true);
  }
  return result;
}

inline EdgeListResult load_edge_list(const std::string& path,
                                     int matrix_size = -1) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("cannot open edge list: " + path);
  return load_edge_list(is, matrix_size);
}

// ---------------------------------------------------------------------------
// ERBB signalling topology (bundled data asset)
// ---------------------------------------------------------------------------

// Directed 16-node approximation of the ERBB signalling network used as the
// biological chase target. Reconstructed from the interactions named in the
// network's published description; the bundled data/erbb16.tsv file carries
// the same edge list.
inline const char* erbb16_edge_list_text() {
  return
      "nodes: EGFR,ERBB2,ERBB3,IGFR,ESR,MYC,AKT,MEK,CCND,CCNE,CDK2,CDK4,"
      "CDK6,CDKN1A,CDKN1B,RB\n"
      "EGFR\tERBB2\n"
      "EGFR\tERBB3\n"
      "EGFR\tESR\n"
      "EGFR\tAKT\n"
      "EGFR\tMEK\n"
      "ERBB2\tCDK4\n"
      "ERBB3\tIGFR\n"
      "ERBB3\tERBB2\n"
      "IGFR\tESR\n"
      "IGFR\tCCNE\n"
      "IGFR\tMEK\n"
      "ESR\tMYC\n"
      "ESR\tERBB2\n"
      "ESR\tCCND\n"
      "MYC\tEGFR\n"
      "MYC\tCCNE\n"
      "AKT\tCDKN1B\n"
      "MEK\tMYC\n"
      "CCND\tEGFR\n"
      "CCND\tCDK4\n"
      "CCND\tCDKN1A\n"
      "CCNE\tCDK2\n"
      "CDK2\tAKT\n"
      "CDK2\tRB\n"
      "CDK4\tRB\n"
      "CDK6\tRB\n"
      "CDKN1A\tCDK2\n"
      "CDKN1B\tCDK2\n";
}

inline BinaryMatrix erbb16_matrix() {
  std::istringstream ss(erbb16_edge_list_text());
  return load_edge_list(ss, 16).matrix;
}

// ---------------------------------------------------------------------------
// Built-in target names (complete8, star8, grid2x4, empty8, erbb16, ...)
// ---------------------------------------------------------------------------

inline BinaryMatrix target_by_name(const std::string& name) {
  if (name == "erbb16") return erbb16_matrix();
  auto parse_int = [&name](const std::string& digits) {
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("unknown target name: " + name);
    return std::stoi(digits);
  };
  auto starts = [&name](const char* p) {
    return name.rfind(p, 0) == 0;
  };
  if (starts("complete"))
    return make_static_target({GraphKind::complete, parse_int(name.substr(8))});
  if (starts("star"))
    return make_static_target({GraphKind::star, parse_int(name.substr(4))});
  if (starts("empty"))
    return make_static_target({GraphKind::empty, parse_int(name.substr(5))});
  if (starts("grid")) {
    const auto x = name.find('x');
    if (x == std::string::npos || x <= 4)
      throw std::invalid_argument("grid targets are named gridRxC");
    const int rows = parse_int(name.substr(4, x - 4));
    const int cols = parse_int(name.substr(x + 1));
    return make_static_target({GraphKind::grid, rows * cols, rows, cols});
  }
  throw std::invalid_argument("unknown target name: " + name);
}

// Bernoulli(density) matrix; deterministic under the given generator.
inline BinaryMatrix random_matrix(Rng& rng, int size, double density = 0.5) {
  return BinaryMatrix::random(rng, size, density);
}

}  // namespace algoevo

#endif  // ALGOEVO_GRAPHS_HPP
