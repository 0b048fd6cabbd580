#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sccd/kernels.hpp"

namespace sccd {

/// Immutable undirected graph with optional node attributes and community
/// labels. The adjacency is kept both as a canonical edge list (u < v,
/// lexicographically sorted) and in CSR form; no self-loops, no duplicates.
/// Safe to share across threads after construction.
struct DataGraph {
  Index n_nodes = 0;
  std::vector<std::pair<Index, Index>> edges;  // u < v, sorted
  Csr adj;                                     // symmetric, pattern-only

  std::vector<double> attrs;  // row-major n_nodes x n_attrs, empty if absent
  Index n_attrs = 0;
  std::vector<int> labels;  // size n_nodes or empty
  Index n_communities = 0;  // 1 + max label when labels present

  bool has_attrs() const { return n_attrs > 0; }
  bool has_labels() const { return !labels.empty(); }
  Index n_edges() const { return static_cast<Index>(edges.size()); }
  Index degree(Index v) const { return adj.offsets[v + 1] - adj.offsets[v]; }
  std::span<const Index> neighbors(Index v) const {
    return {adj.targets.data() + adj.offsets[v],
            static_cast<std::size_t>(degree(v))};
  }
  double avg_degree() const {
    return n_nodes == 0 ? 0.0 : 2.0 * static_cast<double>(n_edges()) / n_nodes;
  }
};

/// Dirty-input statistics from the loader: duplicate edges and self-loops are
/// dropped silently but counted.
struct LoadStats {
  Index duplicate_edges = 0;
  Index self_loops = 0;
};

/// Build a validated graph from raw (possibly dirty) pairs.
DataGraph build_graph(Index n_nodes, std::vector<std::pair<Index, Index>> pairs,
                      LoadStats* stats = nullptr);

/// Load a graph from text files. Edge file: one "u v" pair per line (space or
/// tab), '#' lines and blank lines ignored. Attribute file: header "N F" then
/// N rows of F reals. Label file: N lines of one integer in [0, C).
/// n_nodes = 1 + max node id unless the attribute header declares a larger N.
DataGraph load_graph(const std::string& edge_path,
                     const std::optional<std::string>& attr_path = {},
                     const std::optional<std::string>& label_path = {},
                     LoadStats* stats = nullptr);

/// Write a graph back in the loader's formats. Round-trips exactly.
void save_graph(const DataGraph& g, const std::string& edge_path,
                const std::optional<std::string>& attr_path = {},
                const std::optional<std::string>& label_path = {});

/// Copy of g whose attribute matrix is the dense N x N 0/1 adjacency.
DataGraph adjacency_as_attrs(const DataGraph& g);

/// Compact arbitrary non-negative ids to dense 0..N-1 (sorted order).
/// old_of_new[new_id] = original id. Attr/label files must already be in the
/// remapped order; the emitted map lets callers produce them.
std::vector<std::pair<Index, Index>> remap_node_ids(
    std::span<const std::pair<Index, Index>> pairs,
    std::vector<Index>& old_of_new);

/// Raw edge-file reader (no dedup); building blocks for load_graph and the
/// remapping pass.
std::vector<std::pair<Index, Index>> read_edge_pairs(
    const std::string& edge_path);

enum class SplitRole : std::uint8_t { train, val, test };

/// Deterministic 8:1:1 node split: seeded shuffle, then cumulative-floor
/// boundaries at floor(0.8 N) and floor(0.9 N).
struct SplitAssignment {
  std::vector<SplitRole> role;  // size n_nodes
  std::uint64_t seed = 0;

  std::vector<Index> nodes_with(SplitRole r) const;
};

SplitAssignment make_split(const DataGraph& g, std::uint64_t seed);

}  // namespace sccd
