#pragma once

#include <string>
#include <vector>

#include "sccd/graph.hpp"

namespace sccd {

enum class PatternKind { triangle, k_core, k_truss };

struct Pattern {
  PatternKind kind;
  int k = 0;  // unused for triangle
};

/// Dense-substructure pattern set. Text form: comma-separated list of
/// "triangle", "k-core(K)", "k-truss(K)" with K >= 1.
struct PatternSet {
  std::vector<Pattern> patterns;

  static PatternSet parse(const std::string& text);
  std::string to_string() const;
};

/// High-level structure view: per-edge pattern counts, the masked high-level
/// adjacency (edges with count 0 removed, nodes retained), and the sparse
/// structure similarity matrix with entries (count+1)/(max+1) on every graph
/// edge plus an explicit unit diagonal.
struct StructureView {
  std::vector<Index> dic;  // aligned with DataGraph::edges
  Index max_count = 0;
  Csr high_adj;  // pattern-only, symmetric
  Csr sim;       // weighted, symmetric, unit diagonal
};

/// Index of undirected edge (u,v) in the canonical edge array, or -1.
Index edge_index(const DataGraph& g, Index u, Index v);

/// Per-edge triangle support |N(u) and N(v) in common|. The parallel kernel splits the
/// edge array across threads; per-edge counts are independent, so results do
/// not depend on thread count.
std::vector<Index> count_edge_triangles(const DataGraph& g);
std::vector<Index> count_edge_triangles_serial(const DataGraph& g);

/// Core number per node (bucket peeling).
std::vector<Index> core_decomposition(const DataGraph& g);

/// Truss number per edge, aligned with the edge array. Every edge of a
/// non-empty graph has truss >= 2.
std::vector<Index> truss_decomposition(const DataGraph& g);

/// Per-edge dictionary: triangle patterns add the support count, k-core(k)
/// adds 1 when both endpoints have core number >= k, k-truss(k) adds 1 when
/// the edge's truss number >= k.
std::vector<Index> count_patterns(const DataGraph& g, const PatternSet& ps);

StructureView build_structure_view(const DataGraph& g, const PatternSet& ps);

/// Text round-trip of a mined view ("u v count sim" rows + high-level edge
/// list), enabling pipeline restarts from cached mining.
void save_structure_view(const StructureView& view, const DataGraph& g,
                         const std::string& dir);
StructureView load_structure_view(const DataGraph& g, const std::string& dir);

}  // namespace sccd
