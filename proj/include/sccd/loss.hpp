#pragma once

#include <span>

#include "sccd/tensor.hpp"

namespace sccd {

/// Pair construction context for the structure contrastive loss: per-node
/// high-level neighborhoods (from the masked adjacency) and the temperature.
/// Neighbor lists are symmetric and never contain the node itself.
struct PairContext {
  SparseMatPtr high_mask;  // pattern-only, symmetric; shared with tape ops
  double tau = 1.0;

  static PairContext from_high_adj(Csr high_adj, double tau);

  const Csr& high_adj() const { return high_mask->mat; }
  Index n_nodes() const { return high_adj().rows; }
  Index high_degree(Index i) const {
    return high_adj().offsets[i + 1] - high_adj().offsets[i];
  }
  std::span<const Index> high_neighbors(Index i) const {
    return {high_adj().targets.data() + high_adj().offsets[i],
            static_cast<std::size_t>(high_degree(i))};
  }
  /// Positive pairs per anchor: intra-view and inter-view high-level
  /// neighbors plus the inter-view self pair.
  Index positive_count(Index i) const { return 2 * high_degree(i) + 1; }
};

/// In-place row L2 normalization with the same epsilon guard as the tape op.
void l2_normalize_rows(Tensor& z, double eps = 1e-12);

/// Contrastive loss of one anchor in one view (rows of z1n/z2n must be unit
/// norm). Plain double-loop summation over positives, the inter-view self
/// pair, and all non-neighbor negatives (j = i excluded).
double node_loss(Index i, int view, const Tensor& z1n, const Tensor& z2n,
                 const PairContext& ctx);

/// Mean node loss over both views, computed with vectorized N x N similarity
/// matrices and sparse masks; mathematically identical to averaging
/// node_loss over all anchors. Normalization of the inputs happens on the
/// tape, so gradients flow to the raw embeddings.
TensorPtr total_loss(Tape& tape, TensorPtr z1, TensorPtr z2,
                     const PairContext& ctx);

}  // namespace sccd
