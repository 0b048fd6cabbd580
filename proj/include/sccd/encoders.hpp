#pragma once

#include <utility>

#include "sccd/tensor.hpp"

namespace sccd {

/// Two-layer perceptron with ReLU after the first layer and a linear output.
/// Weights are stored input x output; biases are rows.
struct Perceptron {
  TensorPtr w1, b1, w2, b2;

  std::vector<TensorPtr> trainable() const { return {w1, b1, w2, b2}; }
};

Perceptron make_perceptron(Index in, Index hidden, Index out, Rng& rng);

/// Structure-semantic encoder parameters: two independent perceptrons with a
/// shared architecture, f_s over similarity rows (input width N) and f_x over
/// attribute rows (input width F), both emitting width d.
struct SssParams {
  Perceptron f_s;
  Perceptron f_x;

  std::vector<TensorPtr> trainable() const;
};

SssParams make_sss_params(Index n_nodes, Index n_attrs, Index hidden, Index d,
                          Rng& rng);

/// Two-layer GCN encoder parameters; a single instance serves both views.
struct GcnParams {
  TensorPtr w1, b1, w2, b2;

  std::vector<TensorPtr> trainable() const { return {w1, b1, w2, b2}; }
};

GcnParams make_gcn_params(Index in, Index hidden, Index out, Rng& rng);

/// D^-1/2 (A + I) D^-1/2 with degrees taken from A + I; rows of isolated
/// nodes reduce to the unit self-loop entry.
Csr normalize_adjacency(const Csr& adj);

/// Dense-input two-layer perceptron forward: w2(relu(w1 x + b1)) + b2 applied
/// row-wise, no output activation.
TensorPtr mlp2_forward(Tape& tape, const Perceptron& p, TensorPtr x);
/// Same with a sparse constant input (layer-1 product uses sparse . dense).
TensorPtr mlp2_forward(Tape& tape, const Perceptron& p, SparseMatPtr x);

/// Semantic features (S', X') per the SSS encoder. When `x_sparse` is given it
/// must mirror `x`; the layer-1 product then skips structural zeros (bitwise
/// identical result, attribute matrices are often very sparse).
std::pair<TensorPtr, TensorPtr> sss_forward(Tape& tape, const SssParams& p,
                                            SparseMatPtr s, TensorPtr x,
                                            SparseMatPtr x_sparse = nullptr);

/// Column-wise concatenation [S' | X'].
TensorPtr aggregate(Tape& tape, TensorPtr s_feat, TensorPtr x_feat);

/// Z = norm_adj . relu(norm_adj . H0 . W1 + b1) . W2 + b2
TensorPtr gcn_forward(Tape& tape, const GcnParams& p, SparseMatPtr norm_adj,
                      TensorPtr h0);

/// One SSS pass, one aggregation, then the shared-weight GCN over both
/// adjacencies: returns (Z from `norm_adj`, Z^H from `norm_adj_high`).
std::pair<TensorPtr, TensorPtr> encode_views(Tape& tape, const SssParams& sss,
                                             const GcnParams& gcn,
                                             SparseMatPtr s, TensorPtr x,
                                             SparseMatPtr norm_adj,
                                             SparseMatPtr norm_adj_high,
                                             SparseMatPtr x_sparse = nullptr);

}  // namespace sccd
