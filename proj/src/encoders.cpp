#include "sccd/encoders.hpp"

#include <cmath>

#include "sccd/errors.hpp"

namespace sccd {

Perceptron make_perceptron(Index in, Index hidden, Index out, Rng& rng) {
  Perceptron p;
  p.w1 = glorot_param(in, hidden, rng);
  p.b1 = zeros_param(1, hidden);
  p.w2 = glorot_param(hidden, out, rng);
  p.b2 = zeros_param(1, out);
  return p;
}

std::vector<TensorPtr> SssParams::trainable() const {
  std::vector<TensorPtr> out = f_s.trainable();
  for (auto& t : f_x.trainable()) out.push_back(t);
  return out;
}

SssParams make_sss_params(Index n_nodes, Index n_attrs, Index hidden, Index d,
                          Rng& rng) {
  SssParams p;
  p.f_s = make_perceptron(n_nodes, hidden, d, rng);
  p.f_x = make_perceptron(n_attrs, hidden, d, rng);
  return p;
}

GcnParams make_gcn_params(Index in, Index hidden, Index out, Rng& rng) {
  GcnParams p;
  p.w1 = glorot_param(in, hidden, rng);
  p.b1 = zeros_param(1, hidden);
  p.w2 = glorot_param(hidden, out, rng);
  p.b2 = zeros_param(1, out);
  return p;
}

Csr normalize_adjacency(const Csr& adj) {
  const Index n = adj.rows;
  std::vector<double> inv_sqrt_deg(n);
  for (Index i = 0; i < n; ++i) {
    const Index deg_hat = (adj.offsets[i + 1] - adj.offsets[i]) + 1;
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(deg_hat));
  }

  Csr out;
  out.rows = out.cols = n;
  out.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i)
    out.offsets[i + 1] =
        out.offsets[i] + (adj.offsets[i + 1] - adj.offsets[i]) + 1;
  out.targets.resize(out.offsets[n]);
  out.values.resize(out.offsets[n]);
  for (Index i = 0; i < n; ++i) {
    Index w = out.offsets[i];
    bool diag_done = false;
    for (Index k = adj.offsets[i]; k < adj.offsets[i + 1]; ++k) {
      const Index j = adj.targets[k];
      if (j == i)
        throw dimension_error("normalize_adjacency: self-loop on node " +
                              std::to_string(i));
      if (!diag_done && j > i) {
        out.targets[w] = i;
        out.values[w] = inv_sqrt_deg[i] * inv_sqrt_deg[i];
        ++w;
        diag_done = true;
      }
      out.targets[w] = j;
      out.values[w] = inv_sqrt_deg[i] * inv_sqrt_deg[j];
      ++w;
    }
    if (!diag_done) {
      out.targets[w] = i;
      out.values[w] = inv_sqrt_deg[i] * inv_sqrt_deg[i];
    }
  }
  return out;
}

TensorPtr mlp2_forward(Tape& tape, const Perceptron& p, TensorPtr x) {
  auto h = tape.relu(tape.add_rowvec(tape.matmul(x, p.w1), p.b1));
  return tape.add_rowvec(tape.matmul(h, p.w2), p.b2);
}

TensorPtr mlp2_forward(Tape& tape, const Perceptron& p, SparseMatPtr x) {
  auto h = tape.relu(tape.add_rowvec(tape.sparse_matmul(x, p.w1), p.b1));
  return tape.add_rowvec(tape.matmul(h, p.w2), p.b2);
}

std::pair<TensorPtr, TensorPtr> sss_forward(Tape& tape, const SssParams& p,
                                            SparseMatPtr s, TensorPtr x,
                                            SparseMatPtr x_sparse) {
  auto s_feat = mlp2_forward(tape, p.f_s, s);
  auto x_feat = x_sparse ? mlp2_forward(tape, p.f_x, x_sparse)
                         : mlp2_forward(tape, p.f_x, x);
  return {s_feat, x_feat};
}

TensorPtr aggregate(Tape& tape, TensorPtr s_feat, TensorPtr x_feat) {
  return tape.concat_cols(s_feat, x_feat);
}

TensorPtr gcn_forward(Tape& tape, const GcnParams& p, SparseMatPtr norm_adj,
                      TensorPtr h0) {
  auto h1 = tape.relu(tape.add_rowvec(
      tape.sparse_matmul(norm_adj, tape.matmul(h0, p.w1)), p.b1));
  return tape.add_rowvec(
      tape.sparse_matmul(norm_adj, tape.matmul(h1, p.w2)), p.b2);
}

std::pair<TensorPtr, TensorPtr> encode_views(Tape& tape, const SssParams& sss,
                                             const GcnParams& gcn,
                                             SparseMatPtr s, TensorPtr x,
                                             SparseMatPtr norm_adj,
                                             SparseMatPtr norm_adj_high,
                                             SparseMatPtr x_sparse) {
  auto [s_feat, x_feat] = sss_forward(tape, sss, s, x, x_sparse);
  auto h0 = aggregate(tape, s_feat, x_feat);
  // The projected input is shared, so one parameter set drives both views;
  // only the propagation matrix differs.
  auto p1 = tape.matmul(h0, gcn.w1);
  auto encode = [&](SparseMatPtr a) {
    auto h1 = tape.relu(tape.add_rowvec(tape.sparse_matmul(a, p1), gcn.b1));
    return tape.add_rowvec(tape.sparse_matmul(a, tape.matmul(h1, gcn.w2)),
                           gcn.b2);
  };
  return {encode(norm_adj), encode(norm_adj_high)};
}

}  // namespace sccd
