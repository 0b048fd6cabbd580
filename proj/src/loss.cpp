#include "sccd/loss.hpp"

#include <cmath>

#include "sccd/errors.hpp"

namespace sccd {

PairContext PairContext::from_high_adj(Csr high, double tau) {
  if (tau <= 0.0)
    throw config_error("temperature must be positive, got " +
                       std::to_string(tau));
  PairContext ctx;
  ctx.high_mask = SparseMat::symmetric(std::move(high));
  ctx.tau = tau;
  return ctx;
}

void l2_normalize_rows(Tensor& z, double eps) {
  for (Index i = 0; i < z.rows; ++i) {
    double* row = z.data.data() + i * z.cols;
    double sq = 0.0;
    for (Index j = 0; j < z.cols; ++j) sq += row[j] * row[j];
    const double norm = std::max(std::sqrt(sq), eps);
    for (Index j = 0; j < z.cols; ++j) row[j] /= norm;
  }
}

double node_loss(Index i, int view, const Tensor& z1n, const Tensor& z2n,
                 const PairContext& ctx) {
  if (view != 1 && view != 2)
    throw contract_error("node_loss: view must be 1 or 2");
  if (z1n.rows != z2n.rows || z1n.cols != z2n.cols)
    throw dimension_error("node_loss: embedding shapes differ");
  const Tensor& own = (view == 1) ? z1n : z2n;    // anchor's view
  const Tensor& other = (view == 1) ? z2n : z1n;  // opposite view
  const Index n = own.rows;
  const Index d = own.cols;
  const double inv_tau = 1.0 / ctx.tau;

  auto sim_to = [&](const Tensor& m, Index j) {
    double dot = 0.0;
    for (Index k = 0; k < d; ++k) dot += own.at(i, k) * m.at(j, k);
    return dot;
  };

  auto neigh = ctx.high_neighbors(i);
  double pos = 0.0;
  for (Index j : neigh)
    pos += std::exp(sim_to(own, j) * inv_tau) +
           std::exp(sim_to(other, j) * inv_tau);
  const double self_pair = std::exp(sim_to(other, i) * inv_tau);

  double neg = 0.0;
  std::size_t cursor = 0;
  for (Index j = 0; j < n; ++j) {
    if (j == i) continue;  // never its own negative; self pair is a positive
    if (cursor < neigh.size() && neigh[cursor] == j) {
      ++cursor;
      continue;
    }
    neg += std::exp(sim_to(own, j) * inv_tau) +
           std::exp(sim_to(other, j) * inv_tau);
  }

  const double count = static_cast<double>(ctx.positive_count(i));
  const double numer = (pos + self_pair) / count;
  const double denom = neg + pos + self_pair;
  return -std::log(numer / denom);
}

TensorPtr total_loss(Tape& tape, TensorPtr z1, TensorPtr z2,
                     const PairContext& ctx) {
  if (z1->rows != z2->rows || z1->cols != z2->cols)
    throw dimension_error("total_loss: embedding shapes differ");
  if (z1->rows != ctx.n_nodes())
    throw dimension_error("total_loss: " + std::to_string(z1->rows) +
                          " embeddings for " + std::to_string(ctx.n_nodes()) +
                          " nodes");
  if (ctx.tau <= 0.0)
    throw config_error("temperature must be positive, got " +
                       std::to_string(ctx.tau));
  const Index n = z1->rows;
  const double inv_tau = 1.0 / ctx.tau;

  auto z1n = tape.row_l2_normalize(z1);
  auto z2n = tape.row_l2_normalize(z2);

  auto e11 = tape.exp_scaled(tape.matmul_nt(z1n, z1n), inv_tau);
  auto e22 = tape.exp_scaled(tape.matmul_nt(z2n, z2n), inv_tau);
  auto e12 = tape.exp_scaled(tape.matmul_nt(z1n, z2n), inv_tau);

  auto r11 = tape.row_sum(e11);
  auto r22 = tape.row_sum(e22);
  auto r12 = tape.row_sum(e12);
  auto c12 = tape.col_sum(e12);
  auto d11 = tape.diag(e11);
  auto d22 = tape.diag(e22);
  auto d12 = tape.diag(e12);
  auto p11 = tape.masked_row_sum(e11, ctx.high_mask);
  auto p22 = tape.masked_row_sum(e22, ctx.high_mask);
  auto p12 = tape.masked_row_sum(e12, ctx.high_mask);
  auto q12 = tape.masked_col_sum(e12, ctx.high_mask);

  // Anchor in view v: numerator = positives + inter-view self pair;
  // denominator = numerator + negatives, which telescopes to the full
  // row/column sums minus the intra-view self term.
  auto num1 = tape.add(tape.add(p11, p12), d12);
  auto den1 = tape.add(tape.sub(r11, d11), r12);
  auto num2 = tape.add(tape.add(p22, q12), d12);
  auto den2 = tape.add(tape.sub(r22, d22), c12);

  // l(z_i) = log(den) - log(num) + log(2 |N^H(i)| + 1)
  auto log_counts = make_tensor(n, 1);
  for (Index i = 0; i < n; ++i)
    log_counts->data[i] =
        2.0 * std::log(static_cast<double>(ctx.positive_count(i)));
  auto per_node =
      tape.add(tape.sub(tape.add(tape.log(den1), tape.log(den2)),
                        tape.add(tape.log(num1), tape.log(num2))),
               log_counts);
  return tape.scale(tape.sum_all(per_node), 1.0 / (2.0 * static_cast<double>(n)));
}

}  // namespace sccd
