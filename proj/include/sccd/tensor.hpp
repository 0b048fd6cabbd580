#pragma once

#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sccd/kernels.hpp"
#include "sccd/rng.hpp"

namespace sccd {

/// Dense row-major 2-D value. Gradient storage is allocated lazily the first
/// time a backward pass reaches the tensor; accumulation is additive until
/// zero_grad().
struct Tensor {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> data;
  bool requires_grad = false;
  std::vector<double> grad;

  Tensor() = default;
  Tensor(Index r, Index c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  Index size() const { return rows * cols; }
  double& at(Index i, Index j) { return data[i * cols + j]; }
  double at(Index i, Index j) const { return data[i * cols + j]; }
  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
  }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
  bool finite() const;
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(Index rows, Index cols, bool requires_grad = false);
TensorPtr make_tensor(Index rows, Index cols, std::initializer_list<double> v,
                      bool requires_grad = false);

/// Glorot-uniform parameter: U(-l, l) with l = sqrt(6 / (fan_in + fan_out)).
TensorPtr glorot_param(Index rows, Index cols, Rng& rng);
/// Zero-initialized trainable bias row.
TensorPtr zeros_param(Index rows, Index cols);

/// Constant sparse operand with a cached transpose for backward products.
/// For symmetric matrices the transpose is shared with the matrix itself.
struct SparseMat {
  Csr mat;
  Csr t;  // empty when symmetric

  static std::shared_ptr<const SparseMat> symmetric(Csr m);
  static std::shared_ptr<const SparseMat> general(Csr m);
  const Csr& transposed() const { return t.offsets.empty() ? mat : t; }
};
using SparseMatPtr = std::shared_ptr<const SparseMat>;

/// Reverse-mode tape over dense primitives. Record order is execution order;
/// backward() replays it exactly reversed, accumulating additively into every
/// tensor on the path to a requires_grad leaf. Rebuilt each epoch; one tape is
/// single-threaded, distinct tapes may run on distinct threads.
class Tape {
 public:
  TensorPtr matmul(TensorPtr a, TensorPtr b);
  /// a . b^T (rows of b are the right-hand vectors).
  TensorPtr matmul_nt(TensorPtr a, TensorPtr b);
  TensorPtr sparse_matmul(SparseMatPtr s, TensorPtr x);
  TensorPtr add(TensorPtr a, TensorPtr b);
  /// Broadcast a 1 x cols bias row over every row of a.
  TensorPtr add_rowvec(TensorPtr a, TensorPtr bias);
  TensorPtr sub(TensorPtr a, TensorPtr b);
  TensorPtr mul(TensorPtr a, TensorPtr b);
  TensorPtr div(TensorPtr a, TensorPtr b);
  TensorPtr scale(TensorPtr a, double c);
  TensorPtr relu(TensorPtr a);
  /// exp(alpha * x), fused so similarity matrices stay single-buffer.
  TensorPtr exp_scaled(TensorPtr a, double alpha);
  TensorPtr log(TensorPtr a);
  TensorPtr concat_cols(TensorPtr a, TensorPtr b);
  /// Rows scaled to unit L2 norm; rows with norm <= eps divide by eps.
  TensorPtr row_l2_normalize(TensorPtr a, double eps = 1e-12);
  TensorPtr row_sum(TensorPtr a);                          // rows x 1
  TensorPtr col_sum(TensorPtr a);                          // cols x 1
  TensorPtr diag(TensorPtr a);                             // rows x 1
  TensorPtr masked_row_sum(TensorPtr a, SparseMatPtr mask);  // rows x 1
  TensorPtr masked_col_sum(TensorPtr a, SparseMatPtr mask);  // cols x 1
  TensorPtr sum_all(TensorPtr a);                          // 1 x 1
  /// Mean negative log-likelihood of `labels` over `subset` rows of logits.
  TensorPtr cross_entropy(TensorPtr logits, std::span<const int> labels,
                          std::span<const Index> subset);

  /// Accumulate d loss / d tensor into every tensor reached from `loss`.
  /// loss must be 1 x 1.
  void backward(TensorPtr loss);

  std::size_t steps() const { return steps_.size(); }
  void clear() { steps_.clear(); }

 private:
  struct Step {
    TensorPtr out;
    std::function<void()> back;
  };
  std::vector<Step> steps_;

  TensorPtr out_like(Index rows, Index cols, bool needs);
  void record(TensorPtr out, std::function<void()> back);
};

}  // namespace sccd
