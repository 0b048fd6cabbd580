#include "sccd/tensor.hpp"

#include <cmath>

#include "sccd/errors.hpp"

namespace sccd {
namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw dimension_error(std::string(op) + ": shapes " + shape_str(a) +
                          " and " + shape_str(b) + " differ");
}

bool needs(const TensorPtr& t) { return t->requires_grad; }

}  // namespace

bool Tensor::finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

TensorPtr make_tensor(Index rows, Index cols, bool requires_grad) {
  auto t = std::make_shared<Tensor>(rows, cols);
  t->requires_grad = requires_grad;
  return t;
}

TensorPtr make_tensor(Index rows, Index cols, std::initializer_list<double> v,
                      bool requires_grad) {
  auto t = make_tensor(rows, cols, requires_grad);
  if (static_cast<Index>(v.size()) != rows * cols)
    throw dimension_error("make_tensor: initializer size " +
                          std::to_string(v.size()) + " != " +
                          std::to_string(rows * cols));
  std::copy(v.begin(), v.end(), t->data.begin());
  return t;
}

TensorPtr glorot_param(Index rows, Index cols, Rng& rng) {
  auto t = make_tensor(rows, cols, true);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& x : t->data) x = rng.uniform(-limit, limit);
  return t;
}

TensorPtr zeros_param(Index rows, Index cols) {
  return make_tensor(rows, cols, true);
}

std::shared_ptr<const SparseMat> SparseMat::symmetric(Csr m) {
  auto s = std::make_shared<SparseMat>();
  s->mat = std::move(m);
  return s;
}

std::shared_ptr<const SparseMat> SparseMat::general(Csr m) {
  auto s = std::make_shared<SparseMat>();
  s->t = transpose(m);
  s->mat = std::move(m);
  return s;
}

TensorPtr Tape::out_like(Index rows, Index cols, bool needs_grad) {
  auto t = make_tensor(rows, cols, needs_grad);
  return t;
}

void Tape::record(TensorPtr out, std::function<void()> back) {
  if (out->requires_grad) steps_.push_back({std::move(out), std::move(back)});
}

TensorPtr Tape::matmul(TensorPtr a, TensorPtr b) {
  if (a->cols != b->rows)
    throw dimension_error("matmul: " + shape_str(*a) + " . " + shape_str(*b));
  auto out = out_like(a->rows, b->cols, needs(a) || needs(b));
  kernels::matmul(a->data.data(), b->data.data(), out->data.data(), a->rows,
                  a->cols, b->cols);
  record(out, [a, b, out] {
    if (needs(a)) {
      a->ensure_grad();
      kernels::matmul_nt(out->grad.data(), b->data.data(), a->grad.data(),
                         out->rows, out->cols, b->rows, /*acc=*/true);
    }
    if (needs(b)) {
      b->ensure_grad();
      kernels::matmul_tn(a->data.data(), out->grad.data(), b->grad.data(),
                         a->cols, a->rows, out->cols, /*acc=*/true);
    }
  });
  return out;
}

TensorPtr Tape::matmul_nt(TensorPtr a, TensorPtr b) {
  if (a->cols != b->cols)
    throw dimension_error("matmul_nt: " + shape_str(*a) + " . " +
                          shape_str(*b) + "^T");
  auto out = out_like(a->rows, b->rows, needs(a) || needs(b));
  kernels::matmul_nt(a->data.data(), b->data.data(), out->data.data(), a->rows,
                     a->cols, b->rows);
  record(out, [a, b, out] {
    if (needs(a)) {
      a->ensure_grad();
      kernels::matmul(out->grad.data(), b->data.data(), a->grad.data(),
                      out->rows, out->cols, b->cols, /*acc=*/true);
    }
    if (needs(b)) {
      b->ensure_grad();
      kernels::matmul_tn(out->grad.data(), a->data.data(), b->grad.data(),
                         out->cols, out->rows, a->cols, /*acc=*/true);
    }
  });
  return out;
}

TensorPtr Tape::sparse_matmul(SparseMatPtr s, TensorPtr x) {
  if (s->mat.cols != x->rows)
    throw dimension_error("sparse_matmul: " + std::to_string(s->mat.rows) +
                          "x" + std::to_string(s->mat.cols) + " . " +
                          shape_str(*x));
  auto out = out_like(s->mat.rows, x->cols, needs(x));
  kernels::spmm(s->mat, x->data.data(), out->data.data(), x->cols);
  record(out, [s, x, out] {
    x->ensure_grad();
    kernels::spmm(s->transposed(), out->grad.data(), x->grad.data(), x->cols,
                  /*acc=*/true);
  });
  return out;
}

TensorPtr Tape::add(TensorPtr a, TensorPtr b) {
  require_same_shape("add", *a, *b);
  auto out = out_like(a->rows, a->cols, needs(a) || needs(b));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 16384)
  for (Index i = 0; i < n; ++i) out->data[i] = a->data[i] + b->data[i];
  record(out, [a, b, out] {
    const Index len = out->size();
    if (needs(a)) {
      a->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) a->grad[i] += out->grad[i];
    }
    if (needs(b)) {
      b->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) b->grad[i] += out->grad[i];
    }
  });
  return out;
}

TensorPtr Tape::add_rowvec(TensorPtr a, TensorPtr bias) {
  if (bias->rows != 1 || bias->cols != a->cols)
    throw dimension_error("add_rowvec: bias " + shape_str(*bias) +
                          " does not broadcast over " + shape_str(*a));
  auto out = out_like(a->rows, a->cols, needs(a) || needs(bias));
  const Index rows = a->rows, cols = a->cols;
#pragma omp parallel for schedule(static) if (rows * cols > 16384)
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      out->data[i * cols + j] = a->data[i * cols + j] + bias->data[j];
  record(out, [a, bias, out] {
    const Index r = out->rows, c = out->cols;
    if (needs(a)) {
      a->ensure_grad();
      const Index len = out->size();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) a->grad[i] += out->grad[i];
    }
    if (needs(bias)) {
      bias->ensure_grad();
      // fixed row order keeps the reduction deterministic
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) bias->grad[j] += out->grad[i * c + j];
    }
  });
  return out;
}

TensorPtr Tape::sub(TensorPtr a, TensorPtr b) {
  require_same_shape("sub", *a, *b);
  auto out = out_like(a->rows, a->cols, needs(a) || needs(b));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 16384)
  for (Index i = 0; i < n; ++i) out->data[i] = a->data[i] - b->data[i];
  record(out, [a, b, out] {
    const Index len = out->size();
    if (needs(a)) {
      a->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) a->grad[i] += out->grad[i];
    }
    if (needs(b)) {
      b->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) b->grad[i] -= out->grad[i];
    }
  });
  return out;
}

TensorPtr Tape::mul(TensorPtr a, TensorPtr b) {
  require_same_shape("mul", *a, *b);
  auto out = out_like(a->rows, a->cols, needs(a) || needs(b));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 16384)
  for (Index i = 0; i < n; ++i) out->data[i] = a->data[i] * b->data[i];
  record(out, [a, b, out] {
    const Index len = out->size();
    if (needs(a)) {
      a->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) a->grad[i] += out->grad[i] * b->data[i];
    }
    if (needs(b)) {
      b->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) b->grad[i] += out->grad[i] * a->data[i];
    }
  });
  return out;
}

TensorPtr Tape::div(TensorPtr a, TensorPtr b) {
  require_same_shape("div", *a, *b);
  auto out = out_like(a->rows, a->cols, needs(a) || needs(b));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 16384)
  for (Index i = 0; i < n; ++i) out->data[i] = a->data[i] / b->data[i];
  record(out, [a, b, out] {
    const Index len = out->size();
    if (needs(a)) {
      a->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i) a->grad[i] += out->grad[i] / b->data[i];
    }
    if (needs(b)) {
      b->ensure_grad();
#pragma omp parallel for schedule(static) if (len > 16384)
      for (Index i = 0; i < len; ++i)
        b->grad[i] -= out->grad[i] * a->data[i] / (b->data[i] * b->data[i]);
    }
  });
  return out;
}

TensorPtr Tape::scale(TensorPtr a, double c) {
  auto out = out_like(a->rows, a->cols, needs(a));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 16384)
  for (Index i = 0; i < n; ++i) out->data[i] = c * a->data[i];
  record(out, [a, out, c] {
    a->ensure_grad();
    const Index len = out->size();
#pragma omp parallel for schedule(static) if (len > 16384)
    for (Index i = 0; i < len; ++i) a->grad[i] += c * out->grad[i];
  });
  return out;
}

TensorPtr Tape::relu(TensorPtr a) {
  auto out = out_like(a->rows, a->cols, needs(a));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 16384)
  for (Index i = 0; i < n; ++i)
    out->data[i] = a->data[i] > 0.0 ? a->data[i] : 0.0;
  record(out, [a, out] {
    a->ensure_grad();
    const Index len = out->size();
#pragma omp parallel for schedule(static) if (len > 16384)
    for (Index i = 0; i < len; ++i)
      if (a->data[i] > 0.0) a->grad[i] += out->grad[i];
  });
  return out;
}

TensorPtr Tape::exp_scaled(TensorPtr a, double alpha) {
  auto out = out_like(a->rows, a->cols, needs(a));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 4096)
  for (Index i = 0; i < n; ++i) out->data[i] = std::exp(alpha * a->data[i]);
  record(out, [a, out, alpha] {
    a->ensure_grad();
    const Index len = out->size();
#pragma omp parallel for schedule(static) if (len > 4096)
    for (Index i = 0; i < len; ++i)
      a->grad[i] += alpha * out->grad[i] * out->data[i];
  });
  return out;
}

TensorPtr Tape::log(TensorPtr a) {
  auto out = out_like(a->rows, a->cols, needs(a));
  const Index n = out->size();
#pragma omp parallel for schedule(static) if (n > 4096)
  for (Index i = 0; i < n; ++i) out->data[i] = std::log(a->data[i]);
  record(out, [a, out] {
    a->ensure_grad();
    const Index len = out->size();
#pragma omp parallel for schedule(static) if (len > 4096)
    for (Index i = 0; i < len; ++i) a->grad[i] += out->grad[i] / a->data[i];
  });
  return out;
}

TensorPtr Tape::concat_cols(TensorPtr a, TensorPtr b) {
  if (a->rows != b->rows)
    throw dimension_error("concat_cols: row counts " + shape_str(*a) + " vs " +
                          shape_str(*b));
  auto out = out_like(a->rows, a->cols + b->cols, needs(a) || needs(b));
  const Index rows = a->rows, ca = a->cols, cb = b->cols;
#pragma omp parallel for schedule(static) if (rows * (ca + cb) > 16384)
  for (Index i = 0; i < rows; ++i) {
    double* orow = out->data.data() + i * (ca + cb);
    const double* arow = a->data.data() + i * ca;
    const double* brow = b->data.data() + i * cb;
    for (Index j = 0; j < ca; ++j) orow[j] = arow[j];
    for (Index j = 0; j < cb; ++j) orow[ca + j] = brow[j];
  }
  record(out, [a, b, out] {
    const Index r = out->rows, ca2 = a->cols, cb2 = b->cols;
    if (needs(a)) {
      a->ensure_grad();
#pragma omp parallel for schedule(static) if (r * ca2 > 16384)
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < ca2; ++j)
          a->grad[i * ca2 + j] += out->grad[i * (ca2 + cb2) + j];
    }
    if (needs(b)) {
      b->ensure_grad();
#pragma omp parallel for schedule(static) if (r * cb2 > 16384)
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < cb2; ++j)
          b->grad[i * cb2 + j] += out->grad[i * (ca2 + cb2) + ca2 + j];
    }
  });
  return out;
}

TensorPtr Tape::row_l2_normalize(TensorPtr a, double eps) {
  auto out = out_like(a->rows, a->cols, needs(a));
  auto norms = std::make_shared<std::vector<double>>(a->rows);
  const Index rows = a->rows, cols = a->cols;
#pragma omp parallel for schedule(static) if (rows * cols > 16384)
  for (Index i = 0; i < rows; ++i) {
    const double* arow = a->data.data() + i * cols;
    double sq = 0.0;
    for (Index j = 0; j < cols; ++j) sq += arow[j] * arow[j];
    const double norm = std::max(std::sqrt(sq), eps);
    (*norms)[i] = norm;
    double* orow = out->data.data() + i * cols;
    for (Index j = 0; j < cols; ++j) orow[j] = arow[j] / norm;
  }
  record(out, [a, out, norms, eps] {
    a->ensure_grad();
    const Index r = out->rows, c = out->cols;
#pragma omp parallel for schedule(static) if (r * c > 16384)
    for (Index i = 0; i < r; ++i) {
      const double norm = (*norms)[i];
      const double* orow = out->data.data() + i * c;
      const double* grow = out->grad.data() + i * c;
      double* arow = a->grad.data() + i * c;
      if (norm <= eps) {
        // below the guard the map is x / eps, a plain linear scaling
        for (Index j = 0; j < c; ++j) arow[j] += grow[j] / eps;
      } else {
        double dot = 0.0;
        for (Index j = 0; j < c; ++j) dot += orow[j] * grow[j];
        for (Index j = 0; j < c; ++j)
          arow[j] += (grow[j] - dot * orow[j]) / norm;
      }
    }
  });
  return out;
}

TensorPtr Tape::row_sum(TensorPtr a) {
  auto out = out_like(a->rows, 1, needs(a));
  const Index rows = a->rows, cols = a->cols;
#pragma omp parallel for schedule(static) if (rows * cols > 16384)
  for (Index i = 0; i < rows; ++i) {
    const double* arow = a->data.data() + i * cols;
    double s = 0.0;
    for (Index j = 0; j < cols; ++j) s += arow[j];
    out->data[i] = s;
  }
  record(out, [a, out] {
    a->ensure_grad();
    const Index r = a->rows, c = a->cols;
#pragma omp parallel for schedule(static) if (r * c > 16384)
    for (Index i = 0; i < r; ++i) {
      const double g = out->grad[i];
      double* arow = a->grad.data() + i * c;
      for (Index j = 0; j < c; ++j) arow[j] += g;
    }
  });
  return out;
}

TensorPtr Tape::col_sum(TensorPtr a) {
  auto out = out_like(a->cols, 1, needs(a));
  const Index rows = a->rows, cols = a->cols;
#pragma omp parallel for schedule(static) if (rows * cols > 16384)
  for (Index j = 0; j < cols; ++j) {
    double s = 0.0;
    for (Index i = 0; i < rows; ++i) s += a->data[i * cols + j];
    out->data[j] = s;
  }
  record(out, [a, out] {
    a->ensure_grad();
    const Index r = a->rows, c = a->cols;
#pragma omp parallel for schedule(static) if (r * c > 16384)
    for (Index i = 0; i < r; ++i) {
      double* arow = a->grad.data() + i * c;
      for (Index j = 0; j < c; ++j) arow[j] += out->grad[j];
    }
  });
  return out;
}

TensorPtr Tape::diag(TensorPtr a) {
  if (a->rows != a->cols)
    throw dimension_error("diag: matrix " + shape_str(*a) + " is not square");
  auto out = out_like(a->rows, 1, needs(a));
  for (Index i = 0; i < a->rows; ++i) out->data[i] = a->at(i, i);
  record(out, [a, out] {
    a->ensure_grad();
    for (Index i = 0; i < a->rows; ++i)
      a->grad[i * a->cols + i] += out->grad[i];
  });
  return out;
}

TensorPtr Tape::masked_row_sum(TensorPtr a, SparseMatPtr mask) {
  if (mask->mat.rows != a->rows || mask->mat.cols != a->cols)
    throw dimension_error("masked_row_sum: mask " +
                          std::to_string(mask->mat.rows) + "x" +
                          std::to_string(mask->mat.cols) + " vs " +
                          shape_str(*a));
  auto out = out_like(a->rows, 1, needs(a));
  const Csr& m = mask->mat;
#pragma omp parallel for schedule(static) if (m.nnz() > 16384)
  for (Index i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (Index k = m.offsets[i]; k < m.offsets[i + 1]; ++k)
      s += a->data[i * a->cols + m.targets[k]];
    out->data[i] = s;
  }
  record(out, [a, mask, out] {
    a->ensure_grad();
    const Csr& mm = mask->mat;
#pragma omp parallel for schedule(static) if (mm.nnz() > 16384)
    for (Index i = 0; i < mm.rows; ++i) {
      const double g = out->grad[i];
      for (Index k = mm.offsets[i]; k < mm.offsets[i + 1]; ++k)
        a->grad[i * a->cols + mm.targets[k]] += g;
    }
  });
  return out;
}

TensorPtr Tape::masked_col_sum(TensorPtr a, SparseMatPtr mask) {
  if (mask->mat.rows != a->rows || mask->mat.cols != a->cols)
    throw dimension_error("masked_col_sum: mask " +
                          std::to_string(mask->mat.rows) + "x" +
                          std::to_string(mask->mat.cols) + " vs " +
                          shape_str(*a));
  auto out = out_like(a->cols, 1, needs(a));
  const Csr& mt = mask->transposed();
#pragma omp parallel for schedule(static) if (mt.nnz() > 16384)
  for (Index i = 0; i < mt.rows; ++i) {
    double s = 0.0;
    for (Index k = mt.offsets[i]; k < mt.offsets[i + 1]; ++k)
      s += a->data[mt.targets[k] * a->cols + i];
    out->data[i] = s;
  }
  record(out, [a, mask, out] {
    a->ensure_grad();
    const Csr& mt2 = mask->transposed();
#pragma omp parallel for schedule(static) if (mt2.nnz() > 16384)
    for (Index i = 0; i < mt2.rows; ++i) {
      const double g = out->grad[i];
      for (Index k = mt2.offsets[i]; k < mt2.offsets[i + 1]; ++k)
        a->grad[mt2.targets[k] * a->cols + i] += g;
    }
  });
  return out;
}

TensorPtr Tape::sum_all(TensorPtr a) {
  auto out = out_like(1, 1, needs(a));
  double s = 0.0;  // fixed order, independent of thread count
  for (double v : a->data) s += v;
  out->data[0] = s;
  record(out, [a, out] {
    a->ensure_grad();
    const double g = out->grad[0];
    const Index len = a->size();
#pragma omp parallel for schedule(static) if (len > 16384)
    for (Index i = 0; i < len; ++i) a->grad[i] += g;
  });
  return out;
}

TensorPtr Tape::cross_entropy(TensorPtr logits, std::span<const int> labels,
                              std::span<const Index> subset) {
  if (static_cast<Index>(labels.size()) != logits->rows)
    throw dimension_error("cross_entropy: " + std::to_string(labels.size()) +
                          " labels for " + shape_str(*logits) + " logits");
  if (subset.empty())
    throw dimension_error("cross_entropy: empty node subset");
  const Index c = logits->cols;
  for (Index i : subset) {
    if (i < 0 || i >= logits->rows)
      throw dimension_error("cross_entropy: node " + std::to_string(i) +
                            " out of range");
    if (labels[i] < 0 || labels[i] >= c)
      throw dimension_error("cross_entropy: label " +
                            std::to_string(labels[i]) + " out of range for " +
                            std::to_string(c) + " classes");
  }
  auto out = out_like(1, 1, needs(logits));
  double total = 0.0;
  for (Index i : subset) {
    const double* row = logits->data.data() + i * c;
    double mx = row[0];
    for (Index j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double lse = 0.0;
    for (Index j = 0; j < c; ++j) lse += std::exp(row[j] - mx);
    total += mx + std::log(lse) - row[labels[i]];
  }
  out->data[0] = total / static_cast<double>(subset.size());

  std::vector<Index> subset_copy(subset.begin(), subset.end());
  std::vector<int> labels_copy(labels.begin(), labels.end());
  record(out,
         [logits, out, subset = std::move(subset_copy),
          labels = std::move(labels_copy)] {
           logits->ensure_grad();
           const Index cc = logits->cols;
           const double g = out->grad[0] / static_cast<double>(subset.size());
           for (Index i : subset) {
             const double* row = logits->data.data() + i * cc;
             double* grow = logits->grad.data() + i * cc;
             double mx = row[0];
             for (Index j = 1; j < cc; ++j) mx = std::max(mx, row[j]);
             double lse = 0.0;
             for (Index j = 0; j < cc; ++j) lse += std::exp(row[j] - mx);
             for (Index j = 0; j < cc; ++j)
               grow[j] += g * (std::exp(row[j] - mx) / lse -
                               (labels[i] == j ? 1.0 : 0.0));
           }
         });
  return out;
}

void Tape::backward(TensorPtr loss) {
  if (loss->rows != 1 || loss->cols != 1)
    throw contract_error("backward: loss must be 1x1, got " +
                         shape_str(*loss));
  if (!loss->requires_grad) return;  // constant: nothing to propagate
  // Intermediate (step output) gradients are scratch for this pass; only
  // leaves accumulate across repeated backward() calls.
  for (auto& s : steps_) {
    s.out->ensure_grad();
    s.out->zero_grad();
  }
  loss->ensure_grad();
  loss->grad[0] += 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) it->back();
}

}  // namespace sccd
