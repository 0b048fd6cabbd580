#include "sccd/kernels.hpp"

#include <cblas.h>

#include <algorithm>
#include <cstring>

extern "C" void openblas_set_num_threads(int);

namespace sccd {

Csr transpose(const Csr& a) {
  Csr t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.offsets.assign(static_cast<std::size_t>(t.rows) + 1, 0);
  t.targets.resize(a.targets.size());
  const bool weighted = !a.values.empty();
  if (weighted) t.values.resize(a.values.size());

  for (Index k = 0; k < a.nnz(); ++k) t.offsets[a.targets[k] + 1]++;
  for (Index r = 0; r < t.rows; ++r) t.offsets[r + 1] += t.offsets[r];

  std::vector<Index> cursor(t.offsets.begin(), t.offsets.end() - 1);
  for (Index r = 0; r < a.rows; ++r) {
    for (Index k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      Index pos = cursor[a.targets[k]]++;
      t.targets[pos] = r;  // rows visited in order, so columns stay sorted
      if (weighted) t.values[pos] = a.values[k];
    }
  }
  return t;
}

namespace kernels {
namespace {

constexpr Index kRowChunk = 256;

struct BlasSingleThreadInit {
  BlasSingleThreadInit() { openblas_set_num_threads(1); }
};
const BlasSingleThreadInit blas_init;

void clear_if(double* c, Index len, bool acc) {
  if (!acc) std::memset(c, 0, sizeof(double) * static_cast<std::size_t>(len));
}

}  // namespace

void matmul_serial(const double* a, const double* b, double* c, Index m,
                   Index k, Index n, bool acc) {
  clear_if(c, m * n, acc);
  for (Index i = 0; i < m; ++i) {
    for (Index p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b + p * n;
      double* crow = c + i * n;
      for (Index j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul(const double* a, const double* b, double* c, Index m, Index k,
            Index n, bool acc) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    clear_if(c, m * n, acc);
    return;
  }
  const double beta = acc ? 1.0 : 0.0;
  const Index chunks = (m + kRowChunk - 1) / kRowChunk;
#pragma omp parallel for schedule(dynamic) if (chunks > 1)
  for (Index ci = 0; ci < chunks; ++ci) {
    const Index r0 = ci * kRowChunk;
    const Index rows = std::min(kRowChunk, m - r0);
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans,
                static_cast<int>(rows), static_cast<int>(n),
                static_cast<int>(k), 1.0, a + r0 * k, static_cast<int>(k), b,
                static_cast<int>(n), beta, c + r0 * n, static_cast<int>(n));
  }
}

void matmul_nt_serial(const double* a, const double* b, double* c, Index m,
                      Index k, Index n, bool acc) {
  for (Index i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (Index j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double dot = 0.0;
      for (Index p = 0; p < k; ++p) dot += arow[p] * brow[p];
      c[i * n + j] = acc ? c[i * n + j] + dot : dot;
    }
  }
}

void matmul_nt(const double* a, const double* b, double* c, Index m, Index k,
               Index n, bool acc) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    clear_if(c, m * n, acc);
    return;
  }
  const double beta = acc ? 1.0 : 0.0;
  const Index chunks = (m + kRowChunk - 1) / kRowChunk;
#pragma omp parallel for schedule(dynamic) if (chunks > 1)
  for (Index ci = 0; ci < chunks; ++ci) {
    const Index r0 = ci * kRowChunk;
    const Index rows = std::min(kRowChunk, m - r0);
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans,
                static_cast<int>(rows), static_cast<int>(n),
                static_cast<int>(k), 1.0, a + r0 * k, static_cast<int>(k), b,
                static_cast<int>(k), beta, c + r0 * n, static_cast<int>(n));
  }
}

void matmul_tn_serial(const double* a, const double* b, double* c, Index m,
                      Index k, Index n, bool acc) {
  clear_if(c, m * n, acc);
  for (Index p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (Index i = 0; i < m; ++i) {
      const double av = arow[i];
      if (av == 0.0) continue;
      double* crow = c + i * n;
      for (Index j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_tn(const double* a, const double* b, double* c, Index m, Index k,
               Index n, bool acc) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    clear_if(c, m * n, acc);
    return;
  }
  const double beta = acc ? 1.0 : 0.0;
  // Chunk over output rows, i.e. column blocks of A (addressable via lda).
  const Index chunks = (m + kRowChunk - 1) / kRowChunk;
#pragma omp parallel for schedule(dynamic) if (chunks > 1)
  for (Index ci = 0; ci < chunks; ++ci) {
    const Index r0 = ci * kRowChunk;
    const Index rows = std::min(kRowChunk, m - r0);
    cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans,
                static_cast<int>(rows), static_cast<int>(n),
                static_cast<int>(k), 1.0, a + r0, static_cast<int>(m), b,
                static_cast<int>(n), beta, c + r0 * n, static_cast<int>(n));
  }
}

void spmm_serial(const Csr& s, const double* x, double* y, Index n, bool acc) {
  const bool weighted = !s.values.empty();
  for (Index i = 0; i < s.rows; ++i) {
    double* yrow = y + i * n;
    clear_if(yrow, n, acc);
    for (Index k = s.offsets[i]; k < s.offsets[i + 1]; ++k) {
      const double w = weighted ? s.values[k] : 1.0;
      const double* xrow = x + s.targets[k] * n;
      for (Index j = 0; j < n; ++j) yrow[j] += w * xrow[j];
    }
  }
}

void spmm(const Csr& s, const double* x, double* y, Index n, bool acc) {
  const bool weighted = !s.values.empty();
#pragma omp parallel for schedule(static) if (s.rows > 64)
  for (Index i = 0; i < s.rows; ++i) {
    double* yrow = y + i * n;
    clear_if(yrow, n, acc);
    for (Index k = s.offsets[i]; k < s.offsets[i + 1]; ++k) {
      const double w = weighted ? s.values[k] : 1.0;
      const double* xrow = x + s.targets[k] * n;
      for (Index j = 0; j < n; ++j) yrow[j] += w * xrow[j];
    }
  }
}

}  // namespace kernels
}  // namespace sccd
