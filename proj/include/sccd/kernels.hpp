#pragma once

#include <cstdint>
#include <vector>

namespace sccd {

using Index = std::int64_t;

/// Compressed sparse row matrix. An empty `values` array means an implicit
/// weight of 1.0 on every stored entry (pattern-only matrices such as
/// adjacencies). Column indices inside each row are sorted ascending.
struct Csr {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> offsets;  // size rows+1
  std::vector<Index> targets;  // size nnz, sorted within each row
  std::vector<double> values;  // size nnz or empty

  Index nnz() const { return static_cast<Index>(targets.size()); }
  double value_at(Index k) const { return values.empty() ? 1.0 : values[k]; }
};

/// Transpose as a new CSR (counting sort over target columns).
Csr transpose(const Csr& a);

namespace kernels {

// Dense kernels operate on row-major buffers; `acc` accumulates into the
// output instead of overwriting it. Each kernel has a `_serial` reference
// implementation (plain loops, kept for tests and the bench target) and a
// production variant. Production dense products run one single-threaded BLAS
// call per fixed-size row chunk, with OpenMP distributing chunks; the chunk
// grid depends only on the shape, so results are bit-identical regardless of
// thread count.

/// C(m x n) = A(m x k) . B(k x n)
void matmul_serial(const double* a, const double* b, double* c, Index m,
                   Index k, Index n, bool acc = false);
void matmul(const double* a, const double* b, double* c, Index m, Index k,
            Index n, bool acc = false);

/// C(m x n) = A(m x k) . B(n x k)^T
void matmul_nt_serial(const double* a, const double* b, double* c, Index m,
                      Index k, Index n, bool acc = false);
void matmul_nt(const double* a, const double* b, double* c, Index m, Index k,
               Index n, bool acc = false);

/// C(m x n) = A(k x m)^T . B(k x n)
void matmul_tn_serial(const double* a, const double* b, double* c, Index m,
                      Index k, Index n, bool acc = false);
void matmul_tn(const double* a, const double* b, double* c, Index m, Index k,
               Index n, bool acc = false);

/// Y(rows x n) = S . X(cols x n) for CSR S.
void spmm_serial(const Csr& s, const double* x, double* y, Index n,
                 bool acc = false);
void spmm(const Csr& s, const double* x, double* y, Index n, bool acc = false);

}  // namespace kernels
}  // namespace sccd
