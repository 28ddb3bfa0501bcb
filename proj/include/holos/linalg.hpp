#pragma once

#include <vector>

#include "holos/core.hpp"

namespace holos::la {

// Column-major dense complex matrix (LAPACK layout).
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c) {}
  cplx& at(int r, int c) { return a[std::size_t(c) * rows + r]; }
  const cplx& at(int r, int c) const { return a[std::size_t(c) * rows + r]; }
  cplx* col(int c) { return a.data() + std::size_t(c) * rows; }
  const cplx* col(int c) const { return a.data() + std::size_t(c) * rows; }
  double frob2() const;
};

// Hermitian eigenvalues, ascending (zheevd). The argument is consumed.
std::vector<double> eigvalsh(Matrix&& A);
// Same, but A is replaced by the eigenvectors (column m belongs to value m).
std::vector<double> eigvalsh_inplace_vectors(Matrix& A);

// Singular values, descending (zgesdd). The argument is consumed.
std::vector<double> singular_values(Matrix&& B);

// G = B^H B (zherk on the lower triangle, mirrored afterwards).
Matrix gram(const Matrix& B);

// C = A * B (zgemm).
Matrix matmul(const Matrix& A, const Matrix& B);

// Real symmetric eigendecomposition, ascending (dsyevd); A col-major n x n,
// replaced by eigenvectors when vectors is true.
std::vector<double> eigvalsh_real(std::vector<double>& A, int n, bool vectors);

}  // namespace holos::la
