#include "holos/linalg.hpp"

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>

#include <cblas.h>
#include <lapacke.h>

#include <string>
#include <utility>

namespace holos::la {

double Matrix::frob2() const {
  double s = 0;
  for (const cplx& v : a) s += std::norm(v);
  return s;
}

std::vector<double> eigvalsh(Matrix&& A) {
  if (A.rows != A.cols) throw std::invalid_argument("eigvalsh: matrix not square");
  std::vector<double> w(A.rows);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', A.rows, A.a.data(), A.rows, w.data());
  if (info != 0) throw NumericError("zheevd failed, info=" + std::to_string(info));
  return w;
}

std::vector<double> eigvalsh_inplace_vectors(Matrix& A) {
  if (A.rows != A.cols) throw std::invalid_argument("eigvalsh: matrix not square");
  std::vector<double> w(A.rows);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', A.rows, A.a.data(), A.rows, w.data());
  if (info != 0) throw NumericError("zheevd failed, info=" + std::to_string(info));
  return w;
}

std::vector<double> singular_values(Matrix&& B) {
  int m = B.rows, n = B.cols, mn = std::min(m, n);
  std::vector<double> s(mn);
  int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, B.a.data(), m, s.data(), nullptr, m,
                            nullptr, n);
  if (info != 0) throw NumericError("zgesdd failed, info=" + std::to_string(info));
  return s;
}

Matrix gram(const Matrix& B) {
  Matrix G(B.cols, B.cols);
  cblas_zherk(CblasColMajor, CblasLower, CblasConjTrans, B.cols, B.rows, 1.0, B.a.data(), B.rows,
              0.0, G.a.data(), G.cols);
  for (int c = 0; c < G.cols; ++c) {
    G.at(c, c) = cplx(G.at(c, c).real(), 0.0);
    for (int r = 0; r < c; ++r) G.at(r, c) = std::conj(G.at(c, r));
  }
  return G;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  if (A.cols != B.rows) throw std::invalid_argument("matmul: inner dimensions disagree");
  Matrix C(A.rows, B.cols);
  cplx one(1, 0), zero(0, 0);
  cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, A.rows, B.cols, A.cols, &one, A.a.data(),
              A.rows, B.a.data(), B.rows, &zero, C.a.data(), C.rows);
  return C;
}

std::vector<double> eigvalsh_real(std::vector<double>& A, int n, bool vectors) {
  if (A.size() != std::size_t(n) * n) throw std::invalid_argument("eigvalsh_real: bad size");
  std::vector<double> w(n);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, A.data(), n, w.data());
  if (info != 0) throw NumericError("dsyevd failed, info=" + std::to_string(info));
  return w;
}

}  // namespace holos::la
