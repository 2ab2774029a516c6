#pragma once

#include <vector>

#include "advlab/matrix.hpp"

namespace advlab {

// Full symmetric eigendecomposition A = Q diag(lambda) Q^T.
// Eigenvalues are sorted in DESCENDING order; eigenvectors are the columns of
// `eigenvectors` in the matching order and are orthonormal to ~1e-14.
struct SymEig {
  std::vector<double> eigenvalues;
  DenseMatrix eigenvectors;
};

// Householder reduction to tridiagonal form followed by the implicit-shift QL
// iteration.  Input must be symmetric within 1e-12 relative; it is
// symmetrized internally before reduction.
SymEig sym_eig(const DenseMatrix& a);

// Eigenvalues only (descending); skips eigenvector accumulation, which makes
// it ~3x faster on large inputs.
std::vector<double> sym_eigenvalues(const DenseMatrix& a);

double lambda_max(const DenseMatrix& sym);
double lambda_min(const DenseMatrix& sym);

// Largest singular value.  Symmetric inputs use their eigenvalues directly;
// general inputs go through the symmetric dilation [[0, A], [A^T, 0]], whose
// spectrum is {+-sigma_i} plus zeros.
double spectral_norm(const DenseMatrix& a);

// Sum of singular values, via the same two routes.
double trace_norm(const DenseMatrix& a);

struct PsdCheck {
  bool ok;
  double min_eigenvalue;
};

// Is A positive semidefinite up to tol * (1 + ||A||)?  Returns the most
// negative eigenvalue as a witness either way.
PsdCheck is_psd(const DenseMatrix& a, double tol);

// hat(A) = [[||A|| I_m, A], [A^T, ||A|| I_n]] for an m x n block A.
// Always positive semidefinite.
DenseMatrix hat(const DenseMatrix& a);

// Matrix composition of a 2^N x 2^N symmetric outer matrix b with N inner
// blocks A_1, ..., A_N (A_i of size m_i x n_i):
//
//     C = b~ o (hat(A_N) x ... x hat(A_1))        (o entrywise, x Kronecker)
//
// Rows and columns of C carry composite labels (a_1, ..., a_N) with a_i in
// [m_i + n_i] and FACTOR 1 FASTEST-VARYING; b~(a, b) = b(a~, b~) where the
// bit a~_i = [a_i > m_i] says whether label a_i falls in the second band of
// hat(A_i).  Key facts (verified by the test batteries):
//   ||C|| = ||b|| * prod ||A_i||   and   lambda_max(C) = lambda_max(b) * prod ||A_i||.
DenseMatrix matrix_composition(const DenseMatrix& b, const std::vector<DenseMatrix>& blocks);

}  // namespace advlab
