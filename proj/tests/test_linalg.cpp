#include <cmath>
#include <vector>

#include "advlab/eig.hpp"
#include "advlab/errors.hpp"
#include "advlab/matrix.hpp"
#include "advlab/rng.hpp"
#include "doctest.h"

using namespace advlab;

namespace {

DenseMatrix random_matrix(SplitMix64& rng, int rows, int cols, double scale = 1.0) {
  DenseMatrix m(rows, cols);
  for (auto& v : m.data()) v = rng.next_double(-scale, scale);
  return m;
}

DenseMatrix random_symmetric(SplitMix64& rng, int n, double scale = 1.0) {
  auto m = random_matrix(rng, n, n, scale);
  m.symmetrize();
  return m;
}

// Gram matrix R^T R: positive semidefinite by construction.
DenseMatrix random_psd(SplitMix64& rng, int n, int rank) {
  auto r = random_matrix(rng, rank, n);
  return r.transposed() * r;
}

double reconstruction_gap(const DenseMatrix& a, const SymEig& e) {
  int n = a.rows();
  DenseMatrix lam(n, n);
  for (int i = 0; i < n; ++i) lam(i, i) = e.eigenvalues[i];
  DenseMatrix back = e.eigenvectors * lam * e.eigenvectors.transposed();
  return (back - a).max_abs();
}

double orthonormality_gap(const SymEig& e) {
  DenseMatrix q = e.eigenvectors;
  DenseMatrix g = q.transposed() * q;
  return (g - DenseMatrix::identity(q.cols())).max_abs();
}

}  // namespace

TEST_CASE("dense matrix basics") {
  auto a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  auto b = DenseMatrix::from_rows({{0, 1}, {1, 0}});
  auto p = a * b;
  CHECK(p(0, 0) == 2.0);
  CHECK(p(0, 1) == 1.0);
  CHECK(p(1, 0) == 4.0);
  CHECK(p(1, 1) == 3.0);
  CHECK(a.transposed()(0, 1) == 3.0);
  CHECK(a.max_abs() == 4.0);
  CHECK(DenseMatrix::identity(3).is_symmetric());
  CHECK_THROWS_AS(DenseMatrix(0, 2), SizeError);
  CHECK_THROWS_AS(DenseMatrix(513, 1), SizeError);
  CHECK_THROWS_AS(a + DenseMatrix(3, 3), SizeError);
}

TEST_CASE("hadamard is the entrywise product") {
  auto a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  auto b = DenseMatrix::from_rows({{5, 6}, {7, 8}});
  auto h = hadamard(a, b);
  CHECK(h(0, 0) == 5.0);
  CHECK(h(0, 1) == 12.0);
  CHECK(h(1, 0) == 21.0);
  CHECK(h(1, 1) == 32.0);
  SplitMix64 rng(11);
  auto c = random_matrix(rng, 5, 3);
  auto ones = DenseMatrix(5, 3);
  for (auto& v : ones.data()) v = 1.0;
  CHECK((hadamard(c, ones) - c).max_abs() == 0.0);
  CHECK_THROWS_AS(hadamard(a, DenseMatrix(3, 2)), SizeError);
}

TEST_CASE("kron layout keeps the left factor major") {
  auto a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  auto b = DenseMatrix::from_rows({{0, 5}, {6, 0}});
  auto k = kron(a, b);
  REQUIRE(k.rows() == 4);
  for (int ia = 0; ia < 2; ++ia)
    for (int ja = 0; ja < 2; ++ja)
      for (int ib = 0; ib < 2; ++ib)
        for (int jb = 0; jb < 2; ++jb)
          CHECK(k(ia * 2 + ib, ja * 2 + jb) == a(ia, ja) * b(ib, jb));
  CHECK_THROWS_AS(kron(DenseMatrix(30, 30), DenseMatrix(30, 30)), SizeError);
}

TEST_CASE("kron spectral norm is the product of factor norms") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_matrix(rng, 3, 4);
    auto b = random_matrix(rng, 2, 5);
    double lhs = spectral_norm(kron(a, b));
    double rhs = spectral_norm(a) * spectral_norm(b);
    CHECK(std::fabs(lhs - rhs) <= 1e-10 * (1.0 + rhs));
  }
}

TEST_CASE("lift_by_function pulls entries back and preserves semidefiniteness") {
  SplitMix64 rng(31);
  auto a = random_psd(rng, 5, 5);
  std::vector<int> h = {4, 0, 0, 2, 3, 1, 4, 2};
  auto lifted = lift_by_function(a, h);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j)
      CHECK(lifted(static_cast<int>(i), static_cast<int>(j)) == a(h[i], h[j]));
  auto check = is_psd(lifted, 1e-10);
  CHECK(check.ok);
  CHECK_THROWS_AS(lift_by_function(a, std::vector<int>{5}), DomainError);
}

TEST_CASE("sym_eig reconstructs the input to tight tolerance") {
  SplitMix64 rng(41);
  for (int n : {1, 2, 3, 5, 8, 13, 21, 40}) {
    auto a = random_symmetric(rng, n, 2.0);
    auto e = sym_eig(a);
    REQUIRE(static_cast<int>(e.eigenvalues.size()) == n);
    double scale = 1.0 + a.max_abs();
    CHECK(reconstruction_gap(a, e) <= 1e-10 * scale);
    CHECK(orthonormality_gap(e) <= 1e-10);
    for (int k = 0; k + 1 < n; ++k) CHECK(e.eigenvalues[k] >= e.eigenvalues[k + 1]);
    // eigenvalue-only path must agree exactly with the full path
    auto vals = sym_eigenvalues(a);
    for (int k = 0; k < n; ++k) CHECK(vals[k] == doctest::Approx(e.eigenvalues[k]).epsilon(1e-13));
  }
}

TEST_CASE("sym_eig on a moderately large matrix stays accurate") {
  SplitMix64 rng(43);
  auto a = random_symmetric(rng, 150, 1.0);
  auto e = sym_eig(a);
  CHECK(reconstruction_gap(a, e) <= 1e-10 * (1.0 + a.max_abs()));
  CHECK(orthonormality_gap(e) <= 1e-10);
}

TEST_CASE("sym_eig handles known spectra") {
  auto e1 = sym_eig(DenseMatrix::from_rows({{2, 1}, {1, 2}}));
  CHECK(e1.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e1.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  auto e2 = sym_eig(DenseMatrix::from_rows({{0, 1}, {1, 0}}));
  CHECK(e2.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e2.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-12));
  DenseMatrix diag(4, 4);
  diag(0, 0) = -3;
  diag(1, 1) = 7;
  diag(2, 2) = 0.5;
  diag(3, 3) = 7;
  auto e3 = sym_eig(diag);
  CHECK(e3.eigenvalues == std::vector<double>{7, 7, 0.5, -3});
}

TEST_CASE("sym_eig rejects non-symmetric input") {
  CHECK_THROWS_AS(sym_eig(DenseMatrix::from_rows({{0, 1}, {0, 0}})), DomainError);
  CHECK_THROWS_AS(sym_eig(DenseMatrix(2, 3)), DomainError);
}

TEST_CASE("spectral_norm agrees with the gram-matrix route") {
  SplitMix64 rng(51);
  for (int trial = 0; trial < 8; ++trial) {
    auto a = random_matrix(rng, 4 + trial, 3 + (trial % 4));
    double direct = spectral_norm(a);
    double viagram = std::sqrt(std::max(0.0, lambda_max(a.transposed() * a)));
    CHECK(std::fabs(direct - viagram) <= 1e-10 * (1.0 + viagram));
  }
  for (int trial = 0; trial < 8; ++trial) {
    auto a = random_symmetric(rng, 6);
    double direct = spectral_norm(a);
    double viagram = std::sqrt(std::max(0.0, lambda_max(a.transposed() * a)));
    CHECK(std::fabs(direct - viagram) <= 1e-10 * (1.0 + viagram));
  }
}

TEST_CASE("trace_norm of a PSD matrix is its trace") {
  SplitMix64 rng(61);
  for (int trial = 0; trial < 6; ++trial) {
    auto a = random_psd(rng, 6, 4);
    double tr = 0.0;
    for (int i = 0; i < a.rows(); ++i) tr += a(i, i);
    CHECK(trace_norm(a) == doctest::Approx(tr).epsilon(1e-10));
  }
  // rectangular route vs singular values from the gram matrix
  for (int trial = 0; trial < 6; ++trial) {
    auto a = random_matrix(rng, 5, 3);
    double sum = 0.0;
    for (double lam : sym_eigenvalues(a.transposed() * a)) sum += std::sqrt(std::max(0.0, lam));
    CHECK(trace_norm(a) == doctest::Approx(sum).epsilon(1e-9));
  }
}

TEST_CASE("is_psd flags small negative shifts") {
  SplitMix64 rng(71);
  auto a = random_psd(rng, 6, 3);  // rank 3 of 6, so lambda_min = 0
  CHECK(is_psd(a, 1e-10).ok);
  auto shifted = a - DenseMatrix::identity(6).scaled(1e-6 * (1 + a.max_abs()));
  auto check = is_psd(shifted, 1e-10);
  CHECK_FALSE(check.ok);
  CHECK(check.min_eigenvalue < 0.0);
}

TEST_CASE("hat matrices are positive semidefinite") {
  SplitMix64 rng(81);
  for (int trial = 0; trial < 40; ++trial) {
    int m = 1 + static_cast<int>(rng.next_below(6));
    int n = 1 + static_cast<int>(rng.next_below(6));
    auto a = random_matrix(rng, m, n, 3.0);
    auto h = hat(a);
    REQUIRE(h.rows() == m + n);
    double nrm = spectral_norm(a);
    for (int i = 0; i < m + n; ++i) CHECK(h(i, i) == doctest::Approx(nrm));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) CHECK(h(i, m + j) == a(i, j));
    auto check = is_psd(h, 1e-10);
    CHECK(check.min_eigenvalue >= -1e-10 * (1.0 + nrm));
  }
}

TEST_CASE("hadamard closure: PSD x PSD stays PSD, PSD x NSD stays NSD") {
  SplitMix64 rng(91);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(rng.next_below(5));
    auto p = random_psd(rng, n, n);
    auto q = random_psd(rng, n, n);
    double scale = 1.0 + p.max_abs() * q.max_abs();
    CHECK(lambda_min(hadamard(p, q)) >= -1e-10 * scale);
    CHECK(lambda_max(hadamard(p, q.scaled(-1.0))) <= 1e-10 * scale);
  }
}

TEST_CASE("matrix_composition reproduces the dilation example") {
  auto b = DenseMatrix::from_rows({{0, 1}, {1, 0}});
  DenseMatrix a11(1, 1);
  a11(0, 0) = 2.0;
  auto c = matrix_composition(b, {a11});
  REQUIRE(c.rows() == 2);
  CHECK(c(0, 0) == 0.0);
  CHECK(c(0, 1) == 2.0);
  CHECK(c(1, 0) == 2.0);
  CHECK(c(1, 1) == 0.0);
}

TEST_CASE("matrix_composition of the identity outer matrix is diagonal") {
  DenseMatrix a11(1, 1);
  a11(0, 0) = 1.0;
  auto c = matrix_composition(DenseMatrix::identity(2), {a11});
  CHECK(c(0, 0) == 1.0);
  CHECK(c(0, 1) == 0.0);
  CHECK(c(1, 0) == 0.0);
  CHECK(c(1, 1) == 1.0);
}

TEST_CASE("matrix_composition norm identities on random instances") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    int nfac = 1 + static_cast<int>(rng.next_below(3));
    auto b = random_symmetric(rng, 1 << nfac, 2.0);
    std::vector<DenseMatrix> blocks;
    double prod = 1.0;
    double lmax_prod = 1.0;
    for (int i = 0; i < nfac; ++i) {
      int m = 1 + static_cast<int>(rng.next_below(3));
      int n = 1 + static_cast<int>(rng.next_below(3));
      blocks.push_back(random_matrix(rng, m, n, 2.0));
      prod *= spectral_norm(blocks.back());
    }
    lmax_prod = lambda_max(b) * prod;
    auto c = matrix_composition(b, blocks);
    double nb = spectral_norm(b) * prod;
    double nc = spectral_norm(c);
    CHECK(std::fabs(nc - nb) <= 1e-8 * (1.0 + nb));
    double lc = lambda_max(c);
    CHECK(lc >= lmax_prod - 1e-8 * (1.0 + std::fabs(lmax_prod)));
    CHECK(lc <= nc + 1e-12 * (1.0 + nc));  // lambda_max sandwich
  }
}

TEST_CASE("matrix_composition validates its inputs") {
  DenseMatrix a(1, 1);
  CHECK_THROWS_AS(matrix_composition(DenseMatrix(3, 3), {a}), SizeError);
  CHECK_THROWS_AS(matrix_composition(DenseMatrix::from_rows({{0, 1}, {0, 0}}), {a}), DomainError);
  CHECK_THROWS_AS(matrix_composition(DenseMatrix::identity(2), {DenseMatrix(300, 300)}), SizeError);
}
