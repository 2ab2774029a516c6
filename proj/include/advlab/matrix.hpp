#pragma once

#include <initializer_list>
#include <vector>

namespace advlab {

// Hard cap on any dense dimension handled here.  Everything in this library
// is exhaustive desk-scale computation; the cap keeps memory and runtimes
// honest (512^2 doubles = 2 MB per matrix).
inline constexpr int kMaxMatrixDim = 512;

// Row-major dense real matrix.  Values are plain doubles; all routines that
// ingest external data validate finiteness at the JSON boundary.
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(int rows, int cols);                      // zero-filled
  DenseMatrix(int rows, int cols, std::vector<double> data);

  static DenseMatrix identity(int n);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  DenseMatrix transposed() const;
  DenseMatrix operator+(const DenseMatrix& o) const;
  DenseMatrix operator-(const DenseMatrix& o) const;
  DenseMatrix operator*(const DenseMatrix& o) const;    // matrix product
  DenseMatrix scaled(double c) const;

  double max_abs() const;
  double frobenius_norm() const;
  // max_ij |A_ij - A_ji|; 0 for non-square is not defined (throws).
  double symmetry_gap() const;
  bool is_symmetric(double rel_tol = 1e-12) const;
  // Replaces A by (A + A^T)/2.
  void symmetrize();

  bool all_finite() const;

 private:
  int rows_, cols_;
  std::vector<double> data_;
};

// Entrywise (Hadamard) product; shapes must match.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

// Kronecker product with the LEFT factor major: the row block index of the
// result runs over rows of a, and within each block over rows of b.
// Result dimensions are capped at kMaxMatrixDim.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

// Pullback along a map h: [N] -> [M] of row/column labels: result(x, y) =
// a(h[x], h[y]).  a must be square with M rows; h entries must lie in [0, M).
DenseMatrix lift_by_function(const DenseMatrix& a, const std::vector<int>& h);

// Rank-one outer product u u^T.
DenseMatrix outer(const std::vector<double>& u);

}  // namespace advlab
