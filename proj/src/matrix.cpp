#include "advlab/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "advlab/errors.hpp"

namespace advlab {

namespace {
void check_dims(int rows, int cols) {
  if (rows <= 0 || cols <= 0)
    throw SizeError("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  if (rows > kMaxMatrixDim || cols > kMaxMatrixDim)
    throw SizeError("matrix dimension " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " exceeds cap " + std::to_string(kMaxMatrixDim));
}
}  // namespace

DenseMatrix::DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != static_cast<std::size_t>(rows) * cols)
    throw SizeError("matrix data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows) + "*" + std::to_string(cols));
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  int r = static_cast<int>(rows.size());
  int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  DenseMatrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw SizeError("ragged initializer rows");
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw SizeError("shape mismatch in matrix sum");
  DenseMatrix r(rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] + o.data_[k];
  return r;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw SizeError("shape mismatch in matrix difference");
  DenseMatrix r(rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] - o.data_[k];
  return r;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& o) const {
  if (cols_ != o.rows_) throw SizeError("shape mismatch in matrix product");
  DenseMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      const double* brow = &o.data_[static_cast<std::size_t>(k) * o.cols_];
      double* rrow = &r.data_[static_cast<std::size_t>(i) * o.cols_];
      for (int j = 0; j < o.cols_; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

DenseMatrix DenseMatrix::scaled(double c) const {
  DenseMatrix r(rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = c * data_[k];
  return r;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double DenseMatrix::symmetry_gap() const {
  if (!is_square()) throw DomainError("symmetry_gap requires a square matrix");
  double g = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j) g = std::max(g, std::fabs((*this)(i, j) - (*this)(j, i)));
  return g;
}

bool DenseMatrix::is_symmetric(double rel_tol) const {
  return is_square() && symmetry_gap() <= rel_tol * (1.0 + max_abs());
}

void DenseMatrix::symmetrize() {
  if (!is_square()) throw DomainError("symmetrize requires a square matrix");
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j) {
      double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = m;
      (*this)(j, i) = m;
    }
}

bool DenseMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw SizeError("shape mismatch in hadamard product");
  DenseMatrix r(a.rows(), a.cols());
  for (std::size_t k = 0; k < r.data().size(); ++k) r.data()[k] = a.data()[k] * b.data()[k];
  return r;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  long long rr = static_cast<long long>(a.rows()) * b.rows();
  long long cc = static_cast<long long>(a.cols()) * b.cols();
  if (rr > kMaxMatrixDim || cc > kMaxMatrixDim)
    throw SizeError("kron result " + std::to_string(rr) + "x" + std::to_string(cc) +
                    " exceeds cap " + std::to_string(kMaxMatrixDim));
  DenseMatrix r(static_cast<int>(rr), static_cast<int>(cc));
  for (int ia = 0; ia < a.rows(); ++ia)
    for (int ib = 0; ib < b.rows(); ++ib)
      for (int ja = 0; ja < a.cols(); ++ja) {
        double av = a(ia, ja);
        if (av == 0.0) continue;
        for (int jb = 0; jb < b.cols(); ++jb)
          r(ia * b.rows() + ib, ja * b.cols() + jb) = av * b(ib, jb);
      }
  return r;
}

DenseMatrix lift_by_function(const DenseMatrix& a, const std::vector<int>& h) {
  if (!a.is_square()) throw DomainError("lift_by_function requires a square matrix");
  int n = static_cast<int>(h.size());
  if (n == 0) throw SizeError("lift_by_function: empty index map");
  if (n > kMaxMatrixDim) throw SizeError("lift_by_function result exceeds cap");
  for (int x : h)
    if (x < 0 || x >= a.rows()) throw DomainError("lift_by_function: index map out of range");
  DenseMatrix r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = a(h[i], h[j]);
  return r;
}

DenseMatrix outer(const std::vector<double>& u) {
  int n = static_cast<int>(u.size());
  if (n == 0) throw SizeError("outer: empty vector");
  DenseMatrix r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = u[i] * u[j];
  return r;
}

}  // namespace advlab
