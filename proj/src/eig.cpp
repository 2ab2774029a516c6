#include "advlab/eig.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "advlab/errors.hpp"

namespace advlab {

namespace {

// sqrt(a^2 + b^2) without destructive underflow or overflow.
double pythag(double a, double b) {
  double absa = std::fabs(a), absb = std::fabs(b);
  if (absa > absb) {
    double r = absb / absa;
    return absa * std::sqrt(1.0 + r * r);
  }
  if (absb == 0.0) return 0.0;
  double r = absa / absb;
  return absb * std::sqrt(1.0 + r * r);
}

inline double sign_of(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// Householder reduction of the symmetric matrix held in z (row-major, n x n)
// to tridiagonal form: d receives the diagonal, e the subdiagonal in
// e[1..n-1].  With vectors=true, z is overwritten by the accumulated
// orthogonal transform; otherwise its contents are scratch afterwards.
void tridiagonalize(std::vector<double>& z, int n, std::vector<double>& d, std::vector<double>& e,
                    bool vectors) {
  auto a = [&](int i, int j) -> double& { return z[static_cast<std::size_t>(i) * n + j]; };

  for (int i = n - 1; i >= 1; --i) {
    int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::fabs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          if (vectors) a(j, i) = a(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    if (vectors) {
      if (d[i] != 0.0) {
        for (int j = 0; j < i; ++j) {
          double g = 0.0;
          for (int k = 0; k < i; ++k) g += a(i, k) * a(k, j);
          for (int k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
        }
      }
      d[i] = a(i, i);
      a(i, i) = 1.0;
      for (int j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    } else {
      d[i] = a(i, i);
    }
  }
}

// Implicit-shift QL iteration on the tridiagonal (d, e).  With vectors=true,
// the rotations are accumulated into z (which must hold the Householder
// transform on entry).  Wilkinson-style shift taken from the leading 2x2.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, int n,
                 bool vectors) {
  auto a = [&](int i, int j) -> double& { return z[static_cast<std::size_t>(i) * n + j]; };
  constexpr int kMaxSweeps = 60;

  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= DBL_EPSILON * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxSweeps)
          throw NumericError("QL iteration failed to converge after " +
                             std::to_string(kMaxSweeps) + " sweeps");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = pythag(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = pythag(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (vectors) {
            for (int k = 0; k < n; ++k) {
              f = a(k, i + 1);
              a(k, i + 1) = s * a(k, i) + c * f;
              a(k, i) = c * a(k, i) - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// Shared driver: symmetrize, reduce, iterate, sort descending.
SymEig decompose(const DenseMatrix& input, bool vectors) {
  if (!input.is_square()) throw DomainError("sym_eig requires a square matrix");
  if (!input.is_symmetric(1e-12))
    throw DomainError("sym_eig requires a symmetric matrix (gap " +
                      std::to_string(input.symmetry_gap()) + ")");
  int n = input.rows();
  std::vector<double> z = input.data();
  // Work on the exact symmetric average so row/column sweeps agree.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double m = 0.5 * (z[static_cast<std::size_t>(i) * n + j] +
                        z[static_cast<std::size_t>(j) * n + i]);
      z[static_cast<std::size_t>(i) * n + j] = m;
      z[static_cast<std::size_t>(j) * n + i] = m;
    }

  std::vector<double> d(n), e(n);
  tridiagonalize(z, n, d, e, vectors);
  ql_implicit(d, e, z, n, vectors);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return d[i] > d[j]; });

  SymEig out;
  out.eigenvalues.resize(n);
  for (int k = 0; k < n; ++k) out.eigenvalues[k] = d[order[k]];
  if (vectors) {
    out.eigenvectors = DenseMatrix(n, n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        out.eigenvectors(i, k) = z[static_cast<std::size_t>(i) * n + order[k]];
  }
  return out;
}

// Eigenvalues of the symmetric dilation [[0, A], [A^T, 0]]; its positive part
// is the singular spectrum of A.
std::vector<double> dilation_eigenvalues(const DenseMatrix& a) {
  int m = a.rows(), n = a.cols();
  if (m + n > kMaxMatrixDim) throw SizeError("singular-value dilation exceeds matrix cap");
  DenseMatrix d(m + n, m + n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      d(i, m + j) = a(i, j);
      d(m + j, i) = a(i, j);
    }
  return sym_eigenvalues(d);
}

}  // namespace

SymEig sym_eig(const DenseMatrix& a) { return decompose(a, true); }

std::vector<double> sym_eigenvalues(const DenseMatrix& a) {
  return decompose(a, false).eigenvalues;
}

double lambda_max(const DenseMatrix& sym) { return sym_eigenvalues(sym).front(); }

double lambda_min(const DenseMatrix& sym) { return sym_eigenvalues(sym).back(); }

double spectral_norm(const DenseMatrix& a) {
  if (a.is_square() && a.is_symmetric(1e-12)) {
    auto ev = sym_eigenvalues(a);
    return std::max(std::fabs(ev.front()), std::fabs(ev.back()));
  }
  auto ev = dilation_eigenvalues(a);
  return std::max(std::fabs(ev.front()), std::fabs(ev.back()));
}

double trace_norm(const DenseMatrix& a) {
  if (a.is_square() && a.is_symmetric(1e-12)) {
    double s = 0.0;
    for (double v : sym_eigenvalues(a)) s += std::fabs(v);
    return s;
  }
  double s = 0.0;
  for (double v : dilation_eigenvalues(a)) s += std::fabs(v);
  return 0.5 * s;  // dilation spectrum is {+-sigma_i} plus zeros
}

PsdCheck is_psd(const DenseMatrix& a, double tol) {
  auto ev = sym_eigenvalues(a);
  double lo = ev.back();
  double norm = std::max(std::fabs(ev.front()), std::fabs(lo));
  return PsdCheck{lo >= -tol * (1.0 + norm), lo};
}

DenseMatrix hat(const DenseMatrix& a) {
  int m = a.rows(), n = a.cols();
  if (m + n > kMaxMatrixDim) throw SizeError("hat result exceeds matrix cap");
  double s = spectral_norm(a);
  DenseMatrix h(m + n, m + n);
  for (int i = 0; i < m + n; ++i) h(i, i) = s;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      h(i, m + j) = a(i, j);
      h(m + j, i) = a(i, j);
    }
  return h;
}

DenseMatrix matrix_composition(const DenseMatrix& b, const std::vector<DenseMatrix>& blocks) {
  int nfac = static_cast<int>(blocks.size());
  if (nfac < 1 || nfac > 12) throw SizeError("matrix_composition: factor count out of range");
  if (!b.is_square() || b.rows() != (1 << nfac))
    throw SizeError("matrix_composition: outer matrix must be 2^N x 2^N");
  if (!b.is_symmetric(1e-12))
    throw DomainError("matrix_composition: outer matrix must be symmetric");

  long long total = 1;
  for (const auto& blk : blocks) {
    total *= blk.rows() + blk.cols();
    if (total > kMaxMatrixDim) throw SizeError("matrix_composition result exceeds matrix cap");
  }
  int dim = static_cast<int>(total);

  std::vector<DenseMatrix> hats;
  std::vector<int> first_band(nfac), size(nfac), stride(nfac);
  int s = 1;
  for (int i = 0; i < nfac; ++i) {
    hats.push_back(hat(blocks[i]));
    first_band[i] = blocks[i].rows();
    size[i] = blocks[i].rows() + blocks[i].cols();
    stride[i] = s;
    s *= size[i];
  }

  // Composite labels (a_1, ..., a_N), factor 1 fastest-varying.  The outer
  // index collapses label a_i to the bit [a_i lands past the first band].
  std::vector<std::vector<int>> digit(nfac, std::vector<int>(dim));
  std::vector<int> outer_bits(dim, 0);
  for (int r = 0; r < dim; ++r)
    for (int i = 0; i < nfac; ++i) {
      int d = (r / stride[i]) % size[i];
      digit[i][r] = d;
      if (d >= first_band[i]) outer_bits[r] |= 1 << i;
    }

  DenseMatrix c(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int cc = 0; cc < dim; ++cc) {
      double v = b(outer_bits[r], outer_bits[cc]);
      for (int i = 0; i < nfac && v != 0.0; ++i) v *= hats[i](digit[i][r], digit[i][cc]);
      c(r, cc) = v;
    }
  return c;
}

}  // namespace advlab
