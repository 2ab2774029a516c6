#pragma once

#include <string>
#include <vector>

#include "advlab/matrix.hpp"

namespace advlab {

inline constexpr int kMaxSdpDimension = 512;    // sum of block sizes
inline constexpr int kMaxSdpConstraints = 2000;
inline constexpr double kDefaultSdpTol = 1e-7;
inline constexpr int kDefaultSdpMaxIter = 200;

enum class SdpSense { Minimize, Maximize };
enum class SdpStatus { Optimal, MaxIterations, InfeasibleDetected };

std::string to_string(SdpStatus s);

// Block-diagonal semidefinite program:
//
//   optimize   <C, X>
//   subject to <A_k, X> = b_k   (k = 0 .. m-1),   X >= 0 block-diagonal
//
// Coefficient matrices are symmetric and stored sparsely: an entry (blk, i, j,
// v) with i <= j sets A[i][j] = A[j][i] = v inside block blk.  Note that for
// i != j the inner product then picks up BOTH mirror positions, so a
// constraint that should read "X_ij = b" wants v = 1/2.  Size-1 blocks model
// nonnegative scalar variables.
class SdpProblem {
 public:
  explicit SdpProblem(std::vector<int> block_sizes, SdpSense sense = SdpSense::Minimize);

  SdpSense sense() const { return sense_; }
  const std::vector<int>& block_sizes() const { return block_sizes_; }
  int num_blocks() const { return static_cast<int>(block_sizes_.size()); }
  int total_dimension() const { return total_dim_; }
  int num_constraints() const { return static_cast<int>(rhs_.size()); }
  double rhs(int k) const { return rhs_.at(k); }

  void set_objective_entry(int block, int i, int j, double value);
  int add_constraint(double rhs);  // returns the new constraint's index
  void set_constraint_entry(int k, int block, int i, int j, double value);

  // Dense views of the sparse coefficient data (test/debug aid).
  DenseMatrix objective_matrix(int block) const;
  DenseMatrix constraint_matrix(int k, int block) const;

  // Shape, symmetry and finiteness checks; throws on violation.
  void validate() const;

  struct Entry {
    int i, j;       // i <= j
    double value;
  };
  // Per block: list of entries of the objective / of constraint k.
  const std::vector<std::vector<Entry>>& objective_entries() const { return c_entries_; }
  const std::vector<std::vector<Entry>>& constraint_entries(int k) const {
    return a_entries_.at(k);
  }

 private:
  std::vector<int> block_sizes_;
  SdpSense sense_;
  int total_dim_;
  std::vector<std::vector<Entry>> c_entries_;                // [block] -> entries
  std::vector<std::vector<std::vector<Entry>>> a_entries_;   // [k][block] -> entries
  std::vector<double> rhs_;

  void check_entry(int block, int i, int j, double value) const;
};

struct SdpSolution {
  std::vector<DenseMatrix> primal;      // X, one matrix per block
  std::vector<DenseMatrix> dual_slack;  // S, one matrix per block
  std::vector<double> dual;             // y, one multiplier per constraint
  double primal_value = 0.0;            // in the problem's own sense
  double dual_value = 0.0;
  SdpStatus status = SdpStatus::MaxIterations;
  int iterations = 0;
  double max_constraint_residual = 0.0;   // max_k |<A_k, X> - b_k| / (1 + |b_k|)
  double max_dual_residual = 0.0;         // max-entry norm of C - S - sum y_k A_k, scaled
  double duality_gap = 0.0;               // |primal - dual| / (1 + |primal| + |dual|)
  double min_block_eigenvalue = 0.0;      // over all primal blocks
  // Smallest primal-minus-dual objective difference observed on iterates whose
  // constraint residuals were already below tolerance (min sense).  Weak
  // duality predicts this stays >= -1e-9 * scale.
  double min_feasible_gap = 0.0;
};

// Deterministic dense interior-point solve (HKM search direction, Mehrotra
// predictor-corrector, dense Schur complement via Cholesky).  Identical
// inputs produce bitwise-identical outputs.
SdpSolution solve(const SdpProblem& problem, double tol = kDefaultSdpTol,
                  int max_iter = kDefaultSdpMaxIter);

// Factor a PSD gram matrix into one vector per row index: vectors of length r
// (the number of eigenvalues above `tol`), such that pairwise inner products
// reproduce G up to tol * (1 + ||G||).  Eigenvalues in [-tol*(1+||G||), tol]
// are clipped to zero; anything more negative is a domain error.
std::vector<std::vector<double>> gram_to_vectors(const DenseMatrix& g, double tol);

}  // namespace advlab
