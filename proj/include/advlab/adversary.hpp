#pragma once
// Adversary-bound programs: primal matrix certificates, dual vector witnesses,
// their feasibility checkers, and Gram-matrix SDP solves that produce both.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advlab/boolfn.hpp"
#include "advlab/matrix.hpp"

namespace advlab {

// Tolerance scale for the per-symbol negative-semidefiniteness test of
// relational certificates: masks must satisfy lambda_max <= tol * (1 + |gamma|).
inline constexpr double kNsdCheckTol = 1e-8;

// Caps for the Gram-program solves (the Gram block grows like 2n*2^n).
inline constexpr int kMaxSolveArity = 4;
inline constexpr int kMaxSolveAlphabet = 8;

// Default interior-point tolerance for bound solves.  Tighter than the solver
// default so extracted witnesses keep residuals comfortably under 1e-6.
inline constexpr double kDefaultSolveTol = 1e-9;

// Gram eigenvalues below this multiple of |G| are dropped during witness
// extraction.
inline constexpr double kRankCutoffScale = 1e-9;

// Symmetric certificate for the functional bound.  gamma must vanish exactly
// on every pair of inputs where g agrees (diagonal included).
struct FunctionalAdversaryMatrix {
  BooleanFunction g;
  DenseMatrix gamma;

  // Validates shape, symmetry, and the agreement zero pattern.
  FunctionalAdversaryMatrix(BooleanFunction fn, DenseMatrix m);

  // Inputs with g(x)=0 in ascending order, then g(x)=1 ascending.  Reordering
  // gamma rows/columns this way exposes the off-diagonal block form.
  std::vector<InputLabel> canonical_order() const;

  // Cross block of gamma between 0-inputs (rows) and 1-inputs (columns) under
  // the canonical order.  Requires g non-constant.
  DenseMatrix z_block() const;
};

// Symmetric certificate for the relational bound: for every output symbol a,
// the mask gamma ∘ chi_a chi_a^T must be negative semidefinite.  The diagonal
// of gamma is unconstrained beyond those masks.  All relational operations
// work on the totalized relation (rows with no valid symbol accept every
// symbol); inputs are totalized on entry.
struct RelationalAdversaryMatrix {
  Relation f;
  DenseMatrix gamma;

  RelationalAdversaryMatrix(Relation rel, DenseMatrix m, double tol = kNsdCheckTol);

  // Largest eigenvalue of the mask for each symbol a (want <= ~0).
  std::vector<double> nsd_margins() const;
};

// Families of dual vectors u_{x,i}, v_{x,i}.  Coordinates i are 1-based in the
// API and JSON; storage is 0-based: u[x][i-1] is a vector of length dim.
struct FunctionalDualWitness {
  int arity = 0;
  int dim = 0;
  std::vector<std::vector<std::vector<double>>> u;
  std::vector<std::vector<std::vector<double>>> v;
};

// Relational witness adds sigma_{x,a}.  sigma[x][a-1] is empty exactly when
// the pair (x,a) is outside the relation (support is structural, not merely
// numerically zero).  Non-empty vectors for the same a share one length.
struct RelationalDualWitness {
  int arity = 0;
  int alphabet = 0;
  int dim = 0;  // dimension of the u and v vectors
  std::vector<std::vector<std::vector<double>>> u;
  std::vector<std::vector<std::vector<double>>> v;
  std::vector<std::vector<std::vector<double>>> sigma;
};

enum class CertificateKind { PrimalMatrix, DualWitness, SdpSolve };
std::string to_string(CertificateKind k);

// A bound value, how it was obtained, and the feasibility evidence.
struct BoundCertificate {
  double value = 0.0;
  CertificateKind kind = CertificateKind::SdpSolve;
  double tolerance = 0.0;  // tolerance the producing operation was asked for
  bool pass = true;        // feasibility verdict at that tolerance
  std::map<std::string, double> residuals;
  std::optional<FunctionalDualWitness> functional_witness;
  std::optional<RelationalDualWitness> relational_witness;
  std::optional<DenseMatrix> gamma;
};

// Scale-invariant objective of a functional certificate:
// |gamma| / max_i |gamma ∘ D_i|, and 0 for gamma = 0.
double adv_primal_value(const FunctionalAdversaryMatrix& m);

// Relational objective lambda_max(gamma) / max_i |gamma ∘ D_i|; 0 whenever
// lambda_max(gamma) <= 0.
double adv_rel_primal_value(const RelationalAdversaryMatrix& m);

// 0/1 matrix with entry (x,y) = [g(x) != g(y)].
DenseMatrix disagreement_matrix(const BooleanFunction& g);

// Feasibility of (u,v) against an arbitrary target matrix: residual is the
// max over ordered pairs (x,y) of |sum_{i: x_i!=y_i} <u_{x,i}, v_{y,i}> -
// target(x,y)|.  The left side vanishes on the diagonal, so a nonzero
// diagonal in the target shows up as residual.  Value is the larger of the
// worst u- and v-row sums of squared norms.
BoundCertificate check_gram_witness(const DenseMatrix& target,
                                    const FunctionalDualWitness& w,
                                    double tol = 1e-6);

// Functional dual feasibility: target is the disagreement matrix of g.
BoundCertificate check_functional_witness(const BooleanFunction& g,
                                          const FunctionalDualWitness& w,
                                          double tol = 1e-6);

// Relational dual feasibility.  Residuals: "pair_constraint" is the max over
// ordered x != y of |sum_{i: x_i!=y_i} <u_{x,i}, v_{y,i}> +
// sum_a <sigma_{x,a}, sigma_{y,a}> - 1|; "normalization" is the max over x of
// |sum_a |sigma_{x,a}|^2 - 1|.  sigma support outside f is a structural error.
BoundCertificate check_relational_witness(const Relation& f,
                                          const RelationalDualWitness& w,
                                          double tol = 1e-6);

// Size of the Gram block of the relational program: 2n*2^n plus one index per
// valid (x,a) pair.
int relational_gram_dimension(const Relation& f);

// Solve the functional bound via its Gram-matrix program.  The certificate
// value is the SDP optimum; artifacts carry the extracted dual witness and the
// primal matrix recovered from the constraint multipliers.
BoundCertificate solve_adv(const BooleanFunction& g, double tol = kDefaultSolveTol);

// Relational analogue; also reports the normalization residual.
BoundCertificate solve_adv_rel(const Relation& f, double tol = kDefaultSolveTol);

// Gram-program norm of a target matrix with zero diagonal (the functional
// solve is the special case target = disagreement matrix).  A nonzero
// diagonal makes the program infeasible by construction and throws.
BoundCertificate gamma2_filtered(const DenseMatrix& a, double tol = kDefaultSolveTol);

// States psi_x = direct sum over a of sigma_{x,a}, with coordinate ranges per
// symbol acting as measurement projectors.
struct TargetStateAssembly {
  int total_dim = 0;
  std::vector<int> range_start;   // 0-based offset of symbol a's range
  std::vector<int> range_length;  // per-symbol dimension (may be 0)
  std::vector<std::vector<double>> states;  // psi_x, one per input label
};

// Requires the witness to pass check_relational_witness at 1e-6.
TargetStateAssembly assemble_target_states(const Relation& f,
                                           const RelationalDualWitness& w);

// Mass an approximate state places on invalid symbols, per input:
// err_x = sum over a with (x,a) not in f of |restriction of psi'_x to a's
// range|^2.  When the reference states are exact this is bounded by
// |psi'_x - psi_x|^2.
std::vector<double> measurement_error(const TargetStateAssembly& t,
                                      const std::vector<std::vector<double>>& approx,
                                      const Relation& f);

// Finite surrogate for efficient verifiability: per-symbol ratio between the
// functional bound of the slice f_a and the relational bound of f.
struct VerifiabilityReport {
  double relational_value = 0.0;
  std::vector<double> slice_values;  // functional bound of each slice
  std::vector<double> ratios;        // slice / relational; +inf when degenerate
  bool degenerate = false;           // relational value numerically 0
};
VerifiabilityReport efficient_verifiability_report(const Relation& f,
                                                   double tol = kDefaultSolveTol);

// Hand-built optimal certificates and witnesses for the named fixture
// functions/relations (nullopt when no curated object exists).
std::optional<FunctionalAdversaryMatrix> curated_functional_certificate(const BooleanFunction& g);
std::optional<RelationalAdversaryMatrix> curated_relational_certificate(const Relation& f);
std::optional<FunctionalDualWitness> curated_functional_witness(const BooleanFunction& g);
std::optional<RelationalDualWitness> curated_relational_witness(const Relation& f);

// Curated object when available, otherwise extracted from the SDP solve.
// Solves are cached by content, so repeated calls do not repeat work.
FunctionalAdversaryMatrix best_functional_certificate(const BooleanFunction& g,
                                                      double tol = kDefaultSolveTol);
RelationalAdversaryMatrix best_relational_certificate(const Relation& f,
                                                      double tol = kDefaultSolveTol);
FunctionalDualWitness best_functional_witness(const BooleanFunction& g,
                                              double tol = kDefaultSolveTol);
RelationalDualWitness best_relational_witness(const Relation& f,
                                              double tol = kDefaultSolveTol);

}  // namespace advlab
