#pragma once

// Composition engine: builds bound certificates and dual witnesses for the
// block composition h(x) = f(g(block 1), ..., g(block N)) out of certificates
// and witnesses for the pieces, and verifies that all routes to the composed
// bound value agree.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "advlab/adversary.hpp"
#include "advlab/boolfn.hpp"
#include "advlab/matrix.hpp"

namespace advlab {

// Coordinates of the composed function: coordinate ell of h is coordinate q of
// the inner copy sitting at outer coordinate p, with ell = (p-1)*m + q.
// All of p in [1,N], q in [1,m], ell in [1,N*m] are 1-based.
struct BlockIndex {
  int outer_arity = 0;  // N
  int inner_arity = 0;  // m

  BlockIndex(int outer, int inner);

  int flatten(int p, int q) const;
  std::pair<int, int> split(int ell) const;  // -> (p, q)
};

// Position of each composed input label in the tensor indexing used by
// matrix_composition: factor 1 fastest-varying, each factor ranked by the
// inner function's canonical input order (preimages of 0 ascending, then
// preimages of 1 ascending).
std::vector<int> composition_label_permutation(const BooleanFunction& g, int copies);

// Composed certificate matrix in composed-input-label indexing:
//   result(x, y) = outer_gamma(x~, y~) * prod_p H(x_p, y_p)
// with H = |inner| I + inner_gamma and x~ the outer label induced by applying
// the inner function blockwise.  Built through matrix_composition and pulled
// back through composition_label_permutation.
DenseMatrix compose_adversary_matrices(const DenseMatrix& outer_gamma,
                                       const FunctionalAdversaryMatrix& inner,
                                       int outer_arity);

// Certificate-level wrappers; constructors re-validate the composed matrix
// (agreement zero pattern, respectively the per-symbol mask condition).
FunctionalAdversaryMatrix compose_certificates(const FunctionalAdversaryMatrix& outer,
                                               const FunctionalAdversaryMatrix& inner);
RelationalAdversaryMatrix compose_certificates(const RelationalAdversaryMatrix& outer,
                                               const FunctionalAdversaryMatrix& inner);

// Structural verification of the composed certificate route:
//  - the top eigenvalue factors as lam(outer) * |inner|^N;
//  - every coordinate filter norm obeys the product bound
//      |Gamma_h o D_ell| <= |Gamma_f o D_p| * |Gamma_g o D_q| * |Gamma_g|^(N-1);
//  - the masked matrix Gamma_h o D_ell equals, entry for entry, both product
//    decompositions (inner filter at block p, respectively outer filter at
//    coordinate p with the shifted inner filter);
//  - relational outer only: the composed per-symbol masks stay negative
//    semidefinite.
struct ComposedLowerChecks {
  double value = 0.0;                 // bound certified by the composed matrix
  double expected = 0.0;              // outer value times inner value
  double spectral_identity_gap = 0.0;
  double filter_slack = 0.0;          // min over ell of (product bound - actual)
  double claim_identity_gap = 0.0;    // worst entrywise gap, both decompositions
  double worst_nsd_margin = 0.0;      // relational outer only
  bool pass = false;
};

ComposedLowerChecks verify_composed_lower(const FunctionalAdversaryMatrix& outer,
                                          const FunctionalAdversaryMatrix& inner);
ComposedLowerChecks verify_composed_lower(const RelationalAdversaryMatrix& outer,
                                          const FunctionalAdversaryMatrix& inner);

// Tensor composition of dual witnesses:
//   u_h(x, (p,q)) = u_f(x~, p) (x) u_g(x_p, q)
// and likewise for v; the relational variant carries the outer sigma family
// over unchanged, sigma_h(x, a) = sigma_f(x~, a).  Feasibility degrades by at
// most N * value(f) * resid(g) + resid(f).
FunctionalDualWitness compose_dual_witnesses(const BooleanFunction& f,
                                             const FunctionalDualWitness& wf,
                                             const BooleanFunction& g,
                                             const FunctionalDualWitness& wg);
RelationalDualWitness compose_dual_witnesses(const Relation& f,
                                             const RelationalDualWitness& wf,
                                             const BooleanFunction& g,
                                             const FunctionalDualWitness& wg);

// Whether the composed object is additionally solved outright as its own
// semidefinite program.  Auto runs the direct solve whenever the composed
// program fits comfortably inside the solver caps.
enum class DirectMode { Auto, Force, Skip };

struct CompositionReport {
  double lower_value = 0.0;              // composed primal certificate route
  double upper_value = 0.0;              // composed dual witness route
  std::optional<double> direct_value;    // full solve of the composed object
  std::map<std::string, double> values;
  std::map<std::string, double> residuals;
  std::map<std::string, bool> verdicts;
  std::optional<VerifiabilityReport> verifiability;  // relational, direct ran
  bool pass = false;
};

CompositionReport functional_composition_check(const BooleanFunction& f,
                                               const BooleanFunction& g,
                                               double tol = kDefaultSolveTol,
                                               DirectMode direct = DirectMode::Auto);
CompositionReport relational_composition_check(const Relation& f, const BooleanFunction& g,
                                               double tol = kDefaultSolveTol,
                                               DirectMode direct = DirectMode::Auto);

}  // namespace advlab
