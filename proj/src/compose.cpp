#include "advlab/compose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "advlab/eig.hpp"
#include "advlab/errors.hpp"

namespace advlab {
namespace {

constexpr double kSpectralIdentityTol = 1e-6;
constexpr double kClaimIdentityTol = 1e-10;
constexpr double kFilterSlackTol = 1e-8;
constexpr double kComposedMaskTol = 1e-7;
constexpr double kProductMatchTol = 1e-3;
constexpr double kRouteSpreadTol = 1e-2;
constexpr double kSandwichSlack = 1e-3;
constexpr int kDirectAutoGramCap = 200;

std::vector<double> kron_vec(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

// Shared guts of the two verify_composed_lower overloads.  The outer matrix
// arrives as a plain matrix plus its certified value; lam_outer is its most
// positive eigenvalue (equal to the norm in the functional case).
struct LowerCore {
  DenseMatrix composed;
  double spectral_identity_gap = 0.0;
  double filter_slack = 0.0;
  double claim_identity_gap = 0.0;
  double denominator = 0.0;  // max coordinate filter norm of the composed matrix
};

LowerCore composed_lower_core(const DenseMatrix& outer_gamma, int outer_arity,
                              const FunctionalAdversaryMatrix& inner) {
  const int nout = outer_arity;
  const int m = inner.g.arity();
  const BlockIndex idx(nout, m);
  const int nh = nout * m;
  const int dim = 1 << nh;

  LowerCore core;
  core.composed = compose_adversary_matrices(outer_gamma, inner, nout);

  const double norm_g = spectral_norm(inner.gamma);
  const double lam_outer = lambda_max(outer_gamma);
  const double lam_composed = lambda_max(core.composed);
  double expect_lam = lam_outer;
  for (int p = 0; p < nout; ++p) expect_lam *= norm_g;
  core.spectral_identity_gap = std::fabs(lam_composed - expect_lam) /
                               (1.0 + std::max(std::fabs(lam_composed), std::fabs(expect_lam)));

  // inner filter pieces, indexed by inner coordinate
  const int ninner = 1 << m;
  std::vector<DenseMatrix> gq, hq;
  std::vector<double> gq_norm;
  for (int q = 1; q <= m; ++q) {
    gq.push_back(hadamard(inner.gamma, difference_matrix(m, q)));
    gq_norm.push_back(spectral_norm(gq.back()));
    DenseMatrix h = gq.back();
    for (int t = 0; t < ninner; ++t) h(t, t) += gq_norm.back();
    hq.push_back(h);
  }
  DenseMatrix hfull = inner.gamma;
  for (int t = 0; t < ninner; ++t) hfull(t, t) += norm_g;

  std::vector<double> outer_filter_norm(nout);
  for (int p = 1; p <= nout; ++p)
    outer_filter_norm[p - 1] = spectral_norm(hadamard(outer_gamma, difference_matrix(nout, p)));

  const double scale = 1.0 + core.composed.max_abs();
  core.filter_slack = std::numeric_limits<double>::infinity();
  for (int ell = 1; ell <= nh; ++ell) {
    const auto [p, q] = idx.split(ell);
    const DenseMatrix masked = hadamard(core.composed, difference_matrix(nh, ell));

    // both product decompositions of the masked composed matrix
    double gap = 0.0;
    for (int x = 0; x < dim; ++x) {
      const InputLabel xt = tilde(inner.g, static_cast<InputLabel>(x), nout);
      for (int y = 0; y < dim; ++y) {
        const InputLabel yt = tilde(inner.g, static_cast<InputLabel>(y), nout);
        double tail = 1.0;
        for (int pp = 1; pp <= nout; ++pp) {
          if (pp == p) continue;
          tail *= hfull(block_of(x, pp, m), block_of(y, pp, m));
        }
        const double m1 = outer_gamma(xt, yt) * gq[q - 1](block_of(x, p, m), block_of(y, p, m)) * tail;
        const double dpfac = (input_bit(xt, p) != input_bit(yt, p)) ? 1.0 : 0.0;
        const double m2 =
            outer_gamma(xt, yt) * dpfac * hq[q - 1](block_of(x, p, m), block_of(y, p, m)) * tail;
        gap = std::max(gap, std::fabs(masked(x, y) - m1));
        gap = std::max(gap, std::fabs(m1 - m2));
      }
    }
    core.claim_identity_gap = std::max(core.claim_identity_gap, gap / scale);

    const double actual = spectral_norm(masked);
    core.denominator = std::max(core.denominator, actual);
    double bound = outer_filter_norm[p - 1] * gq_norm[q - 1];
    for (int t = 0; t < nout - 1; ++t) bound *= norm_g;
    core.filter_slack = std::min(core.filter_slack, (bound - actual) / (1.0 + bound));
  }
  return core;
}

bool lower_core_pass(const ComposedLowerChecks& c) {
  return c.spectral_identity_gap <= kSpectralIdentityTol &&
         c.claim_identity_gap <= kClaimIdentityTol && c.filter_slack >= -kFilterSlackTol &&
         c.worst_nsd_margin <= kComposedMaskTol &&
         std::fabs(c.value - c.expected) <= kSpectralIdentityTol * (1.0 + c.expected);
}

void record_lower(CompositionReport& rep, const ComposedLowerChecks& low) {
  rep.lower_value = low.value;
  rep.values["lower"] = low.value;
  rep.residuals["spectral_identity_gap"] = low.spectral_identity_gap;
  rep.residuals["claim_identity_gap"] = low.claim_identity_gap;
  rep.residuals["filter_slack"] = low.filter_slack;
  rep.residuals["composed_mask_margin"] = low.worst_nsd_margin;
  rep.verdicts["lower_structure"] = low.pass;
}

void finish_report(CompositionReport& rep, double product, double tol_scale) {
  rep.values["product"] = product;
  rep.residuals["lower_vs_product"] = std::fabs(rep.lower_value - product);
  rep.residuals["upper_vs_product"] = std::fabs(rep.upper_value - product);
  rep.verdicts["lower_matches_product"] =
      rep.residuals["lower_vs_product"] <= kProductMatchTol * tol_scale;
  rep.verdicts["upper_matches_product"] =
      rep.residuals["upper_vs_product"] <= kProductMatchTol * tol_scale;
  if (rep.direct_value) {
    const double direct = *rep.direct_value;
    rep.values["direct"] = direct;
    rep.residuals["direct_vs_product"] = std::fabs(direct - product);
    rep.verdicts["direct_matches_product"] =
        rep.residuals["direct_vs_product"] <= kProductMatchTol * tol_scale;

    double spread = 0.0;
    for (double a : {rep.lower_value, rep.upper_value, direct})
      for (double b : {rep.lower_value, rep.upper_value, direct})
        spread = std::max(spread, std::fabs(a - b) / (1.0 + std::max(std::fabs(a), std::fabs(b))));
    rep.residuals["route_spread"] = spread;
    rep.verdicts["routes_agree"] = spread <= kRouteSpreadTol;
    rep.verdicts["sandwich"] = rep.lower_value <= direct + kSandwichSlack * tol_scale &&
                               direct <= rep.upper_value + kSandwichSlack * tol_scale;
  }
  bool ok = true;
  for (const auto& [name, verdict] : rep.verdicts) ok = ok && verdict;
  rep.pass = ok;
}

}  // namespace

BlockIndex::BlockIndex(int outer, int inner) : outer_arity(outer), inner_arity(inner) {
  if (outer < 1 || inner < 1 || outer * inner > kMaxArity)
    throw SizeError("composed coordinate index: arities out of range");
}

int BlockIndex::flatten(int p, int q) const {
  if (p < 1 || p > outer_arity || q < 1 || q > inner_arity)
    throw DomainError("composed coordinate index: (p, q) out of range");
  return (p - 1) * inner_arity + q;
}

std::pair<int, int> BlockIndex::split(int ell) const {
  if (ell < 1 || ell > outer_arity * inner_arity)
    throw DomainError("composed coordinate index: ell out of range");
  return {(ell - 1) / inner_arity + 1, (ell - 1) % inner_arity + 1};
}

std::vector<int> composition_label_permutation(const BooleanFunction& g, int copies) {
  const int m = g.arity();
  if (copies < 1 || copies * m > kMaxArity)
    throw SizeError("composition permutation: arities out of range");
  const int ninner = 1 << m;

  // rank of each inner label in the canonical order (0-preimages first)
  std::vector<int> rank(ninner);
  int next = 0;
  for (int bit = 0; bit <= 1; ++bit)
    for (int x = 0; x < ninner; ++x)
      if (g.evaluate(static_cast<InputLabel>(x)) == bit) rank[x] = next++;

  const long long dim = 1LL << (copies * m);
  std::vector<int> perm(static_cast<std::size_t>(dim));
  for (long long x = 0; x < dim; ++x) {
    long long t = 0, stride = 1;
    for (int p = 1; p <= copies; ++p) {
      t += rank[block_of(static_cast<InputLabel>(x), p, m)] * stride;
      stride *= ninner;
    }
    perm[static_cast<std::size_t>(x)] = static_cast<int>(t);
  }
  return perm;
}

DenseMatrix compose_adversary_matrices(const DenseMatrix& outer_gamma,
                                       const FunctionalAdversaryMatrix& inner,
                                       int outer_arity) {
  if (!outer_gamma.is_square() || outer_gamma.rows() != (1 << outer_arity))
    throw SizeError("composed certificate: outer matrix must be 2^N x 2^N");
  const std::vector<DenseMatrix> blocks(static_cast<std::size_t>(outer_arity),
                                        inner.z_block());
  const DenseMatrix tensor = matrix_composition(outer_gamma, blocks);
  const auto perm = composition_label_permutation(inner.g, outer_arity);
  const int dim = static_cast<int>(perm.size());
  DenseMatrix out(dim, dim);
  for (int x = 0; x < dim; ++x)
    for (int y = 0; y < dim; ++y) out(x, y) = tensor(perm[x], perm[y]);
  return out;
}

FunctionalAdversaryMatrix compose_certificates(const FunctionalAdversaryMatrix& outer,
                                               const FunctionalAdversaryMatrix& inner) {
  return FunctionalAdversaryMatrix(
      compose_function(outer.g, inner.g),
      compose_adversary_matrices(outer.gamma, inner, outer.g.arity()));
}

RelationalAdversaryMatrix compose_certificates(const RelationalAdversaryMatrix& outer,
                                               const FunctionalAdversaryMatrix& inner) {
  return RelationalAdversaryMatrix(
      compose_relation(outer.f, inner.g),
      compose_adversary_matrices(outer.gamma, inner, outer.f.arity()));
}

ComposedLowerChecks verify_composed_lower(const FunctionalAdversaryMatrix& outer,
                                          const FunctionalAdversaryMatrix& inner) {
  const LowerCore core = composed_lower_core(outer.gamma, outer.g.arity(), inner);
  ComposedLowerChecks checks;
  checks.expected = adv_primal_value(outer) * adv_primal_value(inner);
  checks.spectral_identity_gap = core.spectral_identity_gap;
  checks.filter_slack = core.filter_slack;
  checks.claim_identity_gap = core.claim_identity_gap;
  // constructor re-checks the agreement zero pattern of the composed matrix
  const FunctionalAdversaryMatrix composed(compose_function(outer.g, inner.g), core.composed);
  checks.value = (core.denominator > 0.0) ? spectral_norm(composed.gamma) / core.denominator : 0.0;
  checks.pass = lower_core_pass(checks);
  return checks;
}

ComposedLowerChecks verify_composed_lower(const RelationalAdversaryMatrix& outer,
                                          const FunctionalAdversaryMatrix& inner) {
  const LowerCore core = composed_lower_core(outer.gamma, outer.f.arity(), inner);
  ComposedLowerChecks checks;
  checks.expected = adv_rel_primal_value(outer) * adv_primal_value(inner);
  checks.spectral_identity_gap = core.spectral_identity_gap;
  checks.filter_slack = core.filter_slack;
  checks.claim_identity_gap = core.claim_identity_gap;
  const RelationalAdversaryMatrix composed(
      compose_relation(outer.f, inner.g), core.composed,
      std::numeric_limits<double>::infinity());
  for (double margin : composed.nsd_margins())
    checks.worst_nsd_margin = std::max(checks.worst_nsd_margin, margin);
  const double lam = lambda_max(composed.gamma);
  checks.value = (lam > 0.0 && core.denominator > 0.0) ? lam / core.denominator : 0.0;
  checks.pass = lower_core_pass(checks);
  return checks;
}

FunctionalDualWitness compose_dual_witnesses(const BooleanFunction& f,
                                             const FunctionalDualWitness& wf,
                                             const BooleanFunction& g,
                                             const FunctionalDualWitness& wg) {
  if (wf.arity != f.arity() || wg.arity != g.arity())
    throw StructuralError("witness composition: witness arities do not match the functions");
  const int nout = f.arity();
  const int m = g.arity();
  if (nout * m > kMaxArity) throw SizeError("witness composition: composed arity exceeds cap");
  const int dim = 1 << (nout * m);

  FunctionalDualWitness out;
  out.arity = nout * m;
  out.dim = wf.dim * wg.dim;
  out.u.assign(dim, std::vector<std::vector<double>>(out.arity));
  out.v.assign(dim, std::vector<std::vector<double>>(out.arity));
  const BlockIndex idx(nout, m);
  for (int x = 0; x < dim; ++x) {
    const InputLabel xt = tilde(g, static_cast<InputLabel>(x), nout);
    for (int p = 1; p <= nout; ++p) {
      const InputLabel xp = block_of(static_cast<InputLabel>(x), p, m);
      for (int q = 1; q <= m; ++q) {
        const int ell = idx.flatten(p, q);
        out.u[x][ell - 1] = kron_vec(wf.u[xt][p - 1], wg.u[xp][q - 1]);
        out.v[x][ell - 1] = kron_vec(wf.v[xt][p - 1], wg.v[xp][q - 1]);
      }
    }
  }
  return out;
}

RelationalDualWitness compose_dual_witnesses(const Relation& f,
                                             const RelationalDualWitness& wf,
                                             const BooleanFunction& g,
                                             const FunctionalDualWitness& wg) {
  const Relation ft = totalize(f);
  if (wf.arity != ft.arity() || wf.alphabet != ft.alphabet())
    throw StructuralError("witness composition: witness shape does not match the relation");
  if (wg.arity != g.arity())
    throw StructuralError("witness composition: inner witness arity does not match");
  const int nout = ft.arity();
  const int m = g.arity();
  if (nout * m > kMaxArity) throw SizeError("witness composition: composed arity exceeds cap");
  const int dim = 1 << (nout * m);

  RelationalDualWitness out;
  out.arity = nout * m;
  out.alphabet = ft.alphabet();
  out.dim = wf.dim * wg.dim;
  out.u.assign(dim, std::vector<std::vector<double>>(out.arity));
  out.v.assign(dim, std::vector<std::vector<double>>(out.arity));
  out.sigma.assign(dim, std::vector<std::vector<double>>(ft.alphabet()));
  const BlockIndex idx(nout, m);
  for (int x = 0; x < dim; ++x) {
    const InputLabel xt = tilde(g, static_cast<InputLabel>(x), nout);
    for (int p = 1; p <= nout; ++p) {
      const InputLabel xp = block_of(static_cast<InputLabel>(x), p, m);
      for (int q = 1; q <= m; ++q) {
        const int ell = idx.flatten(p, q);
        out.u[x][ell - 1] = kron_vec(wf.u[xt][p - 1], wg.u[xp][q - 1]);
        out.v[x][ell - 1] = kron_vec(wf.v[xt][p - 1], wg.v[xp][q - 1]);
      }
    }
    out.sigma[x] = wf.sigma[xt];
  }
  return out;
}

CompositionReport functional_composition_check(const BooleanFunction& f,
                                               const BooleanFunction& g, double tol,
                                               DirectMode direct) {
  CompositionReport rep;
  const double val_f = solve_adv(f, tol).value;
  const double val_g = solve_adv(g, tol).value;
  const double product = val_f * val_g;
  rep.values["outer"] = val_f;
  rep.values["inner"] = val_g;

  ComposedLowerChecks low =
      verify_composed_lower(best_functional_certificate(f, tol), best_functional_certificate(g, tol));
  record_lower(rep, low);

  const BooleanFunction h = compose_function(f, g);
  const FunctionalDualWitness wh =
      compose_dual_witnesses(f, best_functional_witness(f, tol), g, best_functional_witness(g, tol));
  const BoundCertificate upper = check_functional_witness(h, wh, 1e-6);
  rep.upper_value = upper.value;
  rep.values["upper"] = upper.value;
  rep.residuals["witness_pair_constraint"] = upper.residuals.at("pair_constraint");
  rep.verdicts["upper_feasible"] = upper.pass;

  const bool run_direct = direct == DirectMode::Force ||
                          (direct == DirectMode::Auto && h.arity() <= kMaxSolveArity);
  if (run_direct) {
    const BoundCertificate dcert = solve_adv(h, tol);
    rep.direct_value = dcert.value;
    rep.verdicts["direct_converged"] = dcert.pass;
  }
  finish_report(rep, product, 1.0 + product);
  return rep;
}

CompositionReport relational_composition_check(const Relation& f, const BooleanFunction& g,
                                               double tol, DirectMode direct) {
  const Relation ft = totalize(f);
  CompositionReport rep;
  const double val_f = solve_adv_rel(ft, tol).value;
  const double val_g = solve_adv(g, tol).value;
  const double product = val_f * val_g;
  rep.values["outer"] = val_f;
  rep.values["inner"] = val_g;

  ComposedLowerChecks low = verify_composed_lower(best_relational_certificate(ft, tol),
                                                  best_functional_certificate(g, tol));
  record_lower(rep, low);

  const Relation h = compose_relation(ft, g);
  const RelationalDualWitness wh =
      compose_dual_witnesses(ft, best_relational_witness(ft, tol), g, best_functional_witness(g, tol));
  const BoundCertificate upper = check_relational_witness(h, wh, 1e-6);
  rep.upper_value = upper.value;
  rep.values["upper"] = upper.value;
  rep.residuals["witness_pair_constraint"] = upper.residuals.at("pair_constraint");
  rep.residuals["witness_normalization"] = upper.residuals.at("normalization");
  rep.verdicts["upper_feasible"] = upper.pass;

  const bool fits = h.arity() <= kMaxSolveArity && h.alphabet() <= kMaxSolveAlphabet &&
                    relational_gram_dimension(h) <= kDirectAutoGramCap;
  const bool run_direct =
      direct == DirectMode::Force || (direct == DirectMode::Auto && fits);
  if (run_direct) {
    const BoundCertificate dcert = solve_adv_rel(h, tol);
    rep.direct_value = dcert.value;
    rep.verdicts["direct_converged"] = dcert.pass;
    rep.verifiability = efficient_verifiability_report(h, tol);
  }
  finish_report(rep, product, 1.0 + product);
  return rep;
}

}  // namespace advlab
