#include <cmath>
#include <utility>
#include <vector>

#include "advlab/adversary.hpp"
#include "advlab/boolfn.hpp"
#include "advlab/compose.hpp"
#include "advlab/eig.hpp"
#include "advlab/errors.hpp"
#include "advlab/matrix.hpp"
#include "advlab/rng.hpp"
#include "doctest.h"

using namespace advlab;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// direct evaluation of the product formula, bypassing matrix_composition
DenseMatrix composed_by_hand(const DenseMatrix& outer_gamma, int nout,
                             const FunctionalAdversaryMatrix& inner) {
  const int m = inner.g.arity();
  const int ninner = 1 << m;
  const double norm_g = spectral_norm(inner.gamma);
  DenseMatrix h = inner.gamma;
  for (int t = 0; t < ninner; ++t) h(t, t) += norm_g;

  const int dim = 1 << (nout * m);
  DenseMatrix out(dim, dim);
  for (int x = 0; x < dim; ++x)
    for (int y = 0; y < dim; ++y) {
      double v = outer_gamma(tilde(inner.g, x, nout), tilde(inner.g, y, nout));
      for (int p = 1; p <= nout; ++p) v *= h(block_of(x, p, m), block_of(y, p, m));
      out(x, y) = v;
    }
  return out;
}

}  // namespace

TEST_CASE("composed coordinate index round-trips") {
  const BlockIndex idx(3, 2);
  int seen = 0;
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 2; ++q) {
      const int ell = idx.flatten(p, q);
      ++seen;
      CHECK(ell == (p - 1) * 2 + q);
      const auto [pp, qq] = idx.split(ell);
      CHECK(pp == p);
      CHECK(qq == q);
    }
  CHECK(seen == 6);
  CHECK_THROWS_AS(idx.flatten(4, 1), DomainError);
  CHECK_THROWS_AS(idx.split(7), DomainError);
  CHECK_THROWS_AS(BlockIndex(5, 3), SizeError);
}

TEST_CASE("composition label permutation is a bijection with blockwise structure") {
  for (const auto& g : {or_function(2), parity_function(2), and_function(2)}) {
    const auto perm = composition_label_permutation(g, 2);
    REQUIRE(perm.size() == 16);
    std::vector<int> seen(16, 0);
    for (int t : perm) {
      REQUIRE(t >= 0);
      REQUIRE(t < 16);
      ++seen[t];
    }
    for (int c : seen) CHECK(c == 1);  // bijection

    // factor 1 is fastest-varying: changing only block 1 moves the index
    // within a stride-4 group
    for (int x = 0; x < 16; ++x)
      for (int y = 0; y < 16; ++y)
        if (block_of(x, 2, 2) == block_of(y, 2, 2)) CHECK(perm[x] / 4 == perm[y] / 4);
  }
}

TEST_CASE("composed matrix equals the blockwise product formula") {
  const auto outer = *curated_functional_certificate(parity_function(2));
  const auto inner = *curated_functional_certificate(or_function(2));
  const DenseMatrix composed = compose_adversary_matrices(outer.gamma, inner, 2);
  const DenseMatrix byhand = composed_by_hand(outer.gamma, 2, inner);
  CHECK((composed - byhand).max_abs() <= 1e-12 * (1.0 + byhand.max_abs()));

  // and with a solver-extracted outer certificate
  const auto mout = best_functional_certificate(majority3());
  const auto composed3 = compose_adversary_matrices(mout.gamma, inner, 3);
  const auto byhand3 = composed_by_hand(mout.gamma, 3, inner);
  CHECK((composed3 - byhand3).max_abs() <= 1e-10 * (1.0 + byhand3.max_abs()));
}

TEST_CASE("composed functional certificates keep the zero pattern and multiply values") {
  struct Pair {
    BooleanFunction f, g;
    double expected;
  };
  const std::vector<Pair> cases = {
      {parity_function(2), parity_function(2), 4.0},
      {parity_function(2), or_function(2), 2.0 * kSqrt2},
      {or_function(2), and_function(2), 2.0},
      {and_function(2), or_function(2), 2.0},
  };
  for (const auto& c : cases) {
    const auto cf = best_functional_certificate(c.f);
    const auto cg = best_functional_certificate(c.g);
    const auto composed = compose_certificates(cf, cg);  // ctor validates pattern
    CHECK(adv_primal_value(composed) == doctest::Approx(c.expected).epsilon(1e-6));

    const auto checks = verify_composed_lower(cf, cg);
    CHECK(checks.pass);
    CHECK(checks.value == doctest::Approx(c.expected).epsilon(1e-6));
    CHECK(checks.spectral_identity_gap <= 1e-6);
    CHECK(checks.claim_identity_gap <= 1e-10);
    CHECK(checks.filter_slack >= -1e-8);
    // the filter bound is met with equality on every coordinate
    CHECK(checks.filter_slack <= 1e-7);
  }
}

TEST_CASE("composed relational certificate for the search relation over AND blocks") {
  const auto outer = best_relational_certificate(find_one_relation(2));
  const auto inner = best_functional_certificate(and_function(2));
  const auto checks = verify_composed_lower(outer, inner);
  CHECK(checks.pass);
  CHECK(checks.value == doctest::Approx(kSqrt2).epsilon(1e-5));
  CHECK(checks.worst_nsd_margin <= 1e-7);

  const auto composed = compose_certificates(outer, inner);
  CHECK(adv_rel_primal_value(composed) == doctest::Approx(kSqrt2).epsilon(1e-5));
}

TEST_CASE("tensor witness composition is exact for exact inputs") {
  const auto wf = *curated_functional_witness(parity_function(2));
  const auto wg = *curated_functional_witness(parity_function(2));
  const auto wh = compose_dual_witnesses(parity_function(2), wf, parity_function(2), wg);
  CHECK(wh.arity == 4);
  CHECK(wh.dim == 4);
  const auto chk =
      check_functional_witness(compose_function(parity_function(2), parity_function(2)), wh);
  CHECK(chk.pass);
  CHECK(chk.residuals.at("pair_constraint") <= 1e-12);
  CHECK(chk.value == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("tensor witness composition degrades gently for solver witnesses") {
  const auto wf = best_functional_witness(majority3());
  const auto wg = *curated_functional_witness(identity1());
  const auto wh = compose_dual_witnesses(majority3(), wf, identity1(), wg);
  const auto chk = check_functional_witness(compose_function(majority3(), identity1()), wh);
  CHECK(chk.pass);
  CHECK(chk.value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("relational witness composition carries the sigma family through") {
  const Relation f = find_one_relation(2);
  const auto wf = best_relational_witness(f);
  const auto wg = best_functional_witness(and_function(2));
  const auto wh = compose_dual_witnesses(f, wf, and_function(2), wg);
  const Relation h = compose_relation(f, and_function(2));
  const auto chk = check_relational_witness(h, wh, 1e-6);
  CHECK(chk.pass);
  CHECK(chk.value == doctest::Approx(kSqrt2).epsilon(1e-5));

  // sigma blocks depend only on the outer label induced by the inner function
  for (InputLabel x = 0; x < 16; ++x) {
    const InputLabel xt = tilde(and_function(2), x, 2);
    for (int a = 0; a < 2; ++a) CHECK(wh.sigma[x][a] == wf.sigma[xt][a]);
  }
}

TEST_CASE("witness composition validates shapes") {
  const auto wf = *curated_functional_witness(parity_function(2));
  CHECK_THROWS_AS(compose_dual_witnesses(majority3(), wf, parity_function(2), wf),
                  StructuralError);
}

TEST_CASE("functional composition checks agree across all three routes") {
  const auto rep = functional_composition_check(parity_function(2), parity_function(2));
  CHECK(rep.pass);
  REQUIRE(rep.direct_value.has_value());
  CHECK(rep.lower_value == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(rep.upper_value == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(*rep.direct_value == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(rep.verdicts.at("routes_agree"));
  CHECK(rep.verdicts.at("sandwich"));
  CHECK(rep.residuals.at("route_spread") <= 1e-2);
}

TEST_CASE("functional composition checks honour the direct-mode switch") {
  const auto skipped =
      functional_composition_check(parity_function(2), or_function(2), kDefaultSolveTol,
                                   DirectMode::Skip);
  CHECK(skipped.pass);
  CHECK_FALSE(skipped.direct_value.has_value());
  CHECK(skipped.verdicts.count("routes_agree") == 0);
  CHECK(skipped.lower_value == doctest::Approx(2.0 * kSqrt2).epsilon(1e-4));
  CHECK(skipped.upper_value == doctest::Approx(2.0 * kSqrt2).epsilon(1e-4));
}

TEST_CASE("relational composition check covers the flagship search example") {
  const auto rep = relational_composition_check(find_one_relation(2), and_function(2));
  CHECK(rep.pass);
  REQUIRE(rep.direct_value.has_value());
  CHECK(rep.lower_value == doctest::Approx(kSqrt2).epsilon(1e-4));
  CHECK(rep.upper_value == doctest::Approx(kSqrt2).epsilon(1e-4));
  CHECK(*rep.direct_value == doctest::Approx(kSqrt2).epsilon(1e-4));
  CHECK(rep.verdicts.at("routes_agree"));
  CHECK(rep.verdicts.at("sandwich"));
  CHECK(rep.residuals.at("composed_mask_margin") <= 1e-7);

  REQUIRE(rep.verifiability.has_value());
  CHECK_FALSE(rep.verifiability->degenerate);
}

TEST_CASE("relational composition check with a function-shaped outer relation") {
  const auto rep = relational_composition_check(as_relation(parity_function(2)),
                                                parity_function(2));
  CHECK(rep.pass);
  CHECK(rep.lower_value == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(rep.upper_value == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("identity blocks leave the outer bound unchanged") {
  for (const auto& f : {or_function(2), parity_function(2), majority3()}) {
    const double base = solve_adv(f).value;
    const auto rep = functional_composition_check(f, identity1());
    CHECK(rep.pass);
    CHECK(rep.lower_value == doctest::Approx(base).epsilon(1e-5));
    CHECK(rep.upper_value == doctest::Approx(base).epsilon(1e-5));
  }
}
