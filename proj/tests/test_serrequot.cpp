#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codimcat/serrequot.hpp"
#include "test_util.hpp"

using namespace codimcat;
using testutil::random_poly;

namespace {

struct Plane {
  RingPtr r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0);
  Poly y = Poly::variable(r, 1);
  AffineAlgebra A2 = make_affine_algebra(r, Ideal::zero(r));

  QuotientLevel at(int k) const { return make_level(A2, k); }
  FPModule R() const { return chart_module(A2, 1, {}); }
  FPModule quot(std::initializer_list<Poly> gens) const {
    return chart_cyclic(A2, Ideal(r, std::vector<Poly>(gens)));
  }
  FPModule ideal_xy() const {
    FreeVec rel(r, 2);
    rel[0] = y;
    rel[1] = poly_neg(x);
    return chart_module(A2, 2, {rel});
  }
  ModuleMap mult(const FPModule& M, const Poly& f) const {
    return make_map(M, M, mat_scale(PolyMatrix::identity(r, M.rank()), f));
  }
  ModuleMap incl_xy() const {
    PolyMatrix m(r, 1, 2);
    m.at(0, 0) = x;
    m.at(0, 1) = y;
    return make_map(ideal_xy(), R(), std::move(m));
  }
};

}  // namespace

TEST_CASE("smallness") {
  Plane pl;
  CHECK(is_small(pl.quot({pl.x, pl.y}), pl.at(1)));
  CHECK(!is_small(pl.R(), pl.at(1)));
  CHECK(is_small(FPModule::zero_module(pl.r), pl.at(0)));
  CHECK(!is_small(pl.quot({pl.x, pl.y}), pl.at(0)));
  CHECK(chart_dim(pl.A2) == 2);
  CHECK(codim_to_k(pl.A2, 1) == 1);
}

TEST_CASE("weak equivalences") {
  Plane pl;
  CHECK(is_weak_equivalence(pl.incl_xy(), pl.at(1)));
  CHECK(is_weak_equivalence(identity_map(pl.quot({pl.x})), pl.at(1)));
  CHECK(!is_weak_equivalence(pl.mult(pl.R(), pl.x), pl.at(1)));
  CHECK(is_weak_equivalence(pl.mult(pl.R(), pl.x), pl.at(2)));
}

TEST_CASE("zero in quotient") {
  Plane pl;
  FPModule Rxy = pl.quot({pl.x, pl.y});
  ModuleMap proj = make_map(pl.R(), Rxy, PolyMatrix::identity(pl.r, 1));
  CHECK(is_zero_in_quotient(proj, pl.at(1)));
  CHECK(!is_zero_in_quotient(identity_map(pl.R()), pl.at(1)));
  CHECK(!is_zero_in_quotient(identity_map(pl.R()), pl.at(2)));
  ModuleMap tox = make_map(pl.R(), pl.quot({pl.x}), PolyMatrix::identity(pl.r, 1));
  CHECK(is_zero_in_quotient(tox, pl.at(2)));
  CHECK(!is_zero_in_quotient(tox, pl.at(1)));
}

TEST_CASE("roof construction") {
  Plane pl;
  Roof id = roof_identity(pl.at(1), pl.R());
  CHECK(roof_is_iso(id));
  CHECK(!roof_is_zero(id));

  // Hartogs roof: R <- (x,y) -> R with both legs the inclusion
  Roof hart = roof_make(pl.at(1), pl.incl_xy(), pl.incl_xy());
  CHECK(roof_is_iso(hart));
  CHECK(roof_equal(hart, id));

  // x : R -> R is not a weak equivalence at k=1
  CHECK_THROWS_AS(roof_make(pl.at(1), pl.mult(pl.R(), pl.x), identity_map(pl.R())),
                  NotWeakEquivalence);
}

TEST_CASE("roof composition and equality") {
  Plane pl;
  QuotientLevel lvl = pl.at(1);
  Roof id = roof_identity(lvl, pl.R());
  Roof hart = roof_make(lvl, pl.incl_xy(), pl.incl_xy());

  CHECK(roof_equal(roof_compose(id, hart), hart));
  CHECK(roof_equal(roof_compose(hart, id), hart));
  CHECK(roof_equal(roof_compose(hart, hart), id));

  // constant roofs disagree unless the constants match
  Roof one = roof_make(lvl, identity_map(pl.R()), pl.mult(pl.R(), Poly::constant(pl.r, 1)));
  Roof two = roof_make(lvl, identity_map(pl.R()), pl.mult(pl.R(), Poly::constant(pl.r, 2)));
  CHECK(roof_equal(one, one));
  CHECK(!roof_equal(one, two));

  // composing with a zero roof stays zero
  Roof zero = roof_make(lvl, identity_map(pl.R()), zero_map(pl.R(), pl.R()));
  CHECK(roof_is_zero(roof_compose(zero, hart)));

  // weak equivalences invert: (E, s, s) is the identity
  CHECK(roof_equal(roof_make(lvl, pl.incl_xy(), pl.incl_xy()), roof_identity(lvl, pl.R())));

  CHECK_THROWS_AS(roof_compose(roof_identity(pl.at(0), pl.R()), hart), LevelMismatch);
}

TEST_CASE("prime witnesses probe primality") {
  Plane pl;
  auto seed = testutil::suite_seed();
  PrimeWitness Py = prime_witness(Ideal(pl.r, {pl.y}), seed);
  CHECK(Py.dim == 1);
  CHECK(Py.probes > 0);
  PrimeWitness Pxy = prime_witness(Ideal(pl.r, {pl.x, pl.y}), seed);
  CHECK(Pxy.dim == 0);
  PrimeWitness Pzero = prime_witness(Ideal::zero(pl.r), seed);
  CHECK(Pzero.dim == 2);

  // reducible and non-reduced ideals fail the probes
  CHECK_THROWS_AS(prime_witness(Ideal(pl.r, {poly_mul(pl.x, pl.y)}), seed),
                  PrimalityProbeFailed);
  CHECK_THROWS_AS(prime_witness(Ideal(pl.r, {poly_mul(pl.x, pl.x)}), seed),
                  PrimalityProbeFailed);
  CHECK_THROWS_AS(prime_witness(Ideal::unit(pl.r), seed), StructuralError);
}

TEST_CASE("topological support profiles") {
  Plane pl;
  FPModule M = direct_sum(pl.quot({pl.x}), pl.quot({pl.x, pl.y}));
  SuppProfile prof = supp_k(M, pl.at(1));
  REQUIRE(prof.size() == 1);
  CHECK(prof[0].dim == 1);
  CHECK(in_ideal(pl.x, prof[0].component));
  CHECK(radical_member(pl.x, prof[0].component));
  CHECK(!in_ideal(pl.y, prof[0].component));

  CHECK(supp_k(pl.quot({pl.x, pl.y}), pl.at(1)).empty());

  SuppProfile full = supp_k(pl.R(), pl.at(1));
  REQUIRE(full.size() == 1);
  CHECK(full[0].dim == 2);
  CHECK(full[0].component.is_zero_ideal());

  // the embedded origin is not a topological component: V(x,y) lies in V(x)
  SuppProfile embedded = supp_k(M, pl.at(0));
  REQUIRE(embedded.size() == 1);
  CHECK(embedded[0].dim == 1);

  // a point off the line is a second stratum
  FPModule off = direct_sum(
      pl.quot({pl.x}),
      pl.quot({poly_sub(pl.x, Poly::constant(pl.r, 1)), pl.y}));
  SuppProfile both = supp_k(off, pl.at(0));
  REQUIRE(both.size() == 2);
  CHECK(both[0].dim == 1);
  CHECK(both[1].dim == 0);
  CHECK(in_ideal(pl.y, both[1].component));

  // invariance: adding a small module does not change the profile
  std::mt19937_64 rng(testutil::suite_seed() + 7);
  FPModule S = pl.quot({pl.x, poly_sub(pl.y, Poly::constant(pl.r, 3))});
  SuppProfile prof2 = supp_k(direct_sum(M, S), pl.at(1));
  REQUIRE(prof2.size() == prof.size());
  CHECK(prof2[0].dim == prof[0].dim);
  for (const auto& g : prof[0].component.gens()) CHECK(radical_member(g, prof2[0].component));
  for (const auto& g : prof2[0].component.gens()) CHECK(radical_member(g, prof[0].component));
}

TEST_CASE("minimal objects") {
  Plane pl;
  auto seed = testutil::suite_seed();
  QuotientLevel lvl = pl.at(1);
  PrimeWitness Py = prime_witness(Ideal(pl.r, {pl.y}), seed);

  CHECK(is_minimal(pl.quot({pl.y}), lvl, Py));
  // the thickening has stalk length two
  CHECK(!is_minimal(pl.quot({poly_mul(pl.y, pl.y)}), lvl, Py));
  // small modules are minimal through the zero branch
  CHECK(is_minimal(pl.quot({pl.x, pl.y}), lvl, Py));
  // two copies are not cyclic at the prime
  CHECK(!is_minimal(direct_sum(pl.quot({pl.y}), pl.quot({pl.y})), lvl, Py));
  // supported on the wrong prime
  CHECK(!is_minimal(pl.quot({pl.x}), lvl, Py));
  // adding small torsion does not change the verdict
  CHECK(is_minimal(direct_sum(pl.quot({pl.y}), pl.quot({pl.x, pl.y})), lvl, Py));

  PrimeWitness P0 = prime_witness(Ideal(pl.r, {pl.x, pl.y}), seed);
  CHECK_THROWS_AS(is_minimal(pl.quot({pl.y}), lvl, P0), DimensionMismatch);
}

TEST_CASE("fraction roofs") {
  Plane pl;
  auto seed = testutil::suite_seed();
  QuotientLevel lvl = pl.at(1);
  PrimeWitness Py = prime_witness(Ideal(pl.r, {pl.y}), seed);

  Poly a = pl.x;
  Poly apy = poly_add(pl.x, pl.y);
  Roof lhs = roof_compose(roof_fraction(lvl, Py, a, apy), roof_fraction(lvl, Py, apy, a));
  Roof idz = roof_identity(lvl, chart_cyclic(pl.A2, Ideal(pl.r, {pl.y})));
  CHECK(roof_equal(lhs, idz));

  CHECK(roof_is_zero(roof_fraction(lvl, Py, Poly::zero(pl.r), apy)));
  CHECK_THROWS_AS(roof_fraction(lvl, Py, a, pl.y), DenominatorInPrime);

  // a/b = c/d iff ad - bc lies in P
  std::mt19937_64 rng(testutil::suite_seed() + 17);
  int done = 0;
  while (done < 12) {
    Poly aa = random_poly(rng, pl.r, 2, 2);
    Poly bb = random_poly(rng, pl.r, 2, 2, false);
    Poly cc = random_poly(rng, pl.r, 2, 2);
    Poly dd = random_poly(rng, pl.r, 2, 2, false);
    if (in_ideal(bb, Py.ideal) || in_ideal(dd, Py.ideal)) continue;
    ++done;
    bool eq = roof_equal(roof_fraction(lvl, Py, aa, bb), roof_fraction(lvl, Py, cc, dd));
    bool crit = in_ideal(poly_sub(poly_mul(aa, dd), poly_mul(bb, cc)), Py.ideal);
    CHECK(eq == crit);
  }
}

TEST_CASE("pic membership") {
  Plane pl;
  auto seed = testutil::suite_seed();
  QuotientLevel lvl = pl.at(1);
  CHECK(pic_member(pl.ideal_xy(), lvl, seed));
  CHECK(pic_member(pl.R(), lvl, seed));
  CHECK(!pic_member(pl.quot({pl.x}), lvl, seed));
}

TEST_CASE("fiber rank loci") {
  Plane pl;
  Ideal l1 = fiber_rank_locus(pl.ideal_xy(), 1);
  CHECK(ideal_equal(l1, Ideal(pl.r, {pl.x, pl.y})));
  CHECK(fiber_rank_locus(pl.R(), 0).is_zero_ideal());
  Ideal l0 = fiber_rank_locus(pl.quot({pl.x}), 0);
  CHECK(ideal_equal(l0, Ideal(pl.r, {pl.x})));
}

TEST_CASE("quotient hom sections") {
  Plane pl;
  QuotientLevel lvl = pl.at(1);
  Ideal mxy(pl.r, {pl.x, pl.y});

  // sections of the structure sheaf over the punctured plane stay R
  HomSections h = hom_quotient_sections(pl.R(), pl.R(), lvl, mxy, 4);
  CHECK(h.stabilized);
  CHECK(h.n_stop <= 1);
  CHECK(h.sections.rank() >= 1);
  // certified isomorphic to R: free of rank one after trim
  TrimResult t = trim(h.sections);
  CHECK(t.module.rank() == 1);
  CHECK(t.module.relations().empty());

  // sections into a small target vanish
  HomSections hz = hom_quotient_sections(pl.R(), pl.quot({pl.x, pl.y}), lvl, mxy, 4);
  CHECK(hz.stabilized);
  CHECK(hz.n_stop == 0);
  CHECK(module_is_zero(hz.sections));

  // on the affine line the sections keep growing
  auto r1 = PolyRing::make(32003, {"x"});
  AffineAlgebra A1 = make_affine_algebra(r1, Ideal::zero(r1));
  QuotientLevel lvl1 = make_level(A1, 1);
  FPModule R1 = chart_module(A1, 1, {});
  HomSections g = hom_quotient_sections(R1, R1, lvl1, Ideal(r1, {Poly::variable(r1, 0)}), 4);
  CHECK(!g.stabilized);
  CHECK(g.n_stop == 4);

  // J with a bad locus that is too big is rejected
  CHECK_THROWS_AS(hom_quotient_sections(pl.R(), pl.R(), lvl, Ideal(pl.r, {pl.x}), 3),
                  BadLocusTooBig);

  // independence of the cut: J = (x^2, y) stabilizes to the same sections
  Ideal j2(pl.r, {poly_mul(pl.x, pl.x), pl.y});
  HomSections h2 = hom_quotient_sections(pl.R(), pl.R(), lvl, j2, 4);
  CHECK(h2.stabilized);
  TrimResult t2 = trim(h2.sections);
  CHECK(t2.module.rank() == 1);
  CHECK(t2.module.relations().empty());
}

TEST_CASE("stalk zero tests") {
  Plane pl;
  auto seed = testutil::suite_seed();
  PrimeWitness Py = prime_witness(Ideal(pl.r, {pl.y}), seed);
  PrimeWitness Px = prime_witness(Ideal(pl.r, {pl.x}), seed);

  CHECK(!stalk_zero_test(identity_map(pl.R()), Py));
  ModuleMap proj = make_map(pl.R(), pl.quot({pl.x}), PolyMatrix::identity(pl.r, 1));
  // the image R/(x) dies at (y) because x is invertible there
  CHECK(stalk_zero_test(proj, Py));
  CHECK(!stalk_zero_test(proj, Px));
}

TEST_CASE("ideal power filtrations") {
  Plane pl;
  Poly x2 = poly_mul(pl.x, pl.x);
  auto layers = ideal_power_filtration(pl.quot({x2}), Ideal(pl.r, {pl.x}));
  REQUIRE(layers.size() == 2);
  for (const auto& L : layers) {
    CHECK(ideal_equal(annihilator(L), Ideal(pl.r, {pl.x})));
    CHECK(module_dim(L) == 1);
  }

  FPModule k0 = pl.quot({pl.x, pl.y});
  auto single = ideal_power_filtration(k0, Ideal(pl.r, {pl.x, pl.y}));
  REQUIRE(single.size() == 1);
  CHECK(vs_dimension(single[0]) == 1);

  // length is additive across the filtration for finite length modules
  FPModule M = pl.quot({x2, poly_mul(pl.x, pl.y), poly_mul(pl.y, pl.y)});
  auto f = ideal_power_filtration(M, Ideal(pl.r, {pl.x, pl.y}));
  long total = 0;
  for (const auto& L : f) {
    auto d = vs_dimension(L);
    REQUIRE(d.has_value());
    total += *d;
  }
  CHECK(total == *vs_dimension(M));

  CHECK_THROWS_AS(ideal_power_filtration(pl.R(), Ideal(pl.r, {pl.x})), SupportNotContained);
}

TEST_CASE("zero tests agree with smallness across levels") {
  Plane pl;
  std::mt19937_64 rng(testutil::suite_seed() + 3);
  for (int it = 0; it < 12; ++it) {
    std::size_t n = 1 + rng() % 2;
    std::vector<FreeVec> rel;
    for (std::size_t j = 0; j < rng() % 3; ++j) {
      FreeVec v(pl.r, n);
      for (std::size_t i = 0; i < n; ++i) v[i] = random_poly(rng, pl.r, 2, 2);
      rel.push_back(std::move(v));
    }
    FPModule M = chart_module(pl.A2, n, rel);
    bool prev = false;
    for (int k = 0; k <= 2; ++k) {
      bool zero = is_zero_in_quotient(identity_map(M), pl.at(k));
      CHECK(zero == is_small(M, pl.at(k)));
      CHECK(zero == (module_dim(M) <= k - 1));
      // a map zero at level k stays zero at every higher level
      if (prev) CHECK(zero);
      prev = zero;
    }
  }
}
