#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codimcat/birgeom.hpp"
#include "test_util.hpp"

using namespace codimcat;
using testutil::random_poly;

namespace {

struct CuspSetup {
  RingPtr ra = testutil::ring_xy();
  Poly x = Poly::variable(ra, 0);
  Poly y = Poly::variable(ra, 1);
  Poly cusp_eq = poly_sub(poly_mul(y, y), poly_mul(x, poly_mul(x, x)));
  AffineAlgebra A = make_affine_algebra(ra, Ideal(ra, {cusp_eq}));

  RingPtr rb = PolyRing::make(32003, {"u"});
  Poly u = Poly::variable(rb, 0);
  AffineAlgebra B = make_affine_algebra(rb, Ideal::zero(rb));

  IsoWitness witness(std::uint64_t seed) {
    PrimeWitness P = prime_witness(Ideal(ra, {cusp_eq}), seed);
    PrimeWitness Q = prime_witness(Ideal::zero(rb), seed);
    // u maps to y/x
    return extend_local_iso(A, B, {{y, x}}, P, Q, seed);
  }
};

AffineAlgebra plane() {
  auto r = testutil::ring_xy();
  return make_affine_algebra(r, Ideal::zero(r));
}

}  // namespace

TEST_CASE("identity witness") {
  AffineAlgebra A2 = plane();
  IsoWitness w = identity_witness(A2);
  CHECK(w.certified);
  CHECK(w.bad_dim_A == -1);
  CHECK(w.bad_dim_B == -1);
  CHECK(verify_iso_witness(w, 0).ok);
  CHECK(verify_iso_witness(w, 2).ok);

  // transport along the identity does not change the module
  Poly x = Poly::variable(A2.ring, 0);
  FPModule M = chart_cyclic(A2, Ideal(A2.ring, {x}));
  FPModule T = transport_module(w, M);
  ModuleMap cmp = make_map(M, T, PolyMatrix::identity(A2.ring, 1));
  CHECK(cmp.welldef_cert);
  CHECK(is_iso(cmp));
}

TEST_CASE("linear coordinate change extends to a global witness") {
  AffineAlgebra A2 = plane();
  auto seed = testutil::suite_seed();
  Poly x = Poly::variable(A2.ring, 0), y = Poly::variable(A2.ring, 1);
  Poly one = Poly::constant(A2.ring, 1);
  PrimeWitness P = prime_witness(Ideal::zero(A2.ring), seed);
  IsoWitness w = extend_local_iso(A2, A2, {{poly_add(x, y), one}, {y, one}}, P, P, seed);
  CHECK(w.certified);
  CHECK(w.bad_dim_A == -1);
  CHECK(w.bad_dim_B == -1);
  // the backward images invert the shear: x -> x - y, y -> y
  REQUIRE(w.backward.size() == 2);
  CHECK(to_string(w.backward[0]) == "x + 32002*y");
  CHECK(to_string(w.backward[1]) == "y");
  CHECK(verify_iso_witness(w, 0).ok);
}

TEST_CASE("cusp witness") {
  CuspSetup cs;
  auto seed = testutil::suite_seed();
  IsoWitness w = cs.witness(seed);
  CHECK(w.certified);
  CHECK(w.bad_dim_A == 0);
  CHECK(w.bad_dim_B == 0);
  // backward sends x to u^2 and y to u^3
  CHECK(w.backward.size() == 2);
  CHECK(to_string(w.backward[0]) == "u^2");
  CHECK(to_string(w.backward[1]) == "u^3");

  CHECK(verify_iso_witness(w, 1).ok);
  CHECK(!verify_iso_witness(w, 0).ok);  // points were removed
  CHECK(verify_iso_witness(localize_witness(w), 0).ok);

  // symmetry
  IsoWitness r = reverse_witness(w);
  CHECK(r.certified);
  CHECK(verify_iso_witness(r, 1).ok == verify_iso_witness(w, 1).ok);
}

TEST_CASE("cusp transport verdicts") {
  CuspSetup cs;
  auto seed = testutil::suite_seed();
  IsoWitness w = cs.witness(seed);
  QuotientLevel src = make_level(cs.A, 1);

  // the origin-supported quotient dies on both sides
  FPModule M = chart_cyclic(cs.A, Ideal(cs.ra, {cs.x}));
  FPModule free1 = chart_module(cs.A, 1, {});
  ModuleMap proj = make_map(free1, M, PolyMatrix::identity(cs.ra, 1));
  EquivCheckReport rep = quotient_equiv_check(w, 1, {proj, identity_map(free1)});
  CHECK(rep.checked == 2);
  CHECK(rep.consistent());
  CHECK(is_zero_in_quotient(proj, src));
}

TEST_CASE("transport is functorial") {
  CuspSetup cs;
  auto seed = testutil::suite_seed();
  IsoWitness w = cs.witness(seed);
  std::mt19937_64 rng(seed + 5);
  int done = 0;
  while (done < 50) {
    FPModule M = chart_module(cs.A, 1 + rng() % 2, {});
    FPModule N = chart_cyclic(cs.A, Ideal(cs.ra, {random_poly(rng, cs.ra, 2, 2)}));
    HomModule H1 = hom_module(M, N);
    HomModule H2 = hom_module(N, N);
    if (H1.gen_maps.empty() || H2.gen_maps.empty()) continue;
    ++done;
    std::vector<Poly> c1, c2;
    for (std::size_t i = 0; i < H1.gen_maps.size(); ++i)
      c1.push_back(rng() % 2 ? random_poly(rng, cs.ra, 1, 2) : Poly::zero(cs.ra));
    for (std::size_t i = 0; i < H2.gen_maps.size(); ++i)
      c2.push_back(rng() % 2 ? random_poly(rng, cs.ra, 1, 2) : Poly::zero(cs.ra));
    ModuleMap phi = H1.decode(c1);
    ModuleMap psi = H2.decode(c2);
    ModuleMap lhs = transport_map(w, compose(psi, phi));
    ModuleMap rhs = compose(transport_map(w, psi), transport_map(w, phi));
    CHECK(maps_equal_on_gens(lhs, rhs));
  }
}

TEST_CASE("witness uniqueness after a common localization") {
  // two witnesses from the same local data agree once both denominators
  // are inverted: generator images normal-form equal
  CuspSetup cs;
  auto seed = testutil::suite_seed();
  IsoWitness w1 = cs.witness(seed);
  // same map with a redundant denominator x*(x+1)
  PrimeWitness P = prime_witness(Ideal(cs.ra, {cs.cusp_eq}), seed);
  PrimeWitness Q = prime_witness(Ideal::zero(cs.rb), seed);
  Poly xp1 = poly_add(cs.x, Poly::constant(cs.ra, 1));
  IsoWitness w2 = extend_local_iso(cs.A, cs.B, {{poly_mul(cs.y, xp1), poly_mul(cs.x, xp1)}},
                                   P, Q, seed);
  CHECK(w2.certified);
  // compare backward images inside B localized at both inverted elements
  Poly tt = poly_mul(w1.locB.inverted, w2.locB.inverted);
  SideRing common = make_side(cs.B, tt, "cinv");
  const auto& gb = common.defining.groebner();
  auto to_common = [&](const IsoWitness& wi, const Poly& p) {
    std::vector<Poly> imgs;
    for (const auto& name : wi.B.ring->vars())
      imgs.push_back(Poly::variable(common.ring, *common.ring->var_index(name)));
    if (wi.locB.inv) {
      Poly t_here = RingMap::inclusion(wi.B.ring, common.ring).apply(wi.locB.inverted);
      auto inv = ring_inverse(common, t_here);
      REQUIRE(inv.has_value());
      imgs.push_back(*inv);
    }
    return RingMap(wi.locB.ring, common.ring, imgs).apply(p);
  };
  for (std::size_t j = 0; j < 2; ++j) {
    Poly a = normal_form(to_common(w1, w1.backward[j]), gb);
    Poly b = normal_form(to_common(w2, w2.backward[j]), gb);
    CHECK(a == b);
  }
}

TEST_CASE("autoequivalences") {
  AffineAlgebra A2 = plane();
  auto seed = testutil::suite_seed();
  Poly x = Poly::variable(A2.ring, 0), y = Poly::variable(A2.ring, 1);
  Poly one = Poly::constant(A2.ring, 1);
  PrimeWitness P = prime_witness(Ideal::zero(A2.ring), seed);

  IsoWitness idw = identity_witness(A2);
  IsoWitness swap = extend_local_iso(A2, A2, {{y, one}, {x, one}}, P, P, seed);
  CHECK(swap.certified);

  // (id, R) acts as the identity
  AutoEq triv = autoeq_make(idw, {one}, 1, seed);
  FPModule M = chart_cyclic(A2, Ideal(A2.ring, {x}));
  FPModule M1 = autoeq_apply(triv, M);
  CHECK(ideal_equal(annihilator(M1), Ideal(A2.ring, {x})));

  // (swap, R) sends R/(x) to R/(y)
  AutoEq sw = autoeq_make(swap, {one}, 1, seed);
  FPModule M2 = autoeq_apply(sw, M);
  CHECK(ideal_equal(annihilator(M2), Ideal(A2.ring, {y})));

  // two swaps compose to the identity permutation
  AutoEq sw2 = autoeq_compose(sw, sw);
  FPModule M3 = autoeq_apply(sw2, M);
  CHECK(ideal_equal(annihilator(M3), Ideal(A2.ring, {x})));

  // (id, (x,y)) applied twice is (id, (x,y)^2) up to a certified roof;
  // the comparison map sends (m (x) g) (x) h to m (x) gh
  AutoEq line = autoeq_make(idw, {x, y}, 1, seed);
  FPModule once = autoeq_apply(line, M);
  FPModule twice = autoeq_apply(line, once);
  AutoEq line2 = autoeq_compose(line, line);
  FPModule combined = autoeq_apply(line2, M);
  const std::size_t nL = line.line_gens.size();
  const std::size_t nL2 = line2.line_gens.size();
  REQUIRE(twice.rank() == M.rank() * nL * nL);
  REQUIRE(combined.rank() == M.rank() * nL2);
  PolyMatrix cm(A2.ring, combined.rank(), twice.rank());
  for (std::size_t m = 0; m < M.rank(); ++m)
    for (std::size_t g = 0; g < nL; ++g)
      for (std::size_t h = 0; h < nL; ++h) {
        Poly prod = poly_mul(line.line_gens[g], line.line_gens[h]);
        std::size_t q = nL2;
        for (std::size_t i = 0; i < nL2; ++i)
          if (line2.line_gens[i] == prod) q = i;
        REQUIRE(q < nL2);
        cm.at(m * nL2 + q, (m * nL + g) * nL + h) = Poly::constant(A2.ring, 1);
      }
  QuotientLevel lvl = make_level(A2, 1);
  ModuleMap cmp = make_map(twice, combined, std::move(cm));
  CHECK(cmp.welldef_cert);
  Roof comparison = roof_make(lvl, identity_map(twice), cmp);
  CHECK(roof_is_iso(comparison));
}

TEST_CASE("uncertified witnesses are rejected loudly") {
  AffineAlgebra A2 = plane();
  Poly x = Poly::variable(A2.ring, 0), y = Poly::variable(A2.ring, 1);
  Poly one = Poly::constant(A2.ring, 1);
  // x -> x^2 is not invertible; the explicit witness fails its identities
  IsoWitness bad = make_witness(A2, A2, one, one, {{poly_mul(x, x), one}, {y, one}},
                                {{x, one}, {y, one}});
  CHECK(!bad.certified);
  CHECK(!bad.reason.empty());
  auto v = verify_iso_witness(bad, 1);
  CHECK(!v.ok);
  CHECK(!v.reason.empty());
  CHECK_THROWS_AS(transport_module(bad, chart_module(A2, 1, {})), UncertifiedWitness);
}
