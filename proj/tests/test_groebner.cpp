#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "codimcat/groebner.hpp"
#include "test_util.hpp"

using namespace codimcat;
using testutil::random_poly;

namespace {

Poly mono2(const RingPtr& r, std::uint32_t ex, std::uint32_t ey, std::int64_t c = 1) {
  Monomial m = Monomial::one(2);
  m.exp[0] = ex;
  m.exp[1] = ey;
  m.deg = ex + ey;
  return Poly::term(r, m, c);
}

// Independent S-polynomial check used by the soundness suites: every
// S-polynomial of a computed basis must reduce to zero against it.
bool all_spolys_reduce(const std::vector<Poly>& gb) {
  for (std::size_t i = 0; i < gb.size(); ++i)
    for (std::size_t j = i + 1; j < gb.size(); ++j) {
      const auto& f = gb[i];
      const auto& g = gb[j];
      Monomial l = mono_lcm(f.lm(), g.lm());
      const PrimeField& fp = f.ring()->field();
      Poly s = poly_sub(poly_term_mul(f, mono_div(l, f.lm()), fp.inv(f.lc())),
                        poly_term_mul(g, mono_div(l, g.lm()), fp.inv(g.lc())));
      if (!normal_form(s, gb).is_zero()) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("normal form examples") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);

  CHECK(normal_form(poly_add(poly_mul(x, x), y), {x, y}).is_zero());
  Poly f = poly_add(poly_mul(x, x), Poly::constant(r, 1));
  CHECK(normal_form(f, {y}) == f);
  // One-step division: xy = y*(x - y) + y^2 in grevlex.
  CHECK(normal_form(poly_mul(x, y), {poly_sub(x, y)}) == poly_mul(y, y));
}

TEST_CASE("buchberger examples") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);

  Ideal I(r, {x, y});
  CHECK(I.groebner() == std::vector<Poly>{x, y});

  Ideal principal(r, {poly_scale(poly_add(poly_mul(x, y), y), 7)});
  CHECK(principal.groebner() == std::vector<Poly>{poly_add(poly_mul(x, y), y)});

  // (xy - 1, y^2 - 1) in lex x > y reduces to {x - y, y^2 - 1}:
  // x - y = y*(xy - 1) - x*(y^2 - 1) followed by one reduction.
  auto rl = PolyRing::make(32003, {"x", "y"}, MonomialOrder{OrderKind::Lex, 0});
  Poly xl = Poly::variable(rl, 0), yl = Poly::variable(rl, 1);
  Ideal J(rl, {poly_sub(poly_mul(xl, yl), Poly::constant(rl, 1)),
               poly_sub(poly_mul(yl, yl), Poly::constant(rl, 1))});
  std::vector<Poly> expect = {poly_sub(xl, yl), poly_sub(poly_mul(yl, yl), Poly::constant(rl, 1))};
  CHECK(J.groebner() == expect);

  CHECK(Ideal::zero(r).groebner().empty());
}

TEST_CASE("membership certifies ideal equality with the input") {
  std::mt19937_64 rng(testutil::suite_seed() + 10);
  auto r = testutil::ring_xyz(101);
  for (int it = 0; it < 25; ++it) {
    std::vector<Poly> gens;
    int n = 1 + int(rng() % 3);
    for (int i = 0; i < n; ++i) gens.push_back(random_poly(rng, r, 3, 3));
    Ideal I(r, gens);
    const auto& gb = I.groebner();
    CHECK(all_spolys_reduce(gb));
    for (const auto& g : I.gens()) CHECK(normal_form(g, gb).is_zero());
    Ideal regen(r, gb);
    for (const auto& g : gb) CHECK(in_ideal(g, I));
    for (const auto& g : I.gens()) CHECK(in_ideal(g, regen));
  }
}

TEST_CASE("in_ideal examples") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);
  CHECK(in_ideal(poly_add(poly_mul(x, x), poly_mul(x, y)), Ideal(r, {x})));
  CHECK(!in_ideal(Poly::constant(r, 1), Ideal(r, {x, y})));
  Ideal J(r, {poly_sub(poly_mul(x, y), Poly::constant(r, 1)),
              poly_sub(poly_mul(y, y), Poly::constant(r, 1))});
  CHECK(in_ideal(poly_sub(x, y), J));
}

TEST_CASE("syzygies") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);
  auto vec1 = [&](const Poly& f) { return FreeVec::from_components({f}); };

  auto koszul = syzygies({vec1(x), vec1(y)});
  REQUIRE(koszul.size() == 1);
  CHECK(koszul[0][0] == y);
  CHECK(koszul[0][1] == poly_neg(x));

  CHECK(syzygies({vec1(poly_add(poly_mul(x, x), y))}).empty());

  auto dup = syzygies({vec1(x), vec1(x)});
  REQUIRE(dup.size() == 1);
  CHECK(dup[0][0] == poly_neg(dup[0][1]));

  // matrix identity gens * S = 0 plus membership of random combinations
  std::mt19937_64 rng(testutil::suite_seed() + 20);
  for (int it = 0; it < 10; ++it) {
    std::vector<FreeVec> gens;
    int m = 2 + int(rng() % 3);
    for (int i = 0; i < m; ++i)
      gens.push_back(FreeVec::from_components(
          {random_poly(rng, r, 2, 3), random_poly(rng, r, 2, 3)}));
    auto syz = syzygies(gens);
    for (const auto& s : syz) {
      FreeVec acc(r, 2);
      for (int i = 0; i < m; ++i) acc = vec_add(acc, vec_scale(gens[std::size_t(i)], s[std::size_t(i)]));
      CHECK(acc.is_zero());
    }
    // random combinations of syzygies stay syzygies
    for (int probe = 0; probe < 20 && !syz.empty(); ++probe) {
      FreeVec comb(r, syz.front().rank());
      for (const auto& s : syz)
        if (rng() % 2) comb = vec_add(comb, vec_scale(s, random_poly(rng, r, 1, 2)));
      FreeVec acc(r, 2);
      for (int i = 0; i < m; ++i) acc = vec_add(acc, vec_scale(gens[std::size_t(i)], comb[std::size_t(i)]));
      CHECK(acc.is_zero());
    }
  }
}

TEST_CASE("lift into submodule expresses members exactly") {
  std::mt19937_64 rng(testutil::suite_seed() + 30);
  auto r = testutil::ring_xy(101);
  for (int it = 0; it < 15; ++it) {
    std::vector<FreeVec> gens;
    int m = 1 + int(rng() % 3);
    for (int i = 0; i < m; ++i)
      gens.push_back(FreeVec::from_components(
          {random_poly(rng, r, 2, 2), random_poly(rng, r, 2, 2)}));
    FreeVec v(r, 2);
    for (int i = 0; i < m; ++i) v = vec_add(v, vec_scale(gens[std::size_t(i)], random_poly(rng, r, 2, 2)));
    auto coeffs = lift_into_submodule(v, gens);
    REQUIRE(coeffs.has_value());
    FreeVec acc(r, 2);
    for (int i = 0; i < m; ++i) acc = vec_add(acc, vec_scale(gens[std::size_t(i)], (*coeffs)[std::size_t(i)]));
    CHECK(vec_sub(acc, v).is_zero());
  }
  // non-members fail loudly
  Poly x = Poly::variable(r, 0);
  auto fail = lift_into_submodule(FreeVec::from_components({Poly::constant(r, 1)}),
                                  {FreeVec::from_components({x})});
  CHECK(!fail.has_value());
}

TEST_CASE("eliminate") {
  auto r3 = PolyRing::make(32003, {"t", "x", "y"});
  Poly t = Poly::variable(r3, 0), x = Poly::variable(r3, 1), y = Poly::variable(r3, 2);
  // parametrized parabola: eliminate t from (t - x, t^2 - y) gives (x^2 - y)
  Ideal I(r3, {poly_sub(t, x), poly_sub(poly_mul(t, t), y)});
  Ideal E = eliminate(I, {0});
  REQUIRE(E.ring()->vars() == std::vector<std::string>{"x", "y"});
  Poly xe = Poly::variable(E.ring(), 0), ye = Poly::variable(E.ring(), 1);
  Poly parabola = poly_sub(poly_mul(xe, xe), ye);
  CHECK(in_ideal(parabola, E));
  for (const auto& g : E.gens()) {
    // both inclusions: every survivor also lies in the contraction
    Ideal P(E.ring(), {parabola});
    CHECK(in_ideal(g, P));
  }

  CHECK(ideal_equal(eliminate(I, {}), I));
  Ideal T(r3, {t});
  CHECK(eliminate(T, {0}).is_zero_ideal());
}

TEST_CASE("colon and saturation") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);
  Poly x2 = poly_mul(x, x), xy = poly_mul(x, y);

  // ((x^2, xy) : (x)) = (x, y), membership both directions
  Ideal C = ideal_colon(Ideal(r, {x2, xy}), Ideal(r, {x}));
  CHECK(ideal_equal(C, Ideal(r, {x, y})));

  Ideal I(r, {x2, xy});
  CHECK(ideal_equal(ideal_colon(I, Ideal::unit(r)), I));
  CHECK(ideal_equal(ideal_colon(Ideal(r, {xy}), Ideal(r, {x})), Ideal(r, {y})));

  // sat((x^2 y), (y)) = (x^2) with exponent 1
  auto s1 = saturate(Ideal(r, {poly_mul(x2, y)}), Ideal(r, {y}));
  CHECK(ideal_equal(s1.ideal, Ideal(r, {x2})));
  CHECK(s1.exponent == 1);

  auto s2 = saturate(I, Ideal::unit(r));
  CHECK(ideal_equal(s2.ideal, I));
  CHECK(s2.exponent == 0);

  auto s3 = saturate(I, Ideal(r, {x}));
  CHECK(s3.ideal.is_unit_ideal());

  // containment chain I <= (I : J) <= sat(I, J); saturation idempotent
  std::mt19937_64 rng(testutil::suite_seed() + 40);
  for (int it = 0; it < 8; ++it) {
    Ideal A(r, {random_poly(rng, r, 3, 2), random_poly(rng, r, 3, 2)});
    Ideal B(r, {random_poly(rng, r, 2, 2, false)});
    Ideal col = ideal_colon(A, B);
    auto sat = saturate(A, B);
    for (const auto& g : A.gens()) CHECK(in_ideal(g, col));
    for (const auto& g : col.gens()) CHECK(in_ideal(g, sat.ideal));
    auto again = saturate(sat.ideal, B);
    CHECK(ideal_equal(again.ideal, sat.ideal));
    CHECK(again.exponent == 0);
  }
}

TEST_CASE("ideal intersection via the t trick") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);
  Ideal I(r, {x});
  Ideal J(r, {y});
  CHECK(ideal_equal(ideal_intersect(I, J), Ideal(r, {poly_mul(x, y)})));
  CHECK(ideal_equal(ideal_intersect(I, Ideal::unit(r)), I));
  CHECK(ideal_intersect(I, Ideal::zero(r)).is_zero_ideal());
}

TEST_CASE("krull dimension") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);
  CHECK(krull_dim(Ideal(r, {poly_mul(x, y)})) == 1);
  CHECK(krull_dim(Ideal(r, {x, y})) == 0);
  CHECK(krull_dim(Ideal::zero(r)) == 2);
  CHECK(krull_dim(Ideal::unit(r)) == -1);

  // brute-force oracle: all monomial ideals in <= 3 vars, gens of degree <= 3
  auto r3 = testutil::ring_xyz();
  std::vector<Monomial> monos;
  for (std::uint32_t a = 0; a <= 3; ++a)
    for (std::uint32_t b = 0; a + b <= 3; ++b)
      for (std::uint32_t c = 0; a + b + c <= 3; ++c) {
        if (a + b + c == 0) continue;
        Monomial m = Monomial::one(3);
        m.exp = {a, b, c};
        m.deg = a + b + c;
        monos.push_back(m);
      }
  std::mt19937_64 rng(testutil::suite_seed() + 50);
  for (int it = 0; it < 60; ++it) {
    std::vector<Poly> gens;
    int n = 1 + int(rng() % 4);
    std::vector<std::uint32_t> supp_masks;
    for (int i = 0; i < n; ++i) {
      const Monomial& m = monos[rng() % monos.size()];
      gens.push_back(Poly::term(r3, m, 1));
      std::uint32_t mask = 0;
      for (int v = 0; v < 3; ++v)
        if (m.exp[std::size_t(v)]) mask |= 1u << v;
      supp_masks.push_back(mask);
    }
    int brute = -1;
    for (std::uint32_t set = 0; set < 8; ++set) {
      bool ok = true;
      for (auto mask : supp_masks)
        if ((mask & ~set) == 0) ok = false;
      if (ok) brute = std::max(brute, __builtin_popcount(set));
    }
    CHECK(krull_dim(Ideal(r3, gens)) == brute);
  }
}

TEST_CASE("radical membership") {
  auto r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);
  CHECK(radical_member(x, Ideal(r, {poly_mul(x, x)})));
  CHECK(!radical_member(y, Ideal(r, {poly_mul(x, x)})));
  Poly xpy = poly_add(x, y);
  CHECK(radical_member(xpy, Ideal(r, {poly_mul(xpy, xpy)})));
}

TEST_CASE("resource guards fire instead of wrong answers") {
  Limits lim;
  lim.max_degree = 3;
  auto r = PolyRing::make(32003, {"x", "y"}, MonomialOrder{OrderKind::Lex, 0}, lim);
  Poly x = Poly::variable(r, 0), y = Poly::variable(r, 1);
  // the lex basis of (x^2 + y^2 - 1, xy - 1) contains y^4 - y^2 + 1,
  // which is past the configured degree bound
  Poly f = poly_sub(poly_add(poly_mul(x, x), poly_mul(y, y)), Poly::constant(r, 1));
  Poly g = poly_sub(poly_mul(x, y), Poly::constant(r, 1));
  Ideal I(r, {f, g});
  CHECK_THROWS_AS((void)I.groebner(), ResourceExceeded);
}
