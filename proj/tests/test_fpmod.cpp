#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "codimcat/fpmod.hpp"
#include "test_util.hpp"

using namespace codimcat;
using testutil::random_poly;

namespace {

struct Fixture {
  RingPtr r = testutil::ring_xy();
  Poly x = Poly::variable(r, 0);
  Poly y = Poly::variable(r, 1);
  FPModule R = FPModule::free_module(r, 1);

  FPModule quot(std::initializer_list<Poly> gens) {
    return FPModule::cyclic(Ideal(r, std::vector<Poly>(gens)));
  }
  // the ideal (x, y) presented on two generators with the Koszul relation
  FPModule ideal_xy() {
    FreeVec rel(r, 2);
    rel[0] = y;
    rel[1] = poly_neg(x);
    return FPModule(r, 2, {rel});
  }
  ModuleMap mult(const FPModule& M, const Poly& f) {
    PolyMatrix m = PolyMatrix::identity(r, M.rank());
    return make_map(M, M, mat_scale(m, f));
  }
};

// random well-defined map sampled from Hom(M, N)
ModuleMap random_hom(std::mt19937_64& rng, const HomModule& H, const RingPtr& r, int deg) {
  std::vector<Poly> coeffs;
  for (std::size_t i = 0; i < H.gen_maps.size(); ++i)
    coeffs.push_back(rng() % 2 ? random_poly(rng, r, deg, 2) : Poly::zero(r));
  return H.decode(coeffs);
}

FPModule random_module(std::mt19937_64& rng, const RingPtr& r) {
  std::size_t n = 1 + rng() % 2;
  std::size_t m = rng() % 3;
  std::vector<FreeVec> rel;
  for (std::size_t j = 0; j < m; ++j) {
    FreeVec v(r, n);
    for (std::size_t i = 0; i < n; ++i) v[i] = random_poly(rng, r, 2, 2);
    rel.push_back(std::move(v));
  }
  return FPModule(r, n, std::move(rel));
}

}  // namespace

TEST_CASE("is_well_defined examples") {
  Fixture fx;
  FPModule Ry = fx.quot({fx.y});
  CHECK(is_well_defined(PolyMatrix::identity(fx.r, 1), Ry, Ry));
  // multiplication by x preserves (y)
  PolyMatrix mx(fx.r, 1, 1);
  mx.at(0, 0) = fx.x;
  CHECK(is_well_defined(mx, Ry, Ry));
  // 1: R/(x) -> R/(x^2) is not defined since x does not lie in (x^2)
  FPModule Rx = fx.quot({fx.x});
  FPModule Rx2 = fx.quot({poly_mul(fx.x, fx.x)});
  CHECK(!is_well_defined(PolyMatrix::identity(fx.r, 1), Rx, Rx2));
  CHECK_THROWS_AS(is_well_defined(PolyMatrix(fx.r, 2, 1), Rx, Rx2), StructuralError);
}

TEST_CASE("kernel examples") {
  Fixture fx;
  // x: R -> R is injective
  CHECK(module_is_zero(kernel(fx.mult(fx.R, fx.x)).module));

  // kernel of R -> R/(x) is (x)
  FPModule Rx = fx.quot({fx.x});
  ModuleMap proj = make_map(fx.R, Rx, PolyMatrix::identity(fx.r, 1));
  auto K = kernel(proj);
  CHECK(!module_is_zero(K.module));
  CHECK(ideal_equal(annihilator(cokernel(K.inclusion)), Ideal(fx.r, {fx.x})));

  // kernel of x: R -> R/(x^2) is (x): f*x in (x^2) iff f in (x)
  FPModule Rx2 = fx.quot({poly_mul(fx.x, fx.x)});
  PolyMatrix mx(fx.r, 1, 1);
  mx.at(0, 0) = fx.x;
  auto K2 = kernel(make_map(fx.R, Rx2, mx));
  // membership oracle: every kernel generator is a multiple of x
  for (const auto& c : K2.inclusion.mat.columns())
    CHECK(in_ideal(c[0], Ideal(fx.r, {fx.x})));
  CHECK(in_submodule(FreeVec::from_components({fx.x}), K2.inclusion.mat.columns()));
}

TEST_CASE("cokernel examples") {
  Fixture fx;
  FPModule N = fx.quot({fx.y});
  FPModule Z = FPModule::zero_module(fx.r);
  FPModule C = cokernel(zero_map(Z, N));
  CHECK(ideal_equal(annihilator(C), Ideal(fx.r, {fx.y})));

  CHECK(ideal_equal(annihilator(cokernel(fx.mult(fx.R, fx.x))), Ideal(fx.r, {fx.x})));

  FPModule m = fx.ideal_xy();
  PolyMatrix incl(fx.r, 1, 2);
  incl.at(0, 0) = fx.x;
  incl.at(0, 1) = fx.y;
  FPModule C2 = cokernel(make_map(m, fx.R, incl));
  CHECK(ideal_equal(annihilator(C2), Ideal(fx.r, {fx.x, fx.y})));
}

TEST_CASE("image examples") {
  Fixture fx;
  // image(id) is isomorphic to M through the canonical maps
  FPModule M = fx.quot({poly_mul(fx.x, fx.y)});
  auto I = image(identity_map(M));
  CHECK(is_iso(I.epi));
  CHECK(is_iso(compose(I.mono, I.epi)));

  FPModule Rx = fx.quot({fx.x});
  PolyMatrix mx(fx.r, 1, 1);
  mx.at(0, 0) = fx.x;
  CHECK(module_is_zero(image(make_map(fx.R, Rx, mx)).module));

  // R -> R^2 with matrix (x, y)^T is injective with free image
  PolyMatrix col(fx.r, 2, 1);
  col.at(0, 0) = fx.x;
  col.at(1, 0) = fx.y;
  auto I2 = image(make_map(fx.R, FPModule::free_module(fx.r, 2), col));
  CHECK(module_is_zero(kernel(I2.epi).module));
  CHECK(module_is_zero(kernel(I2.mono).module));
}

TEST_CASE("annihilator and dimension") {
  Fixture fx;
  Ideal I(fx.r, {poly_sub(poly_mul(fx.x, fx.x), fx.y)});
  CHECK(ideal_equal(annihilator(FPModule::cyclic(I)), I));
  CHECK(annihilator(fx.R).is_zero_ideal());
  FPModule sum = direct_sum(fx.quot({fx.x}), fx.quot({fx.y}));
  CHECK(ideal_equal(annihilator(sum), Ideal(fx.r, {poly_mul(fx.x, fx.y)})));

  CHECK(module_dim(fx.quot({fx.x, fx.y})) == 0);
  CHECK(module_dim(fx.R) == 2);
  CHECK(module_dim(FPModule::zero_module(fx.r)) == -1);
}

TEST_CASE("fitting ideals") {
  Fixture fx;
  Ideal I(fx.r, {fx.x, poly_mul(fx.y, fx.y)});
  CHECK(ideal_equal(fitting_ideal(FPModule::cyclic(I), 0), I));

  FPModule m = fx.ideal_xy();
  CHECK(ideal_equal(fitting_ideal(m, 1), Ideal(fx.r, {fx.x, fx.y})));
  CHECK(fitting_ideal(m, 0).is_zero_ideal());
  CHECK(fitting_ideal(m, 2).is_unit_ideal());

  // chain Fitt_0 <= Fitt_1 <= ... <= Fitt_n = (1)
  std::mt19937_64 rng(testutil::suite_seed() + 60);
  for (int it = 0; it < 10; ++it) {
    FPModule M = random_module(rng, fx.r);
    for (std::size_t i = 0; i + 1 <= M.rank(); ++i) {
      Ideal a = fitting_ideal(M, i), b = fitting_ideal(M, i + 1);
      for (const auto& g : a.gens()) CHECK(in_ideal(g, b));
    }
    CHECK(fitting_ideal(M, M.rank()).is_unit_ideal());
    // Fitt_0 <= Ann and Ann^n <= Fitt_0 up to radical
    Ideal f0 = fitting_ideal(M, 0);
    Ideal ann = annihilator(M);
    for (const auto& g : f0.gens()) CHECK(in_ideal(g, ann));
    for (const auto& g : ann.gens()) CHECK(radical_member(g, f0));
  }
}

TEST_CASE("ext modules") {
  Fixture fx;
  // Ext^0(R, R) = R
  FPModule e0 = ext_module(fx.R, 0);
  CHECK(e0.rank() == 1);
  CHECK(e0.relations().empty());

  // dualizing 0 -> R -x-> R -> 0 leaves R/(x) in degree one
  FPModule e1 = ext_module(fx.quot({fx.x}), 1);
  CHECK(ideal_equal(annihilator(e1), Ideal(fx.r, {fx.x})));
  CHECK(module_is_zero(ext_module(fx.quot({fx.x}), 0)));

  // Koszul complex of (x, y): Ext^2(R/(x,y), R) = R/(x,y)
  FPModule e2 = ext_module(fx.quot({fx.x, fx.y}), 2);
  CHECK(ideal_equal(annihilator(e2), Ideal(fx.r, {fx.x, fx.y})));
  CHECK(module_is_zero(ext_module(fx.quot({fx.x, fx.y}), 1)));
}

TEST_CASE("torsion with respect to an ideal") {
  Fixture fx;
  // torsion of R/(x) + R/(x,y) at (x,y) is the second summand
  FPModule M = direct_sum(fx.quot({fx.x}), fx.quot({fx.x, fx.y}));
  Ideal mxy(fx.r, {fx.x, fx.y});
  auto T = torsion_wrt(M, mxy);
  CHECK(module_dim(T.module) == 0);
  // the summand generator e_2 lies in the torsion submodule
  FreeVec e2 = FreeVec::unit(fx.r, 2, 1);
  std::vector<FreeVec> span = T.inclusion.mat.columns();
  for (const auto& c : M.relations()) span.push_back(c);
  CHECK(in_submodule(e2, span));

  CHECK(module_is_zero(torsion_wrt(fx.R, mxy).module));
  // saturating at the unit ideal leaves nothing
  CHECK(module_is_zero(torsion_wrt(M, Ideal::unit(fx.r)).module));
  // while the zero ideal keeps everything
  CHECK(is_iso(torsion_wrt(M, Ideal::zero(fx.r)).inclusion));
}

TEST_CASE("torsion part by dimension") {
  Fixture fx;
  FPModule M = direct_sum(fx.quot({fx.x}), fx.quot({fx.x, fx.y}));
  auto T0 = torsion_part(M, 0);
  CHECK(module_dim(T0.module) == 0);
  FreeVec e2 = FreeVec::unit(fx.r, 2, 1);
  std::vector<FreeVec> span = T0.inclusion.mat.columns();
  for (const auto& c : M.relations()) span.push_back(c);
  CHECK(in_submodule(e2, span));
  // quotient by the torsion part has no dimension-zero part left
  CHECK(module_dim(cokernel(T0.inclusion)) == 1);

  CHECK(is_iso(torsion_part(M, module_dim(M)).inclusion));
  CHECK(module_is_zero(torsion_part(fx.R, 0).module));
  CHECK(module_is_zero(torsion_part(M, -1).module));

  // monotone in d
  auto T1 = torsion_part(M, 1);
  std::vector<FreeVec> span1 = T1.inclusion.mat.columns();
  for (const auto& c : M.relations()) span1.push_back(c);
  for (const auto& g : T0.inclusion.mat.columns()) CHECK(in_submodule(g, span1));
}

TEST_CASE("localization") {
  Fixture fx;
  // R/(x) localized at x dies
  auto L1 = localize(fx.quot({fx.x}), fx.x);
  CHECK(module_is_zero(L1.localized));

  auto L2 = localize(fx.R, fx.x);
  CHECK(!module_is_zero(L2.localized));
  CHECK(L2.localized.rank() == 1);

  // the ideal (x,y) becomes free of rank one after inverting x:
  // e_1 generates, certified by an explicit isomorphism
  auto L3 = localize(fx.ideal_xy(), fx.x);
  FPModule Rloc = localize(fx.R, fx.x).localized;
  PolyMatrix g(L3.ext_ring, 2, 1);
  g.at(0, 0) = Poly::constant(L3.ext_ring, 1);
  ModuleMap to_gen = make_map(Rloc, L3.localized, std::move(g));
  CHECK(to_gen.welldef_cert);
  CHECK(is_iso(to_gen));

  // x: R_x -> R_x is an isomorphism
  ModuleMap mul_x = make_map(Rloc, Rloc,
                             mat_scale(PolyMatrix::identity(L2.ext_ring, 1),
                                       RingMap::inclusion(fx.r, L2.ext_ring).apply(fx.x)));
  CHECK(is_iso(mul_x));
}

TEST_CASE("hom modules") {
  Fixture fx;
  // Hom(R, N) = N
  FPModule N = fx.quot({fx.y});
  HomModule h = hom_module(fx.R, N);
  CHECK(h.hom.rank() == 1);
  CHECK(ideal_equal(annihilator(h.hom), Ideal(fx.r, {fx.y})));

  // no torsion maps into a free module
  CHECK(module_is_zero(hom_module(fx.quot({fx.x}), fx.R).hom));

  // End(R/(x)) = R/(x), generated by the identity
  HomModule e = hom_module(fx.quot({fx.x}), fx.quot({fx.x}));
  CHECK(ideal_equal(annihilator(e.hom), Ideal(fx.r, {fx.x})));
  REQUIRE(e.gen_maps.size() >= 1);
  for (const auto& g : e.gen_maps) CHECK(g.welldef_cert);
}

TEST_CASE("is_iso examples") {
  Fixture fx;
  FPModule M = fx.quot({poly_mul(fx.x, fx.y)});
  CHECK(is_iso(identity_map(M)));
  CHECK(!is_iso(fx.mult(fx.R, fx.x)));
}

TEST_CASE("image matches source modulo kernel on random maps") {
  std::mt19937_64 rng(testutil::suite_seed() + 70);
  auto r = testutil::ring_xy(101);
  int done = 0;
  while (done < 25) {
    FPModule M = random_module(rng, r);
    FPModule N = random_module(rng, r);
    HomModule H = hom_module(M, N);
    if (H.gen_maps.empty()) continue;
    ModuleMap phi = random_hom(rng, H, r, 1);
    ++done;
    auto K = kernel(phi);
    auto I = image(phi);
    // M/ker \simeq image, and the canonical comparison is the identity matrix
    FPModule Q = cokernel(K.inclusion);
    ModuleMap cmp = make_map(Q, I.module, PolyMatrix::identity(r, Q.rank()));
    CHECK(cmp.welldef_cert);
    CHECK(is_iso(cmp));
    // phi vanishes on its kernel
    CHECK(maps_equal_on_gens(compose(phi, K.inclusion), zero_map(K.module, phi.target)));
  }
}

TEST_CASE("localization is exact on random maps") {
  std::mt19937_64 rng(testutil::suite_seed() + 80);
  auto r = testutil::ring_xy(101);
  Poly x = Poly::variable(r, 0);
  int done = 0;
  while (done < 10) {
    FPModule M = random_module(rng, r);
    FPModule N = random_module(rng, r);
    HomModule H = hom_module(M, N);
    if (H.gen_maps.empty()) continue;
    ModuleMap phi = random_hom(rng, H, r, 1);
    ++done;
    // kernel(loc(phi)) = loc(kernel(phi)) as submodules of the source
    ModuleMap lphi = localize_map(phi, x);
    auto k_loc = kernel(lphi);
    auto loc_k = localize(kernel(phi).module, x);
    RingMap incl = RingMap::inclusion(r, lphi.source.ring());
    std::vector<FreeVec> lifted;
    for (const auto& c : kernel(phi).inclusion.mat.columns()) {
      FreeVec v(lphi.source.ring(), lphi.source.rank());
      for (std::size_t i = 0; i < v.rank(); ++i) v[i] = incl.apply(c[i]);
      lifted.push_back(std::move(v));
    }
    // two-way containment modulo the localized relations
    std::vector<FreeVec> span_a = k_loc.inclusion.mat.columns();
    for (const auto& c : lphi.source.relations()) span_a.push_back(c);
    for (const auto& v : lifted) CHECK(in_submodule(v, span_a));
    std::vector<FreeVec> span_b = lifted;
    for (const auto& c : lphi.source.relations()) span_b.push_back(c);
    for (const auto& v : k_loc.inclusion.mat.columns()) CHECK(in_submodule(v, span_b));
    (void)loc_k;
  }
}

TEST_CASE("vector space dimension counting") {
  Fixture fx;
  CHECK(vs_dimension(fx.quot({fx.x, fx.y})) == 1);
  Poly x2 = poly_mul(fx.x, fx.x), y3 = poly_mul(fx.y, poly_mul(fx.y, fx.y));
  CHECK(vs_dimension(fx.quot({x2, y3})) == 6);
  CHECK(!vs_dimension(fx.quot({fx.x})).has_value());
  CHECK(vs_dimension(FPModule::zero_module(fx.r)) == 0);
  CHECK(vs_dimension(direct_sum(fx.quot({fx.x, fx.y}), fx.quot({x2, fx.y}))) == 3);
}

TEST_CASE("tensor products") {
  Fixture fx;
  FPModule A = fx.quot({fx.x});
  FPModule B = fx.quot({fx.y});
  FPModule T = tensor_product(A, B);
  CHECK(ideal_equal(annihilator(T), Ideal(fx.r, {fx.x, fx.y})));
  FPModule TR = tensor_product(A, fx.R);
  CHECK(ideal_equal(annihilator(TR), Ideal(fx.r, {fx.x})));
}

TEST_CASE("trim preserves the isomorphism class") {
  std::mt19937_64 rng(testutil::suite_seed() + 90);
  auto r = testutil::ring_xy(101);
  for (int it = 0; it < 20; ++it) {
    FPModule M = random_module(rng, r);
    auto t = trim(M);
    CHECK(t.to_trimmed.welldef_cert);
    CHECK(t.from_trimmed.welldef_cert);
    CHECK(is_iso(t.to_trimmed));
    CHECK(is_iso(t.from_trimmed));
    CHECK(maps_equal_on_gens(compose(t.from_trimmed, t.to_trimmed), identity_map(M)));
  }
  // a unit pivot removes the generator
  Fixture fx;
  FreeVec c(fx.r, 2);
  c[0] = Poly::constant(fx.r, 1);
  c[1] = fx.x;
  FPModule M(fx.r, 2, {c});
  CHECK(trim(M).module.rank() == 1);
  CHECK(trim(M).module.relations().empty());
}

TEST_CASE("shared caches are safe under concurrent use") {
  std::mt19937_64 rng(testutil::suite_seed() + 100);
  auto r = testutil::ring_xy();
  std::vector<FPModule> mods;
  for (int i = 0; i < 6; ++i) mods.push_back(random_module(rng, r));
  std::vector<std::thread> workers;
  std::vector<int> dims(6 * 4, -7);
  for (int t = 0; t < 4; ++t)
    workers.emplace_back([&, t] {
      for (int i = 0; i < 6; ++i) dims[std::size_t(t * 6 + i)] = module_dim(mods[std::size_t(i)]);
    });
  for (auto& w : workers) w.join();
  for (int i = 0; i < 6; ++i)
    for (int t = 1; t < 4; ++t) CHECK(dims[std::size_t(t * 6 + i)] == dims[std::size_t(i)]);
}
