#include "codimcat/serrequot.hpp"

#include <random>
#include <sstream>

namespace codimcat {

AffineAlgebra make_affine_algebra(RingPtr ring, Ideal defining) {
  if (defining.ring() && !defining.ring()->same_as(*ring))
    throw StructuralError("chart ideal lives in the wrong ring");
  if (defining.is_unit_ideal()) throw StructuralError("chart cut out by the unit ideal is empty");
  if (!defining.ring()) defining = Ideal::zero(ring);
  return AffineAlgebra{std::move(ring), std::move(defining)};
}

int chart_dim(const AffineAlgebra& alg) { return krull_dim(alg.defining); }

FPModule chart_module(const AffineAlgebra& alg, std::size_t rank,
                      const std::vector<FreeVec>& relations) {
  std::vector<FreeVec> rel;
  for (const auto& g : alg.defining.gens())
    for (std::size_t i = 0; i < rank; ++i) {
      FreeVec v(alg.ring, rank);
      v[i] = g;
      rel.push_back(std::move(v));
    }
  for (const auto& c : relations) rel.push_back(c);
  return FPModule(alg.ring, rank, std::move(rel));
}

FPModule chart_cyclic(const AffineAlgebra& alg, const Ideal& I) {
  std::vector<FreeVec> rel;
  for (const auto& g : I.gens()) rel.push_back(FreeVec::from_components({g}));
  return chart_module(alg, 1, rel);
}

QuotientLevel make_level(AffineAlgebra chart, int k) {
  int dim = chart_dim(chart);
  if (k < 0 || k > dim + 1)
    throw StructuralError("level k out of range 0.." + std::to_string(dim + 1));
  return QuotientLevel{std::move(chart), k};
}

int codim_to_k(const AffineAlgebra& alg, int c) { return chart_dim(alg) - c; }

bool is_small(const FPModule& M, const QuotientLevel& level) {
  require_same_ring(M.ring(), level.chart.ring);
  return module_dim(M) <= level.k - 1;
}

bool is_weak_equivalence(const ModuleMap& phi, const QuotientLevel& level) {
  if (!phi.welldef_cert) throw StructuralError("uncertified map in weak equivalence test");
  if (!is_small(cokernel(phi), level)) return false;
  return is_small(kernel(phi).module, level);
}

bool is_zero_in_quotient(const ModuleMap& phi, const QuotientLevel& level) {
  if (!phi.welldef_cert) throw StructuralError("uncertified map in quotient zero test");
  return is_small(image(phi).module, level);
}

Roof roof_make(const QuotientLevel& level, const ModuleMap& s, const ModuleMap& t) {
  if (!s.welldef_cert || !t.welldef_cert)
    throw StructuralError("roof legs must be certified maps");
  if (s.source.rank() != t.source.rank() || !(s.source.relations() == t.source.relations()))
    throw StructuralError("roof legs need a common apex");
  int dk = module_dim(kernel(s).module);
  int dc = module_dim(cokernel(s));
  if (dk > level.k - 1 || dc > level.k - 1) {
    std::ostringstream os;
    os << "left leg is not a weak equivalence at k=" << level.k << " (dim ker " << dk
       << ", dim coker " << dc << ")";
    throw NotWeakEquivalence(os.str());
  }
  return Roof{level, s.source, s, t};
}

Roof roof_identity(const QuotientLevel& level, const FPModule& F) {
  return roof_make(level, identity_map(F), identity_map(F));
}

namespace {

void require_same_level(const QuotientLevel& a, const QuotientLevel& b) {
  if (a.k != b.k || !a.chart.ring->same_as(*b.chart.ring) ||
      !ideal_equal(a.chart.defining, b.chart.defining))
    throw LevelMismatch("quotient levels differ");
}

struct Pullback {
  FPModule apex;
  ModuleMap p1;
  ModuleMap p2;
};

// Fibre product of f1 : E1 -> F and f2 : E2 -> F over F.
Pullback pullback(const ModuleMap& f1, const ModuleMap& f2) {
  FPModule sum = direct_sum(f1.source, f2.source);
  PolyMatrix glue = mat_hcat(f1.mat, mat_neg(f2.mat));
  ModuleMap to_f = make_map(sum, f1.target, glue);
  SubmoduleResult K = kernel(to_f);
  TrimResult tr = trim(K.module);
  ModuleMap incl = compose(K.inclusion, tr.from_trimmed);
  const std::size_t n1 = f1.source.rank();
  const std::size_t n2 = f2.source.rank();
  PolyMatrix m1(incl.mat.ring(), n1, incl.mat.cols());
  PolyMatrix m2(incl.mat.ring(), n2, incl.mat.cols());
  for (std::size_t c = 0; c < incl.mat.cols(); ++c) {
    for (std::size_t i = 0; i < n1; ++i) m1.at(i, c) = incl.mat.at(i, c);
    for (std::size_t i = 0; i < n2; ++i) m2.at(i, c) = incl.mat.at(n1 + i, c);
  }
  Pullback pb;
  pb.apex = tr.module;
  pb.p1 = make_map(tr.module, f1.source, std::move(m1));
  pb.p2 = make_map(tr.module, f2.source, std::move(m2));
  return pb;
}

}  // namespace

Roof roof_compose(const Roof& r2, const Roof& r1) {
  require_same_level(r1.level, r2.level);
  if (r1.to().rank() != r2.from().rank() || !(r1.to().relations() == r2.from().relations()))
    throw StructuralError("roofs do not share the middle object");
  Pullback pb = pullback(r1.t, r2.s);
  return roof_make(r1.level, compose(r1.s, pb.p1), compose(r2.t, pb.p2));
}

bool roof_equal(const Roof& r1, const Roof& r2) {
  require_same_level(r1.level, r2.level);
  if (r1.from().rank() != r2.from().rank() || !(r1.from().relations() == r2.from().relations()) ||
      r1.to().rank() != r2.to().rank() || !(r1.to().relations() == r2.to().relations()))
    throw StructuralError("roofs do not share endpoints");
  Pullback pb = pullback(r1.s, r2.s);
  ModuleMap delta = map_sub(compose(r1.t, pb.p1), compose(r2.t, pb.p2));
  return is_zero_in_quotient(delta, r1.level);
}

bool roof_is_iso(const Roof& r) { return is_weak_equivalence(r.t, r.level); }

bool roof_is_zero(const Roof& r) { return is_zero_in_quotient(r.t, r.level); }

namespace {

std::uint64_t fnv_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Poly probe_poly(std::mt19937_64& rng, const RingPtr& r, int maxdeg) {
  std::vector<Term> ts;
  int terms = 1 + int(rng() % 3);
  for (int t = 0; t < terms; ++t) {
    Monomial m = Monomial::one(r->nvars());
    int budget = int(rng() % std::uint64_t(maxdeg + 1));
    for (int d = 0; d < budget; ++d) {
      std::size_t v = rng() % r->nvars();
      m.exp[v] += 1;
      m.deg += 1;
    }
    ts.push_back({m, std::uint32_t(1 + rng() % (r->modulus() - 1))});
  }
  return Poly::from_terms(r, std::move(ts));
}

}  // namespace

PrimeWitness prime_witness(const Ideal& P, std::uint64_t seed, int probes) {
  if (P.is_unit_ideal()) throw StructuralError("the unit ideal is not a prime witness");
  std::mt19937_64 rng(seed ^ fnv_hash(P.render()));
  const RingPtr& r = P.ring();
  int passed = 0;
  for (int it = 0; it < probes; ++it) {
    Poly f, g;
    int guard = 0;
    do {
      f = probe_poly(rng, r, 3);
    } while (in_ideal(f, P) && ++guard < 64);
    guard = 0;
    do {
      g = probe_poly(rng, r, 3);
    } while (in_ideal(g, P) && ++guard < 64);
    if (in_ideal(f, P) || in_ideal(g, P)) continue;  // degenerate sample, skip
    if (in_ideal(poly_mul(f, g), P)) {
      std::ostringstream os;
      os << "primality probe failed: (" << to_string(f) << ") * (" << to_string(g)
         << ") lies in " << P.render() << " but neither factor does";
      throw PrimalityProbeFailed(os.str());
    }
    ++passed;
  }
  PrimeWitness w;
  w.ideal = P;
  w.dim = krull_dim(P);
  w.probes = passed;
  return w;
}

namespace {

// true iff some generator of I lies outside P
bool not_contained_in(const Ideal& I, const Ideal& P) {
  for (const auto& g : I.gens())
    if (!in_ideal(g, P)) return true;
  return false;
}

}  // namespace

bool stalk_is_residue_field(const FPModule& M, const PrimeWitness& P) {
  const Ideal& prime = P.ideal;
  // supported at P
  Ideal ann = annihilator(M);
  for (const auto& g : ann.gens())
    if (!radical_member(g, prime)) return false;
  // cyclic at P
  if (!not_contained_in(fitting_ideal(M, 1), prime)) return false;
  // P kills the stalk
  for (const auto& p : prime.gens()) {
    std::vector<FreeVec> gens;
    for (std::size_t i = 0; i < M.rank(); ++i) {
      FreeVec v(M.ring(), M.rank());
      v[i] = p;
      gens.push_back(std::move(v));
    }
    FPModule pM = submodule(M, gens).module;
    if (!not_contained_in(annihilator(pM), prime)) return false;
  }
  return true;
}

SuppProfile supp_k(const FPModule& M, const QuotientLevel& level) {
  SuppProfile profile;
  int D = module_dim(M);
  if (D <= level.k - 1) return profile;
  for (int d = D; d >= level.k; --d) {
    FPModule Md = cokernel(torsion_part(M, d - 1).inclusion);
    Ideal Ad = annihilator(Md);
    Ideal Jd = Ad;
    if (!profile.empty()) {
      Ideal higher = profile.front().component;
      for (std::size_t i = 1; i < profile.size(); ++i)
        higher = ideal_product(higher, profile[i].component);
      Jd = saturate(Jd, higher).ideal;
    }
    int dimJ = krull_dim(Jd);
    if (dimJ == d) {
      profile.push_back({d, Jd});
    } else if (dimJ != -1 && dimJ > d) {
      throw VerificationFailed("support stratum of unexpected dimension");
    }
  }
  return profile;
}

bool is_minimal(const FPModule& M, const QuotientLevel& level, const PrimeWitness& P) {
  if (P.dim != level.k)
    throw DimensionMismatch("prime witness has dimension " + std::to_string(P.dim) +
                            ", level expects " + std::to_string(level.k));
  if (is_small(M, level)) return true;  // the zero object is minimal
  FPModule Mp = cokernel(torsion_part(M, level.k - 1).inclusion);
  // support equals V(P) up to radical
  Ideal ann = annihilator(Mp);
  for (const auto& g : ann.gens())
    if (!radical_member(g, P.ideal)) return false;
  for (const auto& p : P.ideal.gens())
    if (!radical_member(p, ann)) return false;
  return stalk_is_residue_field(Mp, P);
}

Roof roof_fraction(const QuotientLevel& level, const PrimeWitness& P, const Poly& a,
                   const Poly& b) {
  if (P.dim != level.k)
    throw DimensionMismatch("fraction roof needs a prime of dimension k=" +
                            std::to_string(level.k));
  if (in_ideal(b, P.ideal)) throw DenominatorInPrime("denominator lies in the prime");
  FPModule OZ = chart_cyclic(level.chart, P.ideal);
  PolyMatrix mb(level.chart.ring, 1, 1), ma(level.chart.ring, 1, 1);
  mb.at(0, 0) = b;
  ma.at(0, 0) = a;
  return roof_make(level, make_map(OZ, OZ, std::move(mb)), make_map(OZ, OZ, std::move(ma)));
}

bool pic_member(const FPModule& L, const QuotientLevel& level, std::uint64_t seed) {
  try {
    (void)prime_witness(level.chart.defining, seed);
  } catch (const PrimalityProbeFailed& e) {
    throw IntegralityRequired(std::string("chart failed integrality probes: ") + e.what());
  }
  FPModule Lp = cokernel(torsion_part(L, level.k - 1).inclusion);
  Ideal f1 = ideal_sum(fitting_ideal(Lp, 1), level.chart.defining);
  if (krull_dim(f1) > level.k - 1) return false;
  Ideal f0 = fitting_ideal(Lp, 0);
  for (const auto& g : f0.gens())
    if (!in_ideal(g, level.chart.defining)) return false;
  return true;
}

Ideal fiber_rank_locus(const FPModule& L, std::size_t r) { return fitting_ideal(L, r); }

namespace {

// inclusion J^{n+1} -> J^n expressed on the chosen power generators
ModuleMap power_inclusion(const FPModule& higher, const FPModule& lower,
                          const std::vector<Poly>& higher_gens,
                          const std::vector<Poly>& lower_gens) {
  const RingPtr& r = higher.ring();
  PolyMatrix m(r, lower_gens.size(), higher_gens.size());
  std::vector<FreeVec> lows;
  for (const auto& g : lower_gens) lows.push_back(FreeVec::from_components({g}));
  for (std::size_t j = 0; j < higher_gens.size(); ++j) {
    auto coeffs = lift_into_submodule(FreeVec::from_components({higher_gens[j]}), lows);
    if (!coeffs)
      throw VerificationFailed("power generator failed to divide into the lower power");
    for (std::size_t i = 0; i < lower_gens.size(); ++i) m.at(i, j) = (*coeffs)[i];
  }
  ModuleMap mm = make_map(higher, lower, std::move(m));
  if (!mm.welldef_cert) throw VerificationFailed("power inclusion failed certification");
  return mm;
}

// coordinates of phi composed with iota over the generators of H_next
std::optional<PolyMatrix> transition_matrix(const HomModule& cur, const HomModule& next,
                                            const ModuleMap& iota) {
  const RingPtr& r = cur.N.ring();
  const std::size_t nN = cur.N.rank();
  const std::size_t nM_next = next.M.rank();
  std::vector<FreeVec> target = next.flat_gens;
  std::vector<FreeVec> ambient_rel;
  for (std::size_t j = 0; j < nM_next; ++j)
    for (const auto& w : cur.N.relations()) {
      FreeVec v(r, nN * nM_next);
      for (std::size_t i = 0; i < nN; ++i) v[i * nM_next + j] = w[i];
      ambient_rel.push_back(v);
      target.push_back(v);
    }
  PolyMatrix out(r, next.gen_maps.size(), cur.gen_maps.size());
  for (std::size_t l = 0; l < cur.gen_maps.size(); ++l) {
    ModuleMap comp = compose(cur.gen_maps[l], iota);
    FreeVec flat(r, nN * nM_next);
    for (std::size_t i = 0; i < nN; ++i)
      for (std::size_t j = 0; j < nM_next; ++j) flat[i * nM_next + j] = comp.mat.at(i, j);
    auto coeffs = lift_into_submodule(flat, target);
    if (!coeffs) return std::nullopt;
    for (std::size_t g = 0; g < next.gen_maps.size(); ++g) out.at(g, l) = (*coeffs)[g];
  }
  return out;
}

}  // namespace

HomSections hom_quotient_sections(const FPModule& F, const FPModule& G,
                                  const QuotientLevel& level, const Ideal& J, int n_max) {
  if (n_max < 0) throw StructuralError("n_max must be nonnegative");
  if (krull_dim(ideal_sum(J, level.chart.defining)) > level.k - 1)
    throw BadLocusTooBig("V(J) must miss every point of dimension at least k");

  FPModule Gp = cokernel(torsion_wrt(G, J).inclusion);
  FPModule H = hom_module(F, Gp).hom;

  // Hom(J^n, H) along the tower of power inclusions
  auto power_gens = [&](int n) -> std::vector<Poly> {
    if (n == 0) return {Poly::constant(level.chart.ring, 1)};
    return ideal_power(J, std::uint32_t(n)).gens();
  };
  auto power_module = [&](const std::vector<Poly>& gens) {
    std::vector<FreeVec> vecs;
    for (const auto& g : gens) vecs.push_back(FreeVec::from_components({g}));
    FPModule chart_unit = chart_cyclic(level.chart, Ideal::zero(level.chart.ring));
    return submodule(chart_unit, vecs).module;
  };

  std::vector<std::vector<Poly>> gens;
  std::vector<FPModule> powers;
  std::vector<HomModule> homs;
  std::vector<bool> tau_iso;
  auto ensure = [&](int n) {
    while (int(homs.size()) <= n) {
      int m = int(homs.size());
      gens.push_back(power_gens(m));
      powers.push_back(power_module(gens.back()));
      homs.push_back(hom_module(powers.back(), H));
      if (m >= 1) {
        ModuleMap iota = power_inclusion(powers[m], powers[m - 1], gens[m], gens[m - 1]);
        auto tm = transition_matrix(homs[m - 1], homs[m], iota);
        if (!tm) throw VerificationFailed("transition map failed to lift");
        ModuleMap tau = make_map(homs[m - 1].hom, homs[m].hom, std::move(*tm));
        if (!tau.welldef_cert) throw VerificationFailed("transition map failed certification");
        tau_iso.push_back(is_iso(tau));
      }
    }
  };

  for (int n = 0; n + 2 <= n_max; ++n) {
    ensure(n + 2);
    if (tau_iso[std::size_t(n)] && tau_iso[std::size_t(n) + 1])
      return HomSections{homs[std::size_t(n)].hom, true, n};
  }
  ensure(n_max);
  return HomSections{homs[std::size_t(n_max)].hom, false, n_max};
}

bool stalk_zero_test(const ModuleMap& phi, const PrimeWitness& P) {
  if (!phi.welldef_cert) throw StructuralError("uncertified map in stalk test");
  return not_contained_in(annihilator(image(phi).module), P.ideal);
}

std::vector<FPModule> ideal_power_filtration(const FPModule& M, const Ideal& I) {
  Ideal ann = annihilator(M);
  for (const auto& g : I.gens())
    if (!radical_member(g, ann))
      throw SupportNotContained("the support of M must lie inside V(I)");

  const RingPtr& r = M.ring();
  auto power_cols = [&](std::uint32_t a) {
    std::vector<FreeVec> cols;
    std::vector<Poly> pg =
        a == 0 ? std::vector<Poly>{Poly::constant(r, 1)} : ideal_power(I, a).gens();
    for (const auto& p : pg)
      for (std::size_t i = 0; i < M.rank(); ++i) {
        FreeVec v(r, M.rank());
        v[i] = p;
        cols.push_back(std::move(v));
      }
    return cols;
  };
  auto contained_in_rel = [&](const std::vector<FreeVec>& cols) {
    const auto& gb = M.relation_basis();
    ModuleOrder mo = ModuleOrder::pot(M.rank());
    for (const auto& c : cols) {
      if (c.is_zero()) continue;
      if (gb.empty() || !vec_normal_form(c, gb, mo).is_zero()) return false;
    }
    return true;
  };

  std::vector<FPModule> layers;
  std::vector<FreeVec> cur = power_cols(0);
  for (std::uint32_t a = 0; a <= 64; ++a) {
    if (contained_in_rel(cur)) return layers;
    std::vector<FreeVec> next = power_cols(a + 1);
    // layer = I^a M / I^{a+1} M presented on the degree-a product generators
    std::vector<FreeVec> modulus = next;
    for (const auto& c : M.relations()) modulus.push_back(c);
    std::vector<FreeVec> combined = cur;
    for (const auto& c : modulus) combined.push_back(c);
    auto syz = syzygies(combined);
    std::vector<FreeVec> rel;
    for (const auto& s : syz) {
      FreeVec c(r, cur.size());
      bool nz = false;
      for (std::size_t j = 0; j < cur.size(); ++j) {
        c[j] = s[j];
        nz = nz || !s[j].is_zero();
      }
      if (nz) rel.push_back(std::move(c));
    }
    FPModule layer(r, cur.size(), std::move(rel));
    // each layer is killed by I
    const auto& gb = layer.relation_basis();
    ModuleOrder mo = ModuleOrder::pot(layer.rank());
    for (const auto& g : I.gens())
      for (std::size_t i = 0; i < layer.rank(); ++i) {
        FreeVec v(r, layer.rank());
        v[i] = g;
        if (gb.empty() || !vec_normal_form(v, gb, mo).is_zero())
          throw VerificationFailed("filtration layer is not killed by I");
      }
    layers.push_back(std::move(layer));
    cur = std::move(next);
  }
  throw ResourceExceeded("power filtration did not terminate within 64 steps");
}

}  // namespace codimcat
