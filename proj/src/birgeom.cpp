#include "codimcat/birgeom.hpp"

#include <algorithm>
#include <sstream>

namespace codimcat {

namespace {

bool is_unit_constant(const Poly& f) { return !f.is_zero() && f.is_constant(); }

Poly transfer_by_name(const Poly& f, const RingPtr& dst,
                      const std::vector<std::string>& rename_from = {},
                      const std::vector<std::string>& rename_to = {}) {
  if (f.is_zero()) return Poly::zero(dst);
  const auto& src = f.ring();
  std::vector<std::size_t> where(src->nvars());
  for (std::size_t i = 0; i < src->nvars(); ++i) {
    std::string name = src->vars()[i];
    for (std::size_t k = 0; k < rename_from.size(); ++k)
      if (rename_from[k] == name) name = rename_to[k];
    auto idx = dst->var_index(name);
    if (!idx) {
      // variables missing from the target may only occur with exponent zero
      if (f.degree_in(i) > 0)
        throw StructuralError("cannot transfer variable '" + name + "'");
      where[i] = 0;
      continue;
    }
    where[i] = *idx;
  }
  std::vector<Term> terms;
  for (const auto& t : f.terms()) {
    Monomial m = Monomial::one(dst->nvars());
    for (std::size_t i = 0; i < t.mono.exp.size(); ++i) {
      if (!t.mono.exp[i]) continue;
      m.exp[where[i]] += t.mono.exp[i];
      m.deg += t.mono.exp[i];
    }
    terms.push_back({std::move(m), t.coeff});
  }
  return Poly::from_terms(dst, std::move(terms));
}

struct Frac {
  Poly num;
  Poly den;
};

Frac frac_mul(const Frac& a, const Frac& b) {
  return {poly_mul(a.num, b.num), poly_mul(a.den, b.den)};
}

Frac frac_add(const Frac& a, const Frac& b) {
  return {poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den)), poly_mul(a.den, b.den)};
}

// evaluate f under variable -> fraction, with a common cleared denominator
Frac frac_eval(const Poly& f, const std::vector<Frac>& images, const RingPtr& dst) {
  Frac acc{Poly::zero(dst), Poly::constant(dst, 1)};
  for (const auto& t : f.terms()) {
    Frac term{Poly::constant(dst, std::int64_t(t.coeff)), Poly::constant(dst, 1)};
    for (std::size_t v = 0; v < t.mono.exp.size(); ++v)
      for (std::uint32_t e = 0; e < t.mono.exp[v]; ++e) term = frac_mul(term, images[v]);
    acc = frac_add(acc, term);
  }
  return acc;
}

}  // namespace

SideRing make_side(const AffineAlgebra& alg, const Poly& s, const std::string& hint) {
  if (s.is_zero()) throw StructuralError("cannot invert zero on a chart");
  SideRing side;
  side.inverted = s;
  if (is_unit_constant(s)) {
    side.ring = alg.ring;
    side.defining = alg.defining;
    return side;
  }
  RingPtr ext = alg.ring->extended(hint, alg.ring->order());
  side.ring = ext;
  side.inv = ext->nvars() - 1;
  RingMap incl = RingMap::inclusion(alg.ring, ext);
  std::vector<Poly> gens;
  for (const auto& g : alg.defining.gens()) gens.push_back(incl.apply(g));
  gens.push_back(
      poly_sub(poly_mul(Poly::variable(ext, *side.inv), incl.apply(s)), Poly::constant(ext, 1)));
  side.defining = Ideal(ext, std::move(gens));
  return side;
}

std::optional<Poly> ring_inverse(const SideRing& side, const Poly& u) {
  if (u.is_zero()) return std::nullopt;
  if (is_unit_constant(u))
    return Poly::constant(side.ring, 1 * std::int64_t(side.ring->field().inv(u.lc())));
  std::vector<FreeVec> gens;
  gens.push_back(FreeVec::from_components({u}));
  for (const auto& g : side.defining.gens()) gens.push_back(FreeVec::from_components({g}));
  FreeVec one = FreeVec::from_components({Poly::constant(side.ring, 1)});
  auto coeffs = lift_into_submodule(one, gens);
  if (!coeffs) return std::nullopt;
  return normal_form((*coeffs)[0], side.defining.groebner());
}

namespace {

// substitution map locB -> locA extending the forward generator images
std::optional<RingMap> cross_map(const SideRing& from, const SideRing& to,
                                 const AffineAlgebra& from_base, const std::vector<Poly>& images) {
  std::vector<Poly> full;
  for (const auto& f : images) full.push_back(f);
  if (from.inv) {
    RingMap base_map(from_base.ring, to.ring, images);
    Poly image_of_inverted = base_map.apply(from.inverted);
    auto inv = ring_inverse(to, image_of_inverted);
    if (!inv) return std::nullopt;
    full.push_back(*inv);
  }
  return RingMap(from.ring, to.ring, std::move(full));
}

struct CertifyResult {
  bool ok = false;
  std::string reason;
};

CertifyResult certify(const IsoWitness& w) {
  CertifyResult res;
  RingMap fwd_base(w.B.ring, w.locA.ring, w.forward);
  RingMap bwd_base(w.A.ring, w.locB.ring, w.backward);
  const auto& gbA = w.locA.defining.groebner();
  const auto& gbB = w.locB.defining.groebner();

  for (const auto& b : w.B.defining.gens())
    if (!normal_form(fwd_base.apply(b), gbA).is_zero()) {
      res.reason = "forward images do not satisfy the target relations";
      return res;
    }
  for (const auto& a : w.A.defining.gens())
    if (!normal_form(bwd_base.apply(a), gbB).is_zero()) {
      res.reason = "backward images do not satisfy the source relations";
      return res;
    }

  auto fwd_ext = cross_map(w.locB, w.locA, w.B, w.forward);
  if (!fwd_ext) {
    res.reason = "the inverted element of the target is not invertible on the source side";
    return res;
  }
  auto bwd_ext = cross_map(w.locA, w.locB, w.A, w.backward);
  if (!bwd_ext) {
    res.reason = "the inverted element of the source is not invertible on the target side";
    return res;
  }

  for (std::size_t j = 0; j < w.A.ring->nvars(); ++j) {
    Poly diff = poly_sub(fwd_ext->apply(w.backward[j]), Poly::variable(w.locA.ring, j));
    if (!normal_form(diff, gbA).is_zero()) {
      res.reason = "composite is not the identity on source generator '" +
                   w.A.ring->vars()[j] + "'";
      return res;
    }
  }
  for (std::size_t i = 0; i < w.B.ring->nvars(); ++i) {
    Poly diff = poly_sub(bwd_ext->apply(w.forward[i]), Poly::variable(w.locB.ring, i));
    if (!normal_form(diff, gbB).is_zero()) {
      res.reason = "composite is not the identity on target generator '" +
                   w.B.ring->vars()[i] + "'";
      return res;
    }
  }
  res.ok = true;
  return res;
}

int bad_locus_dim(const AffineAlgebra& alg, const Poly& s) {
  if (is_unit_constant(s)) return -1;
  return krull_dim(ideal_sum(alg.defining, Ideal(alg.ring, {s})));
}

void finish_witness(IsoWitness& w) {
  CertifyResult c = certify(w);
  w.certified = c.ok;
  w.reason = c.ok ? "" : c.reason;
  w.bad_dim_A = bad_locus_dim(w.A, w.locA.inverted);
  w.bad_dim_B = bad_locus_dim(w.B, w.locB.inverted);
}

Poly normalize_side(const SideRing& side, const Poly& f) {
  return normal_form(f, side.defining.groebner());
}

}  // namespace

IsoWitness make_witness(const AffineAlgebra& A, const AffineAlgebra& B, const Poly& s,
                        const Poly& t, const std::vector<Fraction>& forward,
                        const std::vector<Fraction>& backward) {
  if (forward.size() != B.ring->nvars())
    throw StructuralError("need one forward image per target generator");
  if (backward.size() != A.ring->nvars())
    throw StructuralError("need one backward image per source generator");
  IsoWitness w;
  w.A = A;
  w.B = B;
  w.locA = make_side(A, s, "sinv");
  w.locB = make_side(B, t, "tinv");
  RingMap inclA = RingMap::inclusion(A.ring, w.locA.ring);
  RingMap inclB = RingMap::inclusion(B.ring, w.locB.ring);
  for (const auto& fr : forward) {
    auto inv = ring_inverse(w.locA, inclA.apply(fr.den));
    if (!inv) throw NotLocalIso("a forward denominator is not invertible after localizing");
    w.forward.push_back(normalize_side(w.locA, poly_mul(inclA.apply(fr.num), *inv)));
  }
  for (const auto& fr : backward) {
    auto inv = ring_inverse(w.locB, inclB.apply(fr.den));
    if (!inv) throw NotLocalIso("a backward denominator is not invertible after localizing");
    w.backward.push_back(normalize_side(w.locB, poly_mul(inclB.apply(fr.num), *inv)));
  }
  finish_witness(w);
  return w;
}

IsoWitness identity_witness(const AffineAlgebra& A) {
  std::vector<Fraction> images;
  for (std::size_t i = 0; i < A.ring->nvars(); ++i)
    images.push_back({Poly::variable(A.ring, i), Poly::constant(A.ring, 1)});
  return make_witness(A, A, Poly::constant(A.ring, 1), Poly::constant(A.ring, 1), images,
                      images);
}

IsoWitness reverse_witness(const IsoWitness& w) {
  IsoWitness r;
  r.A = w.B;
  r.B = w.A;
  r.locA = w.locB;
  r.locB = w.locA;
  r.forward = w.backward;
  r.backward = w.forward;
  finish_witness(r);
  return r;
}

IsoWitness localize_witness(const IsoWitness& w) {
  AffineAlgebra Aloc{w.locA.ring, w.locA.defining};
  AffineAlgebra Bloc{w.locB.ring, w.locB.defining};
  IsoWitness r;
  r.A = Aloc;
  r.B = Bloc;
  r.locA = SideRing{Aloc.ring, Aloc.defining, std::nullopt, Poly::constant(Aloc.ring, 1)};
  r.locB = SideRing{Bloc.ring, Bloc.defining, std::nullopt, Poly::constant(Bloc.ring, 1)};
  // generator images of the localized charts: the original images plus
  // the inverses of the inverted elements
  r.forward = w.forward;
  if (w.locB.inv) {
    RingMap fwd(w.B.ring, w.locA.ring, w.forward);
    auto inv = ring_inverse(w.locA, fwd.apply(w.locB.inverted));
    if (!inv) throw NotLocalIso("cannot localize an uncertified witness");
    r.forward.push_back(*inv);
  }
  r.backward = w.backward;
  if (w.locA.inv) {
    RingMap bwd(w.A.ring, w.locB.ring, w.backward);
    auto inv = ring_inverse(w.locB, bwd.apply(w.locA.inverted));
    if (!inv) throw NotLocalIso("cannot localize an uncertified witness");
    r.backward.push_back(*inv);
  }
  finish_witness(r);
  return r;
}

WitnessVerdict verify_iso_witness(const IsoWitness& w, int k) {
  WitnessVerdict v;
  if (!w.certified) {
    v.reason = w.reason.empty() ? "witness is not certified" : w.reason;
    return v;
  }
  if (w.bad_dim_A > k - 1 || w.bad_dim_B > k - 1) {
    std::ostringstream os;
    os << "removed loci have dimensions (" << w.bad_dim_A << ", " << w.bad_dim_B
       << "), not allowed at level k=" << k;
    v.reason = os.str();
    return v;
  }
  v.ok = true;
  return v;
}

IsoWitness extend_local_iso(const AffineAlgebra& A, const AffineAlgebra& B,
                            const std::vector<Fraction>& gen_images, const PrimeWitness& P,
                            const PrimeWitness& Q, std::uint64_t seed) {
  if (gen_images.size() != B.ring->nvars())
    throw StructuralError("need one generator image per target generator");
  for (const auto& g : A.defining.gens())
    if (!in_ideal(g, P.ideal))
      throw StructuralError("the source prime does not lie on the source chart");
  for (const auto& g : B.defining.gens())
    if (!in_ideal(g, Q.ideal))
      throw StructuralError("the target prime does not lie on the target chart");
  for (const auto& fr : gen_images) {
    if (fr.den.is_zero()) throw StructuralError("zero denominator in a generator image");
    if (in_ideal(fr.den, P.ideal))
      throw NotLocalIso("a denominator vanishes at the witness prime");
  }

  // the product of the distinct denominators, possibly enlarged below
  std::vector<Poly> s_factors;
  auto push_factor = [&](const Poly& f) {
    if (is_unit_constant(f)) return;
    for (const auto& g : s_factors)
      if (g == f) return;
    s_factors.push_back(f);
  };
  for (const auto& fr : gen_images) push_factor(fr.den);

  for (int round = 0; round < 3; ++round) {
    Poly s = Poly::constant(A.ring, 1);
    for (const auto& f : s_factors) s = poly_mul(s, f);
    SideRing locA = make_side(A, s, "sinv");
    RingMap inclA = RingMap::inclusion(A.ring, locA.ring);

    std::vector<Poly> forward;
    for (const auto& fr : gen_images) {
      auto inv = ring_inverse(locA, inclA.apply(fr.den));
      if (!inv) throw NotLocalIso("a denominator is not invertible after localizing");
      forward.push_back(normalize_side(locA, poly_mul(inclA.apply(fr.num), *inv)));
    }
    RingMap fwd_base(B.ring, locA.ring, forward);
    for (const auto& b : B.defining.gens())
      if (!normalize_side(locA, fwd_base.apply(b)).is_zero())
        throw NotLocalIso("forward images do not satisfy the target relations");

    // the witness prime of the target must pull back into the source prime
    std::vector<Poly> p_side_gens;
    for (const auto& g : P.ideal.gens()) p_side_gens.push_back(inclA.apply(g));
    if (locA.inv)
      for (const auto& g : locA.defining.gens()) p_side_gens.push_back(g);
    Ideal P_side(locA.ring, p_side_gens);
    for (const auto& q : Q.ideal.gens())
      if (!in_ideal(fwd_base.apply(q), P_side))
        throw NotLocalIso("generator images do not carry the target prime into the source prime");

    // graph ring: source variables, one inverter, renamed target variables
    std::vector<std::string> gvars = A.ring->vars();
    std::vector<std::string> ren_from, ren_to;
    auto taken = [&](const std::string& n) {
      return std::find(gvars.begin(), gvars.end(), n) != gvars.end();
    };
    std::string uname = "u";
    for (int i = 0; taken(uname) ||
                    std::find(ren_to.begin(), ren_to.end(), uname) != ren_to.end();
         ++i)
      uname = "u" + std::to_string(i);
    gvars.push_back(uname);
    for (const auto& bv : B.ring->vars()) {
      std::string name = bv;
      while (taken(name)) name += "_b";
      ren_from.push_back(bv);
      ren_to.push_back(name);
      gvars.push_back(name);
    }
    RingPtr graph = PolyRing::make(A.ring->modulus(), gvars, MonomialOrder{OrderKind::Grevlex, 0},
                                   A.ring->limits());
    const std::size_t nA = A.ring->nvars();
    std::vector<Poly> ggens;
    for (const auto& g : A.defining.gens()) ggens.push_back(transfer_by_name(g, graph));
    for (const auto& g : B.defining.gens())
      ggens.push_back(transfer_by_name(g, graph, ren_from, ren_to));
    for (std::size_t i = 0; i < gen_images.size(); ++i) {
      Poly y = Poly::variable(graph, nA + 1 + i);
      ggens.push_back(poly_sub(poly_mul(transfer_by_name(gen_images[i].den, graph), y),
                               transfer_by_name(gen_images[i].num, graph)));
    }
    ggens.push_back(poly_sub(poly_mul(Poly::variable(graph, nA), transfer_by_name(s, graph)),
                             Poly::constant(graph, 1)));
    Ideal Gamma(graph, ggens);

    // one elimination per source generator, keeping only that generator
    std::vector<Fraction> back_fracs;
    bool all_found = true;
    for (std::size_t j = 0; j < nA && all_found; ++j) {
      std::vector<std::size_t> kill;
      for (std::size_t v = 0; v < nA; ++v)
        if (v != j) kill.push_back(v);
      kill.push_back(nA);  // the inverter
      Ideal Ej = eliminate(Gamma, kill);
      // x_j sits at index 0 of the elimination ring
      std::optional<Fraction> best;
      auto better = [&](const Fraction& a, const Fraction& b) {
        auto key = [](const Fraction& f) {
          return std::make_tuple(f.den.degree(), f.num.degree(), to_string(f.den),
                                 to_string(f.num));
        };
        return key(a) < key(b);
      };
      for (const auto& g : Ej.gens()) {
        if (g.degree_in(0) != 1) continue;
        std::vector<Term> cterms, eterms;
        for (const auto& t : g.terms()) {
          if (t.mono.exp[0] == 1) {
            Monomial m = t.mono;
            m.exp[0] = 0;
            m.deg -= 1;
            cterms.push_back({std::move(m), t.coeff});
          } else {
            eterms.push_back(t);
          }
        }
        Poly c = transfer_by_name(Poly::from_terms(Ej.ring(), cterms), B.ring, ren_to, ren_from);
        Poly e = transfer_by_name(Poly::from_terms(Ej.ring(), eterms), B.ring, ren_to, ren_from);
        if (c.is_zero() || in_ideal(c, Q.ideal)) continue;
        // a unit rescale keeps denominators monic and the output canonical
        std::uint32_t ic = B.ring->field().inv(c.lc());
        c = poly_scale(c, ic);
        e = poly_scale(e, ic);
        Fraction cand{poly_neg(e), c};
        if (!best || better(cand, *best)) best = cand;
      }
      if (!best) {
        all_found = false;
        break;
      }
      back_fracs.push_back(*best);
    }
    if (!all_found)
      throw NotLocalIso("no denominator-free preimage found within the degree bound");

    // the inverted target element: distinct backward denominators, then
    // enough to make the backward image of s invertible
    std::vector<Poly> t_factors;
    auto push_t = [&](const Poly& f) {
      if (is_unit_constant(f)) return;
      for (const auto& g : t_factors)
        if (g == f) return;
      t_factors.push_back(f);
    };
    for (const auto& fr : back_fracs) push_t(fr.den);

    // forward-side invertibility of t: enlarge s and restart when it fails
    {
      Poly t_try = Poly::constant(B.ring, 1);
      for (const auto& f : t_factors) t_try = poly_mul(t_try, f);
      std::vector<Frac> fwd_fracs;
      for (const auto& fr : gen_images) fwd_fracs.push_back({fr.num, fr.den});
      Frac ft = frac_eval(t_try, fwd_fracs, A.ring);
      if (!ring_inverse(locA, inclA.apply(ft.num))) {
        if (in_ideal(ft.num, P.ideal))
          throw NotLocalIso("the backward denominators degenerate at the witness prime");
        push_factor(poly_monic(ft.num));
        continue;  // restart with the larger localization
      }
    }

    std::vector<Frac> bwd_fracs;
    for (const auto& fr : back_fracs) bwd_fracs.push_back({fr.num, fr.den});
    Frac fs = frac_eval(s, bwd_fracs, B.ring);
    std::vector<Poly> t_probe = t_factors;
    {
      // make the backward image of s invertible on the target side
      Poly t_try = Poly::constant(B.ring, 1);
      for (const auto& f : t_probe) t_try = poly_mul(t_try, f);
      SideRing locB_try = make_side(B, t_try, "tinv");
      if (!ring_inverse(locB_try, RingMap::inclusion(B.ring, locB_try.ring).apply(fs.num)))
        push_t(poly_monic(fs.num));
    }
    Poly t = Poly::constant(B.ring, 1);
    for (const auto& f : t_factors) t = poly_mul(t, f);

    IsoWitness w;
    w.A = A;
    w.B = B;
    w.locA = locA;
    w.locB = make_side(B, t, "tinv");
    w.forward = forward;
    RingMap inclB = RingMap::inclusion(B.ring, w.locB.ring);
    for (const auto& fr : back_fracs) {
      auto inv = ring_inverse(w.locB, inclB.apply(fr.den));
      if (!inv) throw NotLocalIso("a backward denominator is not invertible after localizing");
      w.backward.push_back(normalize_side(w.locB, poly_mul(inclB.apply(fr.num), *inv)));
    }
    finish_witness(w);
    if (!w.certified) throw NotLocalIso(w.reason);

    // degree-one guard at the witness prime: the fibre over Q is the
    // residue field at P
    std::vector<Poly> fib_rel;
    for (const auto& g : locA.defining.gens()) fib_rel.push_back(g);
    for (const auto& q : Q.ideal.gens()) fib_rel.push_back(fwd_base.apply(q));
    FPModule fibre = FPModule::cyclic(Ideal(locA.ring, fib_rel));
    PrimeWitness P_ext = prime_witness(P_side, seed);
    if (!stalk_is_residue_field(fibre, P_ext))
      throw NotLocalIso("the map is not of degree one at the witness prime");
    return w;
  }
  throw NotLocalIso("localization did not stabilize while extending the local isomorphism");
}

namespace {

// numerator after clearing the inverter variable by powers of side.inverted
Poly clear_inverter(const Poly& f, const SideRing& side, const AffineAlgebra& base) {
  if (!side.inv) return transfer_by_name(f, base.ring);
  const std::size_t iv = *side.inv;
  std::uint32_t emax = 0;
  for (const auto& t : f.terms()) emax = std::max(emax, t.mono.exp[iv]);
  Poly acc = Poly::zero(base.ring);
  for (const auto& t : f.terms()) {
    Monomial m = t.mono;
    std::uint32_t e = m.exp[iv];
    m.deg -= e;
    m.exp[iv] = 0;
    Poly piece = transfer_by_name(Poly::term(f.ring(), m, std::int64_t(t.coeff)), base.ring);
    acc = poly_add(acc, poly_mul(piece, poly_pow(side.inverted, emax - e)));
  }
  return acc;
}

}  // namespace

IsoWitness witness_compose(const IsoWitness& w1, const IsoWitness& w2) {
  if (!w1.certified || !w2.certified)
    throw UncertifiedWitness("both factors of a composition must be certified");
  if (!w1.A.ring->same_as(*w1.B.ring) || !w2.A.ring->same_as(*w2.B.ring) ||
      !w1.A.ring->same_as(*w2.A.ring))
    throw StructuralError("witness composition needs self-maps on one chart");
  const AffineAlgebra& A = w1.A;

  // forward of the composite: apply w1 forward, then w2 forward extended
  Poly n1 = poly_monic(clear_inverter(
      RingMap(A.ring, w2.locA.ring, w2.forward).apply(w1.locA.inverted), w2.locA, A));
  Poly s_new = poly_mul(w2.locA.inverted, n1);
  SideRing locA = make_side(A, s_new, "sinv");
  std::vector<Poly> w2_on_new;
  {
    std::vector<Poly> imgs;
    for (std::size_t i = 0; i < A.ring->nvars(); ++i) {
      auto idx = locA.ring->var_index(A.ring->vars()[i]);
      imgs.push_back(Poly::variable(locA.ring, *idx));
    }
    if (w2.locA.inv) {
      auto inv = ring_inverse(locA, transfer_by_name(w2.locA.inverted, locA.ring));
      if (!inv) throw NotLocalIso("composition lost invertibility of the inner localization");
      imgs.push_back(*inv);
    }
    RingMap move(w2.locA.ring, locA.ring, imgs);
    for (const auto& f : w2.forward) w2_on_new.push_back(move.apply(f));
  }
  std::vector<Poly> fwd;
  {
    std::vector<Poly> imgs = w2_on_new;
    if (w1.locA.inv) {
      Poly u1 = RingMap(A.ring, locA.ring, w2_on_new).apply(w1.locA.inverted);
      auto inv = ring_inverse(locA, u1);
      if (!inv) throw NotLocalIso("composition lost invertibility of the outer localization");
      imgs.push_back(*inv);
    }
    RingMap ext(w1.locA.ring, locA.ring, imgs);
    for (const auto& f : w1.forward) fwd.push_back(normalize_side(locA, ext.apply(f)));
  }

  // backward of the composite: apply w2 backward, then w1 backward extended
  Poly n2 = poly_monic(clear_inverter(
      RingMap(A.ring, w1.locB.ring, w1.backward).apply(w2.locB.inverted), w1.locB, A));
  Poly t_new = poly_mul(w1.locB.inverted, n2);
  SideRing locB = make_side(A, t_new, "tinv");
  std::vector<Poly> w1_on_new;
  {
    std::vector<Poly> imgs;
    for (std::size_t i = 0; i < A.ring->nvars(); ++i) {
      auto idx = locB.ring->var_index(A.ring->vars()[i]);
      imgs.push_back(Poly::variable(locB.ring, *idx));
    }
    if (w1.locB.inv) {
      auto inv = ring_inverse(locB, transfer_by_name(w1.locB.inverted, locB.ring));
      if (!inv) throw NotLocalIso("composition lost invertibility of the inner localization");
      imgs.push_back(*inv);
    }
    RingMap move(w1.locB.ring, locB.ring, imgs);
    for (const auto& f : w1.backward) w1_on_new.push_back(move.apply(f));
  }
  std::vector<Poly> bwd;
  {
    std::vector<Poly> imgs = w1_on_new;
    if (w2.locB.inv) {
      Poly u2 = RingMap(A.ring, locB.ring, w1_on_new).apply(w2.locB.inverted);
      auto inv = ring_inverse(locB, u2);
      if (!inv) throw NotLocalIso("composition lost invertibility of the outer localization");
      imgs.push_back(*inv);
    }
    RingMap ext(w2.locB.ring, locB.ring, imgs);
    for (const auto& f : w2.backward) bwd.push_back(normalize_side(locB, ext.apply(f)));
  }

  IsoWitness w;
  w.A = A;
  w.B = A;
  w.locA = locA;
  w.locB = locB;
  w.forward = fwd;
  w.backward = bwd;
  finish_witness(w);
  if (!w.certified) throw NotLocalIso("composite witness failed certification: " + w.reason);
  return w;
}

AffineAlgebra transport_chart(const IsoWitness& w) {
  return AffineAlgebra{w.locB.ring, w.locB.defining};
}

FPModule transport_module(const IsoWitness& w, const FPModule& M) {
  if (!w.certified) throw UncertifiedWitness("transport requires a certified witness");
  require_same_ring(M.ring(), w.A.ring);
  RingMap bwd(w.A.ring, w.locB.ring, w.backward);
  std::vector<FreeVec> rel;
  for (const auto& g : w.locB.defining.gens())
    for (std::size_t i = 0; i < M.rank(); ++i) {
      FreeVec v(w.locB.ring, M.rank());
      v[i] = g;
      rel.push_back(std::move(v));
    }
  for (const auto& c : M.relations()) {
    FreeVec v(w.locB.ring, M.rank());
    for (std::size_t i = 0; i < M.rank(); ++i) v[i] = bwd.apply(c[i]);
    rel.push_back(std::move(v));
  }
  return FPModule(w.locB.ring, M.rank(), std::move(rel));
}

ModuleMap transport_map(const IsoWitness& w, const ModuleMap& phi) {
  if (!w.certified) throw UncertifiedWitness("transport requires a certified witness");
  if (!phi.welldef_cert) throw StructuralError("uncertified map in transport");
  RingMap bwd(w.A.ring, w.locB.ring, w.backward);
  FPModule src = transport_module(w, phi.source);
  FPModule dst = transport_module(w, phi.target);
  PolyMatrix m(w.locB.ring, phi.mat.rows(), phi.mat.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = bwd.apply(phi.mat.at(i, j));
  ModuleMap out = make_map(src, dst, std::move(m));
  if (!out.welldef_cert) throw VerificationFailed("transported map failed certification");
  return out;
}

EquivCheckReport quotient_equiv_check(const IsoWitness& w, int k,
                                      const std::vector<ModuleMap>& samples) {
  WitnessVerdict v = verify_iso_witness(w, k);
  if (!v.ok) throw UncertifiedWitness("witness does not verify at this level: " + v.reason);
  QuotientLevel src = make_level(AffineAlgebra{w.A.ring, w.A.defining}, k);
  QuotientLevel dst = make_level(transport_chart(w), k);
  EquivCheckReport rep;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ModuleMap& phi = samples[i];
    ModuleMap psi = transport_map(w, phi);
    ++rep.checked;
    if (is_zero_in_quotient(phi, src) != is_zero_in_quotient(psi, dst))
      rep.zero_disagreements.push_back(i);
    if (is_weak_equivalence(phi, src) != is_weak_equivalence(psi, dst))
      rep.weq_disagreements.push_back(i);
  }
  return rep;
}

FPModule ideal_module_on_chart(const AffineAlgebra& alg, const std::vector<Poly>& gens) {
  FPModule unit = chart_cyclic(alg, Ideal::zero(alg.ring));
  std::vector<FreeVec> vecs;
  for (const auto& g : gens)
    if (!g.is_zero()) vecs.push_back(FreeVec::from_components({g}));
  if (vecs.empty()) throw StructuralError("a line class needs at least one nonzero generator");
  return submodule(unit, vecs).module;
}

AutoEq autoeq_make(const IsoWitness& w, std::vector<Poly> line_gens, int k, std::uint64_t seed) {
  if (!w.certified) throw UncertifiedWitness("autoequivalences need certified witnesses");
  if (!w.A.ring->same_as(*w.B.ring) || !ideal_equal(w.A.defining, w.B.defining))
    throw StructuralError("autoequivalences act on a single chart");
  WitnessVerdict v = verify_iso_witness(w, k);
  if (!v.ok) throw UncertifiedWitness(v.reason);
  FPModule L = ideal_module_on_chart(w.A, line_gens);
  QuotientLevel lvl = make_level(w.A, k);
  if (!pic_member(L, lvl, seed))
    throw StructuralError("the line class is not invertible away from dimension k-1");
  return AutoEq{w, std::move(line_gens), k};
}

FPModule autoeq_apply(const AutoEq& e, const FPModule& M) {
  FPModule T = transport_module(e.witness, M);
  AffineAlgebra chart = transport_chart(e.witness);
  std::vector<Poly> lg;
  for (const auto& g : e.line_gens) lg.push_back(transfer_by_name(g, chart.ring));
  return tensor_product(T, ideal_module_on_chart(chart, lg));
}

AutoEq autoeq_compose(const AutoEq& e1, const AutoEq& e2) {
  if (e1.k != e2.k) throw LevelMismatch("autoequivalences live at different levels");
  IsoWitness w = witness_compose(e1.witness, e2.witness);
  // the line class transports along the outer inverse, then tensors
  RingMap bwd(e1.witness.A.ring, e1.witness.locB.ring, e1.witness.backward);
  std::vector<Poly> moved;
  for (const auto& g : e2.line_gens)
    moved.push_back(clear_inverter(bwd.apply(g), e1.witness.locB, e1.witness.A));
  std::vector<Poly> combined;
  for (const auto& a : moved)
    for (const auto& b : e1.line_gens) {
      Poly p = poly_mul(a, b);
      if (p.is_zero()) continue;
      bool dup = false;
      for (const auto& q : combined)
        if (q == p) dup = true;
      if (!dup) combined.push_back(std::move(p));
    }
  return AutoEq{std::move(w), std::move(combined), e1.k};
}

}  // namespace codimcat
