#pragma once

#include <random>

#include "codimcat/serrequot.hpp"

namespace codimcat::sampling {

/// Deterministic sample generators for the property suites. All draws go
/// through one mt19937_64 so a fixed seed reproduces a run exactly.
inline Poly random_poly(std::mt19937_64& rng, const RingPtr& r, int max_deg, int max_terms,
                        bool allow_zero = true) {
  std::vector<Term> ts;
  int count = int(rng() % std::uint64_t(max_terms + (allow_zero ? 1 : 0)));
  if (!allow_zero && count == 0) count = 1;
  for (int t = 0; t < count; ++t) {
    Monomial m = Monomial::one(r->nvars());
    int budget = int(rng() % std::uint64_t(max_deg + 1));
    for (int d = 0; d < budget; ++d) {
      std::size_t v = rng() % r->nvars();
      m.exp[v] += 1;
      m.deg += 1;
    }
    ts.push_back({m, std::uint32_t(1 + rng() % (r->modulus() - 1))});
  }
  Poly f = Poly::from_terms(r, std::move(ts));
  if (!allow_zero && f.is_zero()) return Poly::constant(r, 1);
  return f;
}

/// Module on the chart with at most two generators and quadratic relations.
inline FPModule random_module(std::mt19937_64& rng, const AffineAlgebra& alg, int max_rank = 2,
                              int max_rels = 2, int max_deg = 2) {
  std::size_t n = 1 + rng() % std::uint64_t(max_rank);
  std::size_t m = rng() % std::uint64_t(max_rels + 1);
  std::vector<FreeVec> rel;
  for (std::size_t j = 0; j < m; ++j) {
    FreeVec v(alg.ring, n);
    for (std::size_t i = 0; i < n; ++i) v[i] = random_poly(rng, alg.ring, max_deg, 2);
    rel.push_back(std::move(v));
  }
  return chart_module(alg, n, rel);
}

/// Well defined map sampled from Hom(M, N); nullopt when Hom vanishes.
inline std::optional<ModuleMap> random_map(std::mt19937_64& rng, const FPModule& M,
                                           const FPModule& N, int max_deg = 1) {
  HomModule H = hom_module(M, N);
  if (H.gen_maps.empty()) return std::nullopt;
  std::vector<Poly> coeffs;
  bool nonzero = false;
  for (std::size_t i = 0; i < H.gen_maps.size(); ++i) {
    if (rng() % 2) {
      coeffs.push_back(random_poly(rng, M.ring(), max_deg, 2));
      nonzero = nonzero || !coeffs.back().is_zero();
    } else {
      coeffs.push_back(Poly::zero(M.ring()));
    }
  }
  if (!nonzero) coeffs[rng() % coeffs.size()] = Poly::constant(M.ring(), 1);
  return H.decode(coeffs);
}

/// Roof out of F built from a weak equivalence: either the inclusion of
/// J*F for a small V(J), or the projection from F + small junk.
inline std::optional<Roof> random_roof(std::mt19937_64& rng, const QuotientLevel& level,
                                       const FPModule& F, const FPModule& G) {
  const AffineAlgebra& alg = level.chart;
  ModuleMap s = identity_map(F);
  FPModule E = F;
  switch (rng() % 3) {
    case 0:
      break;  // apex F itself
    case 1: {
      if (level.k >= 1 && alg.ring->nvars() >= 2) {
        // J*F for the origin ideal J: coker is small at k >= 1
        std::vector<FreeVec> gens;
        for (std::size_t v = 0; v + 1 < alg.ring->nvars() + 1 && v < 2; ++v)
          for (std::size_t i = 0; i < F.rank(); ++i) {
            FreeVec g(alg.ring, F.rank());
            g[i] = Poly::variable(alg.ring, v);
            gens.push_back(std::move(g));
          }
        SubmoduleResult sub = submodule(F, gens);
        E = sub.module;
        s = sub.inclusion;
      }
      break;
    }
    default: {
      // F + a small summand, projecting away the junk
      if (level.k >= 1) {
        std::vector<Poly> pt;
        for (std::size_t v = 0; v < std::min<std::size_t>(alg.ring->nvars(), 2); ++v)
          pt.push_back(Poly::variable(alg.ring, v));
        FPModule S = chart_cyclic(alg, Ideal(alg.ring, pt));
        E = direct_sum(F, S);
        PolyMatrix proj(alg.ring, F.rank(), E.rank());
        for (std::size_t i = 0; i < F.rank(); ++i) proj.at(i, i) = Poly::constant(alg.ring, 1);
        s = make_map(E, F, std::move(proj));
      }
      break;
    }
  }
  auto t = random_map(rng, E, G);
  if (!t) return std::nullopt;
  return roof_make(level, s, *t);
}

}  // namespace codimcat::sampling
