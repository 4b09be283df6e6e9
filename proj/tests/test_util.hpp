#pragma once

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "codimcat/arith.hpp"

namespace codimcat::testutil {

inline std::uint64_t suite_seed() {
  if (const char* s = std::getenv("CODIMCAT_SEED")) return std::strtoull(s, nullptr, 10);
  return 0xC0D1CA7ull;
}

inline RingPtr ring_xy(std::uint32_t p = 32003) {
  return PolyRing::make(p, {"x", "y"});
}

inline RingPtr ring_xyz(std::uint32_t p = 32003) {
  return PolyRing::make(p, {"x", "y", "z"});
}

// Random polynomial with total degree <= deg and at most `terms` terms.
inline Poly random_poly(std::mt19937_64& rng, const RingPtr& r, int deg, int terms,
                        bool allow_zero = true) {
  std::vector<Term> ts;
  int count = int(rng() % std::uint64_t(terms + (allow_zero ? 1 : 0)));
  if (!allow_zero && count == 0) count = 1;
  for (int t = 0; t < count; ++t) {
    Monomial m = Monomial::one(r->nvars());
    int budget = int(rng() % std::uint64_t(deg + 1));
    for (int d = 0; d < budget; ++d) {
      std::size_t v = rng() % r->nvars();
      m.exp[v] += 1;
      m.deg += 1;
    }
    std::uint32_t c = std::uint32_t(1 + rng() % (r->modulus() - 1));
    ts.push_back({m, c});
  }
  Poly f = Poly::from_terms(r, std::move(ts));
  if (!allow_zero && f.is_zero()) return Poly::constant(r, 1);
  return f;
}

}  // namespace codimcat::testutil
