#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codimcat/serrequot.hpp"

namespace codimcat {

/// A chart with one inverted element: Spec of ring/defining with the
/// extra relation inv * s = 1 when s is not a unit constant.
struct SideRing {
  RingPtr ring;
  Ideal defining;
  std::optional<std::size_t> inv;  // index of the inverter variable
  Poly inverted;                   // element of the base chart ring

  AffineAlgebra as_algebra() const { return AffineAlgebra{ring, defining}; }
};

SideRing make_side(const AffineAlgebra& alg, const Poly& s, const std::string& hint);

/// Inverse of u modulo the side relations, when u is a unit there.
std::optional<Poly> ring_inverse(const SideRing& side, const Poly& u);

struct Fraction {
  Poly num;
  Poly den;
};

/// Certified isomorphism of localized charts Spec(A_s) ~ Spec(B_t),
/// stored through the generator images of both ring maps. The certificate
/// means both composites are the identity on generators, checked by normal
/// forms in the localized rings.
struct IsoWitness {
  AffineAlgebra A, B;
  SideRing locA, locB;
  std::vector<Poly> forward;   // images of B's generators in locA.ring
  std::vector<Poly> backward;  // images of A's generators in locB.ring
  bool certified = false;
  std::string reason;
  int bad_dim_A = -1;  // dim V(s) in Spec A
  int bad_dim_B = -1;  // dim V(t) in Spec B
};

/// Extends a map given on generators by fractions to an isomorphism of
/// explicit opens: finds backward images by eliminating the source
/// variables from the graph ideal, then certifies both composites and the
/// degree-one behaviour at the witness primes.
IsoWitness extend_local_iso(const AffineAlgebra& A, const AffineAlgebra& B,
                            const std::vector<Fraction>& gen_images, const PrimeWitness& P,
                            const PrimeWitness& Q, std::uint64_t seed);

/// Builds a witness from explicit data (for storage and re-verification);
/// the composite identities are re-checked, not trusted.
IsoWitness make_witness(const AffineAlgebra& A, const AffineAlgebra& B, const Poly& s,
                        const Poly& t, const std::vector<Fraction>& forward,
                        const std::vector<Fraction>& backward);

IsoWitness identity_witness(const AffineAlgebra& A);
IsoWitness reverse_witness(const IsoWitness& w);

/// The same isomorphism viewed between the localized charts themselves,
/// where nothing is removed: bad loci become empty and the witness
/// verifies at every level down to k = 0.
IsoWitness localize_witness(const IsoWitness& w);

/// Witness of f1 after f2 for self-maps on a common chart.
IsoWitness witness_compose(const IsoWitness& w1, const IsoWitness& w2);

struct WitnessVerdict {
  bool ok = false;
  std::string reason;
};

/// True when the witness certifies and both removed loci have dimension
/// at most k-1, i.e. the opens contain every point of dimension >= k.
WitnessVerdict verify_iso_witness(const IsoWitness& w, int k);

/// Base change of a presentation along the backward images; the result
/// lives on the localized target chart.
FPModule transport_module(const IsoWitness& w, const FPModule& M);
ModuleMap transport_map(const IsoWitness& w, const ModuleMap& phi);

AffineAlgebra transport_chart(const IsoWitness& w);

struct EquivCheckReport {
  std::size_t checked = 0;
  std::vector<std::size_t> zero_disagreements;
  std::vector<std::size_t> weq_disagreements;
  bool consistent() const {
    return zero_disagreements.empty() && weq_disagreements.empty();
  }
};

/// Desk-scale consistency of the induced equivalence: zero and weak
/// equivalence verdicts must agree across transport.
EquivCheckReport quotient_equiv_check(const IsoWitness& w, int k,
                                      const std::vector<ModuleMap>& samples);

/// The pair (f, L): a self-witness together with a class invertible away
/// from dimension k-1, acting by F -> transport(F) tensor L.
struct AutoEq {
  IsoWitness witness;
  std::vector<Poly> line_gens;  // ideal generators presenting L on the chart
  int k = 0;
};

AutoEq autoeq_make(const IsoWitness& w, std::vector<Poly> line_gens, int k, std::uint64_t seed);
FPModule autoeq_apply(const AutoEq& e, const FPModule& M);
AutoEq autoeq_compose(const AutoEq& e1, const AutoEq& e2);

/// The ideal generated by gens, presented as a module on the chart.
FPModule ideal_module_on_chart(const AffineAlgebra& alg, const std::vector<Poly>& gens);

}  // namespace codimcat
