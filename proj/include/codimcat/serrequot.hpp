#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codimcat/fpmod.hpp"

namespace codimcat {

/// An affine chart Spec(ring/defining). Modules on the chart carry the
/// defining ideal as extra relations in every presentation.
struct AffineAlgebra {
  RingPtr ring;
  Ideal defining;
};

AffineAlgebra make_affine_algebra(RingPtr ring, Ideal defining);
int chart_dim(const AffineAlgebra& alg);

/// Module on the chart: the defining relations are adjoined per generator.
FPModule chart_module(const AffineAlgebra& alg, std::size_t rank,
                      const std::vector<FreeVec>& relations);
FPModule chart_cyclic(const AffineAlgebra& alg, const Ideal& I);

/// The quotient level k: objects of dimension at most k-1 are declared
/// zero. Levels can also be addressed by codimension.
struct QuotientLevel {
  AffineAlgebra chart;
  int k = 0;
};

QuotientLevel make_level(AffineAlgebra chart, int k);
int codim_to_k(const AffineAlgebra& alg, int c);

bool is_small(const FPModule& M, const QuotientLevel& level);
bool is_weak_equivalence(const ModuleMap& phi, const QuotientLevel& level);
bool is_zero_in_quotient(const ModuleMap& phi, const QuotientLevel& level);

/// Span E with two legs; the s leg is a weak equivalence, verified at
/// construction. Represents a morphism s.target -> t.target at the level.
struct Roof {
  QuotientLevel level;
  FPModule apex;
  ModuleMap s;
  ModuleMap t;

  const FPModule& from() const { return s.target; }
  const FPModule& to() const { return t.target; }
};

Roof roof_make(const QuotientLevel& level, const ModuleMap& s, const ModuleMap& t);
Roof roof_identity(const QuotientLevel& level, const FPModule& F);
Roof roof_compose(const Roof& r2, const Roof& r1);  // r2 after r1
bool roof_equal(const Roof& r1, const Roof& r2);
bool roof_is_iso(const Roof& r);
bool roof_is_zero(const Roof& r);

/// Prime ideal asserted by the caller and probed heuristically: random
/// pairs outside the ideal must multiply outside it. Probe failures are
/// hard errors.
struct PrimeWitness {
  Ideal ideal;
  int dim = -1;
  int probes = 0;
};

PrimeWitness prime_witness(const Ideal& P, std::uint64_t seed, int probes = 32);

/// True when the stalk of M at P is the residue field at P.
bool stalk_is_residue_field(const FPModule& M, const PrimeWitness& P);

struct SuppStratum {
  int dim;
  Ideal component;  // defining ideal of the dimension-d part, up to radical
};
using SuppProfile = std::vector<SuppStratum>;

SuppProfile supp_k(const FPModule& M, const QuotientLevel& level);

bool is_minimal(const FPModule& M, const QuotientLevel& level, const PrimeWitness& P);

/// The endomorphism a/b of the structure module of V(P) at level k = dim P.
Roof roof_fraction(const QuotientLevel& level, const PrimeWitness& P, const Poly& a,
                   const Poly& b);

bool pic_member(const FPModule& L, const QuotientLevel& level, std::uint64_t seed);
Ideal fiber_rank_locus(const FPModule& L, std::size_t r);

struct HomSections {
  FPModule sections;
  bool stabilized = false;
  int n_stop = 0;
};

/// Sections of Hom(F, G) over the complement of V(J), followed along the
/// tower Hom(J^n, -) until two consecutive transitions are isomorphisms.
HomSections hom_quotient_sections(const FPModule& F, const FPModule& G,
                                  const QuotientLevel& level, const Ideal& J, int n_max);

bool stalk_zero_test(const ModuleMap& phi, const PrimeWitness& P);

/// Layers I^a M / I^{a+1} M until the power kills M.
std::vector<FPModule> ideal_power_filtration(const FPModule& M, const Ideal& I);

}  // namespace codimcat
