#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "codimcat/arith.hpp"

namespace codimcat {

/// Element of a free module R^rank. Components share one ring.
class FreeVec {
 public:
  FreeVec() = default;
  FreeVec(RingPtr r, std::size_t rank);
  static FreeVec unit(RingPtr r, std::size_t rank, std::size_t pos);
  static FreeVec from_components(std::vector<Poly> comps);

  const RingPtr& ring() const { return ring_; }
  std::size_t rank() const { return comp_.size(); }
  const Poly& operator[](std::size_t i) const { return comp_[i]; }
  Poly& operator[](std::size_t i) { return comp_[i]; }
  const std::vector<Poly>& components() const { return comp_; }

  bool is_zero() const;
  bool operator==(const FreeVec& o) const { return comp_ == o.comp_; }

 private:
  RingPtr ring_;
  std::vector<Poly> comp_;
};

FreeVec vec_add(const FreeVec& a, const FreeVec& b);
FreeVec vec_sub(const FreeVec& a, const FreeVec& b);
FreeVec vec_neg(const FreeVec& a);
FreeVec vec_scale(const FreeVec& a, const Poly& f);
FreeVec vec_term_mul(const FreeVec& a, const Monomial& m, std::uint32_t c);

/// Order on module monomials (position, monomial). Positions below
/// `tag_start` form the value block and dominate the tag block; the value
/// block is position-over-term. Tag positions compare Schreyer-style
/// through `tag_lead` when present (induced order used for syzygies),
/// otherwise position-over-term as well.
struct ModuleOrder {
  std::size_t tag_start;
  struct TagLead {
    std::size_t pos;
    Monomial mono;
  };
  std::vector<TagLead> tag_lead;

  static ModuleOrder pot(std::size_t rank) { return ModuleOrder{rank, {}}; }
};

struct ModMono {
  std::size_t pos;
  Monomial mono;
};

int cmp_module_monomials(const ModMono& a, const ModMono& b, const MonomialOrder& ring_ord,
                         const ModuleOrder& mo);

struct ModLead {
  std::size_t pos;
  Monomial mono;
  std::uint32_t coeff;
};

std::optional<ModLead> vec_lead(const FreeVec& v, const ModuleOrder& mo);

/// Remainder of full division of f by G: no term of the remainder is
/// divisible by a leading term of G. Deterministic for a fixed G sequence.
FreeVec vec_normal_form(const FreeVec& f, const std::vector<FreeVec>& G, const ModuleOrder& mo);
Poly normal_form(const Poly& f, const std::vector<Poly>& G);

struct GBOptions {
  bool track = false;  // carry representations over the input generators
};

struct GBResult {
  std::vector<FreeVec> basis;  // reduced: minimal, tail-reduced, monic, sorted
  std::vector<FreeVec> reps;   // when tracked: basis[i] = sum reps[i][j] * gens[j]
};

/// Buchberger with the coprimality criterion (rank one only), the chain
/// criterion and degree-graded pair selection. Returns the reduced basis,
/// which is canonical for a fixed order.
GBResult module_groebner(const std::vector<FreeVec>& gens, const ModuleOrder& mo,
                         const GBOptions& opt = {});

std::vector<Poly> ideal_groebner(const std::vector<Poly>& gens);

/// Generators of { (a_1..a_m) : sum a_i gens_i = 0 }.
std::vector<FreeVec> syzygies(const std::vector<FreeVec>& gens);

/// Coefficients expressing v as a combination of gens, when v lies in the
/// submodule they generate.
std::optional<std::vector<Poly>> lift_into_submodule(const FreeVec& v,
                                                     const std::vector<FreeVec>& gens);

bool in_submodule(const FreeVec& v, const std::vector<FreeVec>& gens);
bool submodule_contains(const std::vector<FreeVec>& big, const std::vector<FreeVec>& small);
bool submodule_equal(const std::vector<FreeVec>& a, const std::vector<FreeVec>& b);

/// Ideal with write-once cache of its reduced Groebner basis in the ring's
/// active order. Values are immutable; copies share the cache.
class Ideal {
 public:
  Ideal() = default;
  Ideal(RingPtr r, std::vector<Poly> gens);

  static Ideal zero(RingPtr r);
  static Ideal unit(RingPtr r);

  const RingPtr& ring() const { return ring_; }
  const std::vector<Poly>& gens() const { return gens_; }
  const std::vector<Poly>& groebner() const;

  bool is_zero_ideal() const { return gens_.empty(); }
  bool is_unit_ideal() const;

  std::string render() const;

 private:
  RingPtr ring_;
  std::vector<Poly> gens_;  // nonzero, zero generators dropped
  struct Cache {
    std::once_flag once;
    std::vector<Poly> gb;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

bool in_ideal(const Poly& f, const Ideal& I);
bool ideal_equal(const Ideal& I, const Ideal& J);
Ideal ideal_sum(const Ideal& I, const Ideal& J);
Ideal ideal_product(const Ideal& I, const Ideal& J);
Ideal ideal_power(const Ideal& I, std::uint32_t n);

/// I cap J through the t-homogenization trick t*I + (1-t)*J with
/// elimination of t.
Ideal ideal_intersect(const Ideal& I, const Ideal& J);

/// (I : f), first coordinates of the syzygies of [f | gens I].
Ideal ideal_colon_single(const Ideal& I, const Poly& f);

/// (I : J) = {f | f J subset I}.
Ideal ideal_colon(const Ideal& I, const Ideal& J);

struct SaturationResult {
  Ideal ideal;
  std::uint32_t exponent;  // first n with (I : J^n) = (I : J^{n+1})
};
SaturationResult saturate(const Ideal& I, const Ideal& J);

/// I cap k[remaining vars] for vars a subset of the ring's variables.
/// The result lives in a ring on the remaining variables.
Ideal eliminate(const Ideal& I, const std::vector<std::size_t>& vars);

/// dim R/I via maximal independent variable sets modulo the leading term
/// ideal of a grevlex basis; -1 for the unit ideal.
int krull_dim(const Ideal& I);

/// f in sqrt(I), by the extended-ring membership 1 in I + (1 - t f).
bool radical_member(const Poly& f, const Ideal& I);

}  // namespace codimcat
