#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "codimcat/groebner.hpp"

namespace codimcat {

/// Dense matrix of polynomials, row major. Zero rows or columns are legal;
/// maps out of or into the zero module use them.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(RingPtr r, std::size_t rows, std::size_t cols);
  static PolyMatrix identity(RingPtr r, std::size_t n);
  static PolyMatrix from_rows(RingPtr r, const std::vector<std::vector<Poly>>& rows);
  static PolyMatrix from_cols(RingPtr r, std::size_t rows, const std::vector<FreeVec>& cols);

  const RingPtr& ring() const { return ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Poly& at(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }
  Poly& at(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }

  FreeVec col(std::size_t c) const;
  std::vector<FreeVec> columns() const;
  bool is_zero() const;
  bool operator==(const PolyMatrix& o) const;

  std::string render() const;  // [[row], [row], ...] canonical form

 private:
  RingPtr ring_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Poly> e_;
};

PolyMatrix mat_mul(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix mat_add(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix mat_sub(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix mat_neg(const PolyMatrix& a);
PolyMatrix mat_scale(const PolyMatrix& a, const Poly& f);
PolyMatrix mat_hcat(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix mat_transpose(const PolyMatrix& a);
FreeVec mat_apply(const PolyMatrix& a, const FreeVec& v);

/// Finitely presented module M = coker(R^m -> R^n) given by the n x m
/// presentation matrix. The zero module has rank 0. Values are immutable;
/// the relation basis, annihilator and dimension are write-once caches
/// shared between copies.
class FPModule {
 public:
  FPModule() = default;
  FPModule(RingPtr r, std::size_t gens_rank, std::vector<FreeVec> relations);
  static FPModule free_module(RingPtr r, std::size_t n);
  static FPModule zero_module(RingPtr r);
  static FPModule from_presentation(const PolyMatrix& pres);
  /// R/I as a rank one module.
  static FPModule cyclic(const Ideal& I);

  const RingPtr& ring() const { return ring_; }
  std::size_t rank() const { return rank_; }
  const std::vector<FreeVec>& relations() const { return rel_; }
  /// Reduced basis of the relation submodule, position-over-term order.
  const std::vector<FreeVec>& relation_basis() const;
  PolyMatrix presentation() const;

  std::string render() const;

 private:
  RingPtr ring_;
  std::size_t rank_ = 0;
  std::vector<FreeVec> rel_;
  struct Cache {
    std::once_flag gb_once;
    std::vector<FreeVec> gb;
    std::once_flag ann_once;
    std::optional<Ideal> ann;
    std::once_flag dim_once;
    std::optional<int> dim;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

  friend Ideal annihilator(const FPModule& M);
  friend int module_dim(const FPModule& M);
};

/// Map of presented modules, stored on the free covers. The certificate
/// flag records that every relation of the source lands in the relation
/// module of the target.
struct ModuleMap {
  FPModule source;
  FPModule target;
  PolyMatrix mat;  // target.rank() x source.rank()
  bool welldef_cert = false;
};

bool is_well_defined(const PolyMatrix& phi, const FPModule& M, const FPModule& N);
ModuleMap make_map(const FPModule& M, const FPModule& N, PolyMatrix phi);
ModuleMap identity_map(const FPModule& M);
ModuleMap zero_map(const FPModule& M, const FPModule& N);
ModuleMap compose(const ModuleMap& g, const ModuleMap& f);  // g after f
ModuleMap map_add(const ModuleMap& a, const ModuleMap& b);
ModuleMap map_sub(const ModuleMap& a, const ModuleMap& b);
bool maps_equal_on_gens(const ModuleMap& a, const ModuleMap& b);

struct SubmoduleResult {
  FPModule module;
  ModuleMap inclusion;
};

struct ImageResult {
  FPModule module;
  ModuleMap epi;   // from the source, presented on the columns of phi
  ModuleMap mono;  // into the target
};

SubmoduleResult kernel(const ModuleMap& phi);
FPModule cokernel(const ModuleMap& phi);
ImageResult image(const ModuleMap& phi);

/// Submodule of M spanned by columns of `gens` (elements of the free cover).
SubmoduleResult submodule(const FPModule& M, const std::vector<FreeVec>& gens);

bool module_is_zero(const FPModule& M);
Ideal annihilator(const FPModule& M);
int module_dim(const FPModule& M);
Ideal fitting_ideal(const FPModule& M, std::size_t i);
bool is_iso(const ModuleMap& phi);

/// Ext^i_R(M, R) through a free resolution of length i+1 and the
/// cohomology of its dual.
FPModule ext_module(const FPModule& M, std::size_t i);

/// Largest submodule killed by a power of J.
SubmoduleResult torsion_wrt(const FPModule& M, const Ideal& J);

/// Largest submodule of dimension at most d. The candidate ideal comes
/// from the Ext strata; the result is post-verified and a failed check
/// raises VerificationFailed rather than returning a wrong module.
SubmoduleResult torsion_part(const FPModule& M, int d);

struct LocalizedModule {
  FPModule base;
  Poly inverted;
  FPModule localized;   // over ring() of base extended by the inverter
  RingPtr ext_ring;
  std::size_t inv_var;  // index of the adjoined variable
};
LocalizedModule localize(const FPModule& M, const Poly& f);
ModuleMap localize_map(const ModuleMap& phi, const Poly& f);

struct HomModule {
  FPModule hom;                     // Hom_R(M, N) as a presented module
  std::vector<ModuleMap> gen_maps;  // decoded generators
  std::vector<FreeVec> flat_gens;   // the same generators as flat vectors
  FPModule M, N;
  /// Decode an element given by coefficients over the generators.
  ModuleMap decode(const std::vector<Poly>& coeffs) const;
};
HomModule hom_module(const FPModule& M, const FPModule& N);

FPModule direct_sum(const FPModule& A, const FPModule& B);
FPModule tensor_product(const FPModule& A, const FPModule& B);

/// Vector space dimension over F_p when finite (the module then has
/// dimension <= 0); nullopt otherwise.
std::optional<long> vs_dimension(const FPModule& M);

/// Presentation cleanup: unit pivots eliminate a generator and a relation.
/// The conversion maps are mutually inverse isomorphisms.
struct TrimResult {
  FPModule module;
  ModuleMap to_trimmed;    // original -> trimmed
  ModuleMap from_trimmed;  // trimmed -> original
};
TrimResult trim(const FPModule& M);

}  // namespace codimcat
