#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codimcat/errors.hpp"

namespace codimcat {

/// Arithmetic in F_p for a prime p < 2^31. Elements live in [0, p);
/// intermediate products use 64 bits; no arbitrary precision.
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t p);

  std::uint32_t modulus() const { return p_; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    std::uint64_t s = std::uint64_t(a) + b;
    return s >= p_ ? std::uint32_t(s - p_) : std::uint32_t(s);
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
    return a >= b ? a - b : std::uint32_t(a + std::uint64_t(p_) - b);
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return std::uint32_t(std::uint64_t(a) * b % p_);
  }
  std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : p_ - a; }
  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
  std::uint32_t reduce_int(std::int64_t v) const;

  static bool is_prime(std::uint32_t n);

 private:
  std::uint32_t p_;
};

/// Dense exponent vector with cached total degree.
struct Monomial {
  std::vector<std::uint32_t> exp;
  std::uint32_t deg = 0;

  static Monomial one(std::size_t nvars) {
    Monomial m;
    m.exp.assign(nvars, 0);
    return m;
  }
  static Monomial var(std::size_t nvars, std::size_t i, std::uint32_t e = 1);

  bool is_one() const { return deg == 0; }
  bool operator==(const Monomial& o) const { return exp == o.exp; }
};

Monomial mono_mul(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& a, const Monomial& b);  // a | b
Monomial mono_div(const Monomial& b, const Monomial& a);  // b / a, requires a | b
Monomial mono_lcm(const Monomial& a, const Monomial& b);
Monomial mono_gcd(const Monomial& a, const Monomial& b);
bool mono_coprime(const Monomial& a, const Monomial& b);

enum class OrderKind { Lex, Grevlex, Block };

/// Block: the first `block` variables dominate (graded reverse lex within
/// each block); used for elimination. Variable precedence is positional.
struct MonomialOrder {
  OrderKind kind = OrderKind::Grevlex;
  std::size_t block = 0;

  bool is_graded() const { return kind == OrderKind::Grevlex; }
  bool operator==(const MonomialOrder& o) const {
    return kind == o.kind && (kind != OrderKind::Block || block == o.block);
  }
};

std::string order_name(const MonomialOrder& ord);
std::optional<MonomialOrder> order_from_name(std::string_view name);

/// Three-way comparison: -1, 0, +1 for a < b, a == b, a > b.
int cmp_monomials(const Monomial& a, const Monomial& b, const MonomialOrder& ord);

class PolyRing;
using RingPtr = std::shared_ptr<const PolyRing>;

/// Engine guard rails. Exceeding any bound raises ResourceExceeded,
/// never a wrong answer.
struct Limits {
  std::uint32_t max_degree = 30;
  std::size_t max_basis = 5000;
  double timeout_s = 60.0;
};

/// A polynomial ring F_p[x_1..x_n] with a fixed monomial order. Rings are
/// immutable and shared; all attached objects hold a RingPtr.
class PolyRing : public std::enable_shared_from_this<PolyRing> {
 public:
  static RingPtr make(std::uint32_t p, std::vector<std::string> vars,
                      MonomialOrder ord = {}, Limits lim = {});

  const PrimeField& field() const { return field_; }
  std::uint32_t modulus() const { return field_.modulus(); }
  std::size_t nvars() const { return vars_.size(); }
  const std::vector<std::string>& vars() const { return vars_; }
  const MonomialOrder& order() const { return order_; }
  const Limits& limits() const { return limits_; }

  std::optional<std::size_t> var_index(std::string_view name) const;

  /// Structural identity: same modulus, same variable names, same order.
  bool same_as(const PolyRing& o) const;

  /// Ring with one fresh variable appended (name derived from `hint`).
  RingPtr extended(const std::string& hint, MonomialOrder ord) const;
  /// Ring on the same variables with a different order.
  RingPtr with_order(MonomialOrder ord) const;

 private:
  PolyRing(PrimeField f, std::vector<std::string> vars, MonomialOrder ord, Limits lim)
      : field_(f), vars_(std::move(vars)), order_(ord), limits_(lim) {}

  PrimeField field_;
  std::vector<std::string> vars_;
  MonomialOrder order_;
  Limits limits_;
};

void require_same_ring(const RingPtr& a, const RingPtr& b);

struct Term {
  Monomial mono;
  std::uint32_t coeff;  // in [1, p)
};

/// Canonical multivariate polynomial: terms strictly descending in the
/// ring's active order, no zero coefficients; zero is the empty list.
class Poly {
 public:
  Poly() = default;

  static Poly zero(RingPtr r);
  static Poly constant(RingPtr r, std::int64_t c);
  static Poly variable(RingPtr r, std::size_t i);
  static Poly term(RingPtr r, Monomial m, std::int64_t c);
  /// Normalizes an arbitrary term list (sorts, merges, drops zeros).
  static Poly from_terms(RingPtr r, std::vector<Term> terms);

  const RingPtr& ring() const { return ring_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || terms_.front().mono.is_one(); }
  bool is_one() const {
    return terms_.size() == 1 && terms_[0].mono.is_one() && terms_[0].coeff == 1;
  }

  const Monomial& lm() const { return terms_.front().mono; }
  std::uint32_t lc() const { return terms_.front().coeff; }
  /// Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : int(terms_.front().mono.deg); }
  int degree_in(std::size_t var) const;

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }

 private:
  RingPtr ring_;
  std::vector<Term> terms_;
};

Poly poly_add(const Poly& f, const Poly& g);
Poly poly_sub(const Poly& f, const Poly& g);
Poly poly_neg(const Poly& f);
Poly poly_mul(const Poly& f, const Poly& g);
Poly poly_scale(const Poly& f, std::uint32_t c);
Poly poly_term_mul(const Poly& f, const Monomial& m, std::uint32_t c);
Poly poly_monic(const Poly& f);
Poly poly_pow(const Poly& f, std::uint32_t e);

inline Poly operator+(const Poly& a, const Poly& b) { return poly_add(a, b); }
inline Poly operator-(const Poly& a, const Poly& b) { return poly_sub(a, b); }
inline Poly operator-(const Poly& a) { return poly_neg(a); }
inline Poly operator*(const Poly& a, const Poly& b) { return poly_mul(a, b); }

/// Canonical text form: terms descending, coefficients in [0,p), `^` for
/// powers and `*` between factors. This is the bit-exact rendering used by
/// the CLI and the golden files.
std::string to_string(const Poly& f);

/// Substitution homomorphism source -> target given images of the source
/// variables. Variable renames, ring inclusions and chart maps all go
/// through here.
class RingMap {
 public:
  RingMap(RingPtr src, RingPtr dst, std::vector<Poly> images);

  const RingPtr& source() const { return src_; }
  const RingPtr& target() const { return dst_; }
  const std::vector<Poly>& images() const { return images_; }

  Poly apply(const Poly& f) const;

  /// Identity-on-names map into a ring that contains all source variables.
  static RingMap inclusion(RingPtr src, RingPtr dst);

 private:
  RingPtr src_;
  RingPtr dst_;
  std::vector<Poly> images_;
};

}  // namespace codimcat
