#include "codimcat/arith.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace codimcat {

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (p < 2 || p >= (1u << 31) || !is_prime(p))
    throw StructuralError("modulus must be a prime below 2^31, got " + std::to_string(p));
}

bool PrimeField::is_prime(std::uint32_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::uint32_t PrimeField::pow(std::uint32_t a, std::uint64_t e) const {
  std::uint64_t base = a % p_, acc = 1;
  while (e) {
    if (e & 1) acc = acc * base % p_;
    base = base * base % p_;
    e >>= 1;
  }
  return std::uint32_t(acc);
}

std::uint32_t PrimeField::inv(std::uint32_t a) const {
  if (a == 0) throw StructuralError("division by zero in F_p");
  return pow(a, p_ - 2);
}

std::uint32_t PrimeField::reduce_int(std::int64_t v) const {
  std::int64_t r = v % std::int64_t(p_);
  if (r < 0) r += p_;
  return std::uint32_t(r);
}

Monomial Monomial::var(std::size_t nvars, std::size_t i, std::uint32_t e) {
  Monomial m = one(nvars);
  m.exp[i] = e;
  m.deg = e;
  return m;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (std::size_t i = 0; i < r.exp.size(); ++i) r.exp[i] += b.exp[i];
  r.deg = a.deg + b.deg;
  return r;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.exp.size(); ++i)
    if (a.exp[i] > b.exp[i]) return false;
  return true;
}

Monomial mono_div(const Monomial& b, const Monomial& a) {
  Monomial r = b;
  for (std::size_t i = 0; i < r.exp.size(); ++i) r.exp[i] -= a.exp[i];
  r.deg = b.deg - a.deg;
  return r;
}

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  r.deg = 0;
  for (std::size_t i = 0; i < r.exp.size(); ++i) {
    r.exp[i] = std::max(a.exp[i], b.exp[i]);
    r.deg += r.exp[i];
  }
  return r;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  r.deg = 0;
  for (std::size_t i = 0; i < r.exp.size(); ++i) {
    r.exp[i] = std::min(a.exp[i], b.exp[i]);
    r.deg += r.exp[i];
  }
  return r;
}

bool mono_coprime(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.exp.size(); ++i)
    if (a.exp[i] && b.exp[i]) return false;
  return true;
}

namespace {

// grevlex on the slice [lo, hi): higher degree wins, ties go to the
// rightmost difference with the *smaller* exponent.
int cmp_grevlex_slice(const Monomial& a, const Monomial& b, std::size_t lo, std::size_t hi) {
  std::uint64_t da = 0, db = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    da += a.exp[i];
    db += b.exp[i];
  }
  if (da != db) return da < db ? -1 : 1;
  for (std::size_t i = hi; i-- > lo;) {
    if (a.exp[i] != b.exp[i]) return a.exp[i] > b.exp[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace

int cmp_monomials(const Monomial& a, const Monomial& b, const MonomialOrder& ord) {
  if (a.exp.size() != b.exp.size())
    throw StructuralError("monomial length mismatch in comparison");
  const std::size_t n = a.exp.size();
  switch (ord.kind) {
    case OrderKind::Lex:
      for (std::size_t i = 0; i < n; ++i)
        if (a.exp[i] != b.exp[i]) return a.exp[i] < b.exp[i] ? -1 : 1;
      return 0;
    case OrderKind::Grevlex:
      return cmp_grevlex_slice(a, b, 0, n);
    case OrderKind::Block: {
      std::size_t j = std::min(ord.block, n);
      int c = cmp_grevlex_slice(a, b, 0, j);
      if (c) return c;
      return cmp_grevlex_slice(a, b, j, n);
    }
  }
  return 0;
}

std::string order_name(const MonomialOrder& ord) {
  switch (ord.kind) {
    case OrderKind::Lex: return "lex";
    case OrderKind::Grevlex: return "grevlex";
    case OrderKind::Block: return "block" + std::to_string(ord.block);
  }
  return "?";
}

std::optional<MonomialOrder> order_from_name(std::string_view name) {
  if (name == "lex") return MonomialOrder{OrderKind::Lex, 0};
  if (name == "grevlex") return MonomialOrder{OrderKind::Grevlex, 0};
  return std::nullopt;
}

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(std::uint8_t(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(std::uint8_t(c)) && c != '_') return false;
  return true;
}

}  // namespace

RingPtr PolyRing::make(std::uint32_t p, std::vector<std::string> vars,
                       MonomialOrder ord, Limits lim) {
  if (vars.empty()) throw StructuralError("a ring needs at least one variable");
  if (vars.size() > 16) throw StructuralError("at most 16 variables are supported");
  for (const auto& v : vars)
    if (!valid_identifier(v)) throw StructuralError("invalid variable name '" + v + "'");
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j]) throw StructuralError("duplicate variable '" + vars[i] + "'");
  PrimeField f(p);
  return RingPtr(new PolyRing(f, std::move(vars), ord, lim));
}

std::optional<std::size_t> PolyRing::var_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == name) return i;
  return std::nullopt;
}

bool PolyRing::same_as(const PolyRing& o) const {
  return modulus() == o.modulus() && vars_ == o.vars_ && order_ == o.order_;
}

RingPtr PolyRing::extended(const std::string& hint, MonomialOrder ord) const {
  std::string name = hint.empty() ? "t" : hint;
  if (var_index(name)) {
    for (int i = 0;; ++i) {
      std::string cand = name + std::to_string(i);
      if (!var_index(cand)) {
        name = cand;
        break;
      }
    }
  }
  std::vector<std::string> vars = vars_;
  vars.push_back(name);
  return make(modulus(), std::move(vars), ord, limits_);
}

RingPtr PolyRing::with_order(MonomialOrder ord) const {
  return make(modulus(), vars_, ord, limits_);
}

void require_same_ring(const RingPtr& a, const RingPtr& b) {
  if (!a || !b) throw StructuralError("operation on an uninitialized ring");
  if (a.get() == b.get()) return;
  if (!a->same_as(*b)) throw StructuralError("ring mismatch");
}

Poly Poly::zero(RingPtr r) {
  Poly f;
  f.ring_ = std::move(r);
  return f;
}

Poly Poly::constant(RingPtr r, std::int64_t c) {
  std::uint32_t cc = r->field().reduce_int(c);
  Poly f;
  f.ring_ = std::move(r);
  if (cc) f.terms_.push_back({Monomial::one(f.ring_->nvars()), cc});
  return f;
}

Poly Poly::variable(RingPtr r, std::size_t i) {
  if (i >= r->nvars()) throw StructuralError("variable index out of range");
  Poly f;
  f.ring_ = r;
  f.terms_.push_back({Monomial::var(r->nvars(), i), 1});
  return f;
}

Poly Poly::term(RingPtr r, Monomial m, std::int64_t c) {
  std::uint32_t cc = r->field().reduce_int(c);
  Poly f;
  f.ring_ = std::move(r);
  if (cc) f.terms_.push_back({std::move(m), cc});
  return f;
}

Poly Poly::from_terms(RingPtr r, std::vector<Term> terms) {
  const MonomialOrder& ord = r->order();
  std::sort(terms.begin(), terms.end(), [&](const Term& a, const Term& b) {
    return cmp_monomials(a.mono, b.mono, ord) > 0;
  });
  Poly f;
  f.ring_ = r;
  const PrimeField& fp = r->field();
  for (auto& t : terms) {
    if (t.coeff == 0) continue;
    if (!f.terms_.empty() && f.terms_.back().mono == t.mono) {
      std::uint32_t c = fp.add(f.terms_.back().coeff, t.coeff);
      if (c == 0)
        f.terms_.pop_back();
      else
        f.terms_.back().coeff = c;
    } else {
      f.terms_.push_back(std::move(t));
    }
  }
  return f;
}

int Poly::degree_in(std::size_t var) const {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, int(t.mono.exp[var]));
  return d;
}

bool Poly::operator==(const Poly& o) const {
  if (!ring_ || !o.ring_) return terms_.empty() && o.terms_.empty();
  if (!ring_->same_as(*o.ring_)) return false;
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].coeff != o.terms_[i].coeff || !(terms_[i].mono == o.terms_[i].mono))
      return false;
  return true;
}

Poly poly_add(const Poly& f, const Poly& g) {
  require_same_ring(f.ring(), g.ring());
  const auto& r = f.ring();
  const PrimeField& fp = r->field();
  const MonomialOrder& ord = r->order();
  std::vector<Term> out;
  out.reserve(f.terms().size() + g.terms().size());
  std::size_t i = 0, j = 0;
  while (i < f.terms().size() && j < g.terms().size()) {
    int c = cmp_monomials(f.terms()[i].mono, g.terms()[j].mono, ord);
    if (c > 0) {
      out.push_back(f.terms()[i++]);
    } else if (c < 0) {
      out.push_back(g.terms()[j++]);
    } else {
      std::uint32_t s = fp.add(f.terms()[i].coeff, g.terms()[j].coeff);
      if (s) out.push_back({f.terms()[i].mono, s});
      ++i, ++j;
    }
  }
  for (; i < f.terms().size(); ++i) out.push_back(f.terms()[i]);
  for (; j < g.terms().size(); ++j) out.push_back(g.terms()[j]);
  return Poly::from_terms(r, std::move(out));
}

Poly poly_neg(const Poly& f) {
  if (f.is_zero()) return f;
  const PrimeField& fp = f.ring()->field();
  std::vector<Term> out = f.terms();
  for (auto& t : out) t.coeff = fp.neg(t.coeff);
  return Poly::from_terms(f.ring(), std::move(out));
}

Poly poly_sub(const Poly& f, const Poly& g) { return poly_add(f, poly_neg(g)); }

Poly poly_scale(const Poly& f, std::uint32_t c) {
  if (f.is_zero()) return f;
  const PrimeField& fp = f.ring()->field();
  c %= fp.modulus();
  if (c == 0) return Poly::zero(f.ring());
  std::vector<Term> out = f.terms();
  for (auto& t : out) t.coeff = fp.mul(t.coeff, c);
  return Poly::from_terms(f.ring(), std::move(out));
}

Poly poly_term_mul(const Poly& f, const Monomial& m, std::uint32_t c) {
  if (f.is_zero() || c == 0) return Poly::zero(f.ring());
  const PrimeField& fp = f.ring()->field();
  std::vector<Term> out;
  out.reserve(f.terms().size());
  for (const auto& t : f.terms()) {
    std::uint32_t cc = fp.mul(t.coeff, c);
    if (cc) out.push_back({mono_mul(t.mono, m), cc});
  }
  // multiplying by a fixed monomial preserves the term order
  return Poly::from_terms(f.ring(), std::move(out));
}

Poly poly_mul(const Poly& f, const Poly& g) {
  require_same_ring(f.ring(), g.ring());
  if (f.is_zero() || g.is_zero()) return Poly::zero(f.ring());
  std::vector<Term> out;
  out.reserve(f.terms().size() * g.terms().size());
  const PrimeField& fp = f.ring()->field();
  for (const auto& a : f.terms())
    for (const auto& b : g.terms())
      out.push_back({mono_mul(a.mono, b.mono), fp.mul(a.coeff, b.coeff)});
  return Poly::from_terms(f.ring(), std::move(out));
}

Poly poly_monic(const Poly& f) {
  if (f.is_zero()) return f;
  return poly_scale(f, f.ring()->field().inv(f.lc()));
}

Poly poly_pow(const Poly& f, std::uint32_t e) {
  Poly acc = Poly::constant(f.ring(), 1);
  Poly base = f;
  while (e) {
    if (e & 1) acc = poly_mul(acc, base);
    e >>= 1;
    if (e) base = poly_mul(base, base);
  }
  return acc;
}

std::string to_string(const Poly& f) {
  if (f.is_zero()) return "0";
  const auto& vars = f.ring()->vars();
  std::ostringstream os;
  bool first = true;
  for (const auto& t : f.terms()) {
    if (!first) os << " + ";
    first = false;
    bool printed = false;
    if (t.coeff != 1 || t.mono.is_one()) {
      os << t.coeff;
      printed = true;
    }
    for (std::size_t i = 0; i < t.mono.exp.size(); ++i) {
      if (!t.mono.exp[i]) continue;
      if (printed) os << "*";
      os << vars[i];
      if (t.mono.exp[i] > 1) os << "^" << t.mono.exp[i];
      printed = true;
    }
  }
  return os.str();
}

RingMap::RingMap(RingPtr src, RingPtr dst, std::vector<Poly> images)
    : src_(std::move(src)), dst_(std::move(dst)), images_(std::move(images)) {
  if (images_.size() != src_->nvars())
    throw StructuralError("ring map needs one image per source variable");
  for (const auto& f : images_)
    if (!f.is_zero()) require_same_ring(f.ring(), dst_);
}

RingMap RingMap::inclusion(RingPtr src, RingPtr dst) {
  std::vector<Poly> images;
  images.reserve(src->nvars());
  for (const auto& name : src->vars()) {
    auto idx = dst->var_index(name);
    if (!idx) throw StructuralError("inclusion target lacks variable '" + name + "'");
    images.push_back(Poly::variable(dst, *idx));
  }
  return RingMap(std::move(src), std::move(dst), std::move(images));
}

Poly RingMap::apply(const Poly& f) const {
  if (f.is_zero()) return Poly::zero(dst_);
  require_same_ring(f.ring(), src_);
  // per-variable power cache; exponents stay small under the degree guard
  std::vector<std::vector<Poly>> powers(src_->nvars());
  auto power = [&](std::size_t v, std::uint32_t e) -> const Poly& {
    auto& cache = powers[v];
    if (cache.empty()) cache.push_back(Poly::constant(dst_, 1));
    while (cache.size() <= e) cache.push_back(poly_mul(cache.back(), images_[v]));
    return cache[e];
  };
  Poly acc = Poly::zero(dst_);
  for (const auto& t : f.terms()) {
    Poly m = Poly::constant(dst_, std::int64_t(t.coeff));
    for (std::size_t v = 0; v < t.mono.exp.size(); ++v)
      if (t.mono.exp[v]) m = poly_mul(m, power(v, t.mono.exp[v]));
    acc = poly_add(acc, m);
  }
  return acc;
}

}  // namespace codimcat
