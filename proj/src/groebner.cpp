#include "codimcat/groebner.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <set>
#include <sstream>

namespace codimcat {

namespace {

using Clock = std::chrono::steady_clock;

struct Deadline {
  Clock::time_point at;
  void check() const {
    if (Clock::now() > at) throw ResourceExceeded("wall-clock timeout in basis engine");
  }
};

Deadline deadline_for(const RingPtr& r) {
  return Deadline{Clock::now() +
                  std::chrono::milliseconds(std::int64_t(r->limits().timeout_s * 1000.0))};
}

}  // namespace

FreeVec::FreeVec(RingPtr r, std::size_t rank) : ring_(r) {
  comp_.assign(rank, Poly::zero(r));
}

FreeVec FreeVec::unit(RingPtr r, std::size_t rank, std::size_t pos) {
  FreeVec v(r, rank);
  v.comp_[pos] = Poly::constant(r, 1);
  return v;
}

FreeVec FreeVec::from_components(std::vector<Poly> comps) {
  if (comps.empty()) throw StructuralError("free vector needs a positive rank");
  FreeVec v;
  v.ring_ = comps.front().ring();
  for (const auto& c : comps)
    if (!v.ring_ && c.ring()) v.ring_ = c.ring();
  if (!v.ring_) throw StructuralError("free vector needs ring-attached components");
  for (auto& c : comps)
    if (c.ring())
      require_same_ring(c.ring(), v.ring_);
    else
      c = Poly::zero(v.ring_);
  v.comp_ = std::move(comps);
  return v;
}

bool FreeVec::is_zero() const {
  for (const auto& c : comp_)
    if (!c.is_zero()) return false;
  return true;
}

FreeVec vec_add(const FreeVec& a, const FreeVec& b) {
  if (a.rank() != b.rank()) throw StructuralError("free module rank mismatch");
  FreeVec r(a.ring(), a.rank());
  for (std::size_t i = 0; i < a.rank(); ++i) r[i] = poly_add(a[i], b[i]);
  return r;
}

FreeVec vec_sub(const FreeVec& a, const FreeVec& b) {
  if (a.rank() != b.rank()) throw StructuralError("free module rank mismatch");
  FreeVec r(a.ring(), a.rank());
  for (std::size_t i = 0; i < a.rank(); ++i) r[i] = poly_sub(a[i], b[i]);
  return r;
}

FreeVec vec_neg(const FreeVec& a) {
  FreeVec r(a.ring(), a.rank());
  for (std::size_t i = 0; i < a.rank(); ++i) r[i] = poly_neg(a[i]);
  return r;
}

FreeVec vec_scale(const FreeVec& a, const Poly& f) {
  FreeVec r(a.ring(), a.rank());
  for (std::size_t i = 0; i < a.rank(); ++i) r[i] = poly_mul(a[i], f);
  return r;
}

FreeVec vec_term_mul(const FreeVec& a, const Monomial& m, std::uint32_t c) {
  FreeVec r(a.ring(), a.rank());
  for (std::size_t i = 0; i < a.rank(); ++i) r[i] = poly_term_mul(a[i], m, c);
  return r;
}

int cmp_module_monomials(const ModMono& a, const ModMono& b, const MonomialOrder& ring_ord,
                         const ModuleOrder& mo) {
  bool a_tag = a.pos >= mo.tag_start, b_tag = b.pos >= mo.tag_start;
  if (a_tag != b_tag) return a_tag ? -1 : 1;  // value block dominates
  if (!a_tag) {
    if (a.pos != b.pos) return a.pos < b.pos ? 1 : -1;  // lower position is greater
    return cmp_monomials(a.mono, b.mono, ring_ord);
  }
  if (!mo.tag_lead.empty()) {
    const auto& ta = mo.tag_lead[a.pos - mo.tag_start];
    const auto& tb = mo.tag_lead[b.pos - mo.tag_start];
    // Schreyer: compare the images m * lead(gen) in the value module
    if (ta.pos != tb.pos) {
      int c = ta.pos < tb.pos ? 1 : -1;
      if (c) return c;
    } else {
      int c = cmp_monomials(mono_mul(a.mono, ta.mono), mono_mul(b.mono, tb.mono), ring_ord);
      if (c) return c;
    }
  }
  if (a.pos != b.pos) return a.pos < b.pos ? 1 : -1;
  return cmp_monomials(a.mono, b.mono, ring_ord);
}

std::optional<ModLead> vec_lead(const FreeVec& v, const ModuleOrder& mo) {
  std::optional<ModLead> best;
  const MonomialOrder& ord = v.ring()->order();
  for (std::size_t p = 0; p < v.rank(); ++p) {
    if (v[p].is_zero()) continue;
    ModLead cand{p, v[p].lm(), v[p].lc()};
    if (!best || cmp_module_monomials({cand.pos, cand.mono}, {best->pos, best->mono}, ord, mo) > 0)
      best = cand;
  }
  return best;
}

namespace {

// Removes the current lead term of v (assumed present).
void strip_lead(FreeVec& v, const ModLead& l) {
  v[l.pos] = poly_sub(v[l.pos], Poly::term(v.ring(), l.mono, std::int64_t(l.coeff)));
}

struct DivideOut {
  FreeVec rem;
  std::vector<Poly> q;  // per basis element; only filled when requested
};

DivideOut divide_full(const FreeVec& f, const std::vector<FreeVec>& G,
                      const std::vector<ModLead>& leads, const ModuleOrder& mo,
                      const Deadline& dl, bool want_q) {
  const RingPtr& ring = f.ring();
  const std::uint32_t hard_deg = ring->limits().max_degree * 4 + 16;
  DivideOut out;
  out.rem = FreeVec(ring, f.rank());
  if (want_q) out.q.assign(G.size(), Poly::zero(ring));
  FreeVec work = f;
  while (true) {
    auto lead = vec_lead(work, mo);
    if (!lead) break;
    dl.check();
    if (lead->mono.deg > hard_deg)
      throw ResourceExceeded("degree bound exceeded during division");
    bool reduced = false;
    for (std::size_t l = 0; l < G.size(); ++l) {
      if (leads[l].pos != lead->pos || !mono_divides(leads[l].mono, lead->mono)) continue;
      Monomial m = mono_div(lead->mono, leads[l].mono);
      std::uint32_t c = ring->field().mul(lead->coeff, ring->field().inv(leads[l].coeff));
      work = vec_sub(work, vec_term_mul(G[l], m, c));
      if (want_q)
        out.q[l] = poly_add(out.q[l], Poly::term(ring, m, std::int64_t(c)));
      reduced = true;
      break;
    }
    if (!reduced) {
      out.rem[lead->pos] =
          poly_add(out.rem[lead->pos], Poly::term(ring, lead->mono, std::int64_t(lead->coeff)));
      strip_lead(work, *lead);
    }
  }
  return out;
}

std::vector<ModLead> leads_of(const std::vector<FreeVec>& G, const ModuleOrder& mo) {
  std::vector<ModLead> ls;
  ls.reserve(G.size());
  for (const auto& g : G) {
    auto l = vec_lead(g, mo);
    if (!l) throw StructuralError("zero vector in basis");
    ls.push_back(*l);
  }
  return ls;
}

}  // namespace

FreeVec vec_normal_form(const FreeVec& f, const std::vector<FreeVec>& G, const ModuleOrder& mo) {
  if (G.empty()) return f;
  for (const auto& g : G) require_same_ring(g.ring(), f.ring());
  Deadline dl = deadline_for(f.ring());
  return divide_full(f, G, leads_of(G, mo), mo, dl, false).rem;
}

Poly normal_form(const Poly& f, const std::vector<Poly>& G) {
  if (f.is_zero()) return f;
  std::vector<FreeVec> gv;
  for (const auto& g : G)
    if (!g.is_zero()) gv.push_back(FreeVec::from_components({g}));
  if (gv.empty()) return f;
  FreeVec fv = FreeVec::from_components({f});
  return vec_normal_form(fv, gv, ModuleOrder::pot(1))[0];
}

GBResult module_groebner(const std::vector<FreeVec>& gens, const ModuleOrder& mo,
                         const GBOptions& opt) {
  GBResult res;
  RingPtr ring;
  std::size_t rank = 0;
  std::vector<std::size_t> src_index;  // basis element -> input index (for reps)
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const auto& g = gens[i];
    if (!ring) {
      ring = g.ring();
      rank = g.rank();
    } else {
      require_same_ring(g.ring(), ring);
      if (g.rank() != rank) throw StructuralError("free module rank mismatch");
    }
    if (g.is_zero()) continue;
    res.basis.push_back(g);
    src_index.push_back(i);
  }
  if (!ring) return res;  // no nonzero generators
  const PrimeField& fp = ring->field();
  const Limits& lim = ring->limits();
  Deadline dl = deadline_for(ring);

  std::vector<FreeVec> reps;
  if (opt.track) {
    for (std::size_t b = 0; b < res.basis.size(); ++b)
      reps.push_back(FreeVec::unit(ring, gens.size(), src_index[b]));
  }
  // monic input
  std::vector<ModLead> leads;
  for (std::size_t b = 0; b < res.basis.size(); ++b) {
    auto l = vec_lead(res.basis[b], mo);
    std::uint32_t inv = fp.inv(l->coeff);
    if (inv != 1) {
      res.basis[b] = vec_term_mul(res.basis[b], Monomial::one(ring->nvars()), inv);
      if (opt.track) reps[b] = vec_term_mul(reps[b], Monomial::one(ring->nvars()), inv);
      l->coeff = 1;
    }
    leads.push_back(*l);
  }

  struct Pair {
    std::size_t i, j;
    Monomial lcm;
  };
  std::vector<Pair> queue;
  std::set<std::pair<std::size_t, std::size_t>> in_queue;
  auto push_pairs = [&](std::size_t t) {
    for (std::size_t i = 0; i < t; ++i) {
      if (leads[i].pos != leads[t].pos) continue;
      queue.push_back({i, t, mono_lcm(leads[i].mono, leads[t].mono)});
      in_queue.insert({i, t});
    }
  };
  for (std::size_t t = 1; t < res.basis.size(); ++t) push_pairs(t);

  const bool rank_one = (rank == 1) && mo.tag_lead.empty() && mo.tag_start >= 1;

  while (!queue.empty()) {
    dl.check();
    // degree-graded selection, ties by index for determinism
    std::size_t best = 0;
    for (std::size_t q = 1; q < queue.size(); ++q) {
      const auto &a = queue[q], &b = queue[best];
      if (a.lcm.deg < b.lcm.deg ||
          (a.lcm.deg == b.lcm.deg && (a.i < b.i || (a.i == b.i && a.j < b.j))))
        best = q;
    }
    Pair pr = queue[best];
    queue.erase(queue.begin() + std::ptrdiff_t(best));
    in_queue.erase({pr.i, pr.j});

    // coprimality criterion (valid in rank one only)
    if (rank_one && mono_coprime(leads[pr.i].mono, leads[pr.j].mono)) continue;
    // chain criterion
    bool skip = false;
    for (std::size_t k = 0; k < res.basis.size() && !skip; ++k) {
      if (k == pr.i || k == pr.j) continue;
      if (leads[k].pos != leads[pr.i].pos || !mono_divides(leads[k].mono, pr.lcm)) continue;
      auto key = [&](std::size_t a, std::size_t b) {
        return std::make_pair(std::min(a, b), std::max(a, b));
      };
      if (!in_queue.count(key(pr.i, k)) && !in_queue.count(key(pr.j, k))) skip = true;
    }
    if (skip) continue;

    Monomial mi = mono_div(pr.lcm, leads[pr.i].mono);
    Monomial mj = mono_div(pr.lcm, leads[pr.j].mono);
    FreeVec s = vec_sub(vec_term_mul(res.basis[pr.i], mi, 1), vec_term_mul(res.basis[pr.j], mj, 1));
    FreeVec rep_s;
    if (opt.track)
      rep_s = vec_sub(vec_term_mul(reps[pr.i], mi, 1), vec_term_mul(reps[pr.j], mj, 1));

    auto div = divide_full(s, res.basis, leads, mo, dl, opt.track);
    if (opt.track) {
      for (std::size_t l = 0; l < res.basis.size(); ++l)
        if (!div.q[l].is_zero()) rep_s = vec_sub(rep_s, vec_scale(reps[l], div.q[l]));
    }
    if (div.rem.is_zero()) continue;

    auto l = vec_lead(div.rem, mo);
    if (l->mono.deg > lim.max_degree)
      throw ResourceExceeded("basis degree bound exceeded (" + std::to_string(l->mono.deg) + ")");
    std::uint32_t inv = fp.inv(l->coeff);
    FreeVec nb = inv == 1 ? div.rem : vec_term_mul(div.rem, Monomial::one(ring->nvars()), inv);
    if (opt.track)
      reps.push_back(inv == 1 ? rep_s : vec_term_mul(rep_s, Monomial::one(ring->nvars()), inv));
    res.basis.push_back(std::move(nb));
    leads.push_back({l->pos, l->mono, 1});
    if (res.basis.size() > lim.max_basis) throw ResourceExceeded("basis size bound exceeded");
    push_pairs(res.basis.size() - 1);
  }

  // minimalize: drop elements whose lead is divisible by another lead
  std::vector<char> keep(res.basis.size(), 1);
  for (std::size_t a = 0; a < res.basis.size(); ++a) {
    if (!keep[a]) continue;
    for (std::size_t b = 0; b < res.basis.size(); ++b) {
      if (a == b || !keep[b]) continue;
      if (leads[b].pos == leads[a].pos && mono_divides(leads[b].mono, leads[a].mono) &&
          !(leads[a].mono == leads[b].mono && b > a)) {
        keep[a] = 0;
        break;
      }
    }
  }
  std::vector<FreeVec> min_basis;
  std::vector<FreeVec> min_reps;
  std::vector<ModLead> min_leads;
  for (std::size_t a = 0; a < res.basis.size(); ++a) {
    if (!keep[a]) continue;
    min_basis.push_back(res.basis[a]);
    min_leads.push_back(leads[a]);
    if (opt.track) min_reps.push_back(reps[a]);
  }

  // tail reduction against the other elements
  for (std::size_t a = 0; a < min_basis.size(); ++a) {
    std::vector<FreeVec> others;
    std::vector<ModLead> other_leads;
    std::vector<std::size_t> other_idx;
    for (std::size_t b = 0; b < min_basis.size(); ++b) {
      if (b == a) continue;
      others.push_back(min_basis[b]);
      other_leads.push_back(min_leads[b]);
      other_idx.push_back(b);
    }
    if (others.empty()) continue;
    auto div = divide_full(min_basis[a], others, other_leads, mo, dl, opt.track);
    if (opt.track) {
      FreeVec r = min_reps[a];
      for (std::size_t l = 0; l < others.size(); ++l)
        if (!div.q[l].is_zero()) r = vec_sub(r, vec_scale(min_reps[other_idx[l]], div.q[l]));
      min_reps[a] = std::move(r);
    }
    min_basis[a] = div.rem;
  }

  // canonical ordering: leads descending
  std::vector<std::size_t> perm(min_basis.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  const MonomialOrder& ord = ring->order();
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return cmp_module_monomials({min_leads[a].pos, min_leads[a].mono},
                                {min_leads[b].pos, min_leads[b].mono}, ord, mo) > 0;
  });
  GBResult out;
  for (std::size_t i : perm) {
    out.basis.push_back(std::move(min_basis[i]));
    if (opt.track) out.reps.push_back(std::move(min_reps[i]));
  }
#ifndef NDEBUG
  // fixpoint: every S-vector of the reduced basis reduces to zero
  {
    auto ls = leads_of(out.basis, mo);
    for (std::size_t a = 0; a < out.basis.size(); ++a)
      for (std::size_t b = a + 1; b < out.basis.size(); ++b) {
        if (ls[a].pos != ls[b].pos) continue;
        Monomial l = mono_lcm(ls[a].mono, ls[b].mono);
        FreeVec s = vec_sub(vec_term_mul(out.basis[a], mono_div(l, ls[a].mono), 1),
                            vec_term_mul(out.basis[b], mono_div(l, ls[b].mono), 1));
        assert(divide_full(s, out.basis, ls, mo, dl, false).rem.is_zero());
      }
  }
#endif
  return out;
}

std::vector<Poly> ideal_groebner(const std::vector<Poly>& gens) {
  std::vector<FreeVec> gv;
  for (const auto& g : gens)
    if (!g.is_zero()) gv.push_back(FreeVec::from_components({g}));
  auto gb = module_groebner(gv, ModuleOrder::pot(1));
  std::vector<Poly> out;
  out.reserve(gb.basis.size());
  for (auto& v : gb.basis) out.push_back(v[0]);
  return out;
}

std::vector<FreeVec> syzygies(const std::vector<FreeVec>& gens) {
  std::vector<FreeVec> out;
  if (gens.empty()) return out;
  RingPtr ring = gens.front().ring();
  std::size_t rank = gens.front().rank();
  for (const auto& g : gens) {
    require_same_ring(g.ring(), ring);
    if (g.rank() != rank) throw StructuralError("free module rank mismatch");
  }
  const std::size_t m = gens.size();
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < m; ++i)
    if (!gens[i].is_zero()) nonzero.push_back(i);

  // unit syzygies for dropped zero generators
  for (std::size_t i = 0; i < m; ++i)
    if (gens[i].is_zero()) out.push_back(FreeVec::unit(ring, m, i));
  if (nonzero.empty()) return out;

  ModuleOrder mo;
  mo.tag_start = rank;
  std::vector<FreeVec> aug;
  for (std::size_t a = 0; a < nonzero.size(); ++a) {
    const auto& g = gens[nonzero[a]];
    auto l = vec_lead(g, ModuleOrder::pot(rank));
    mo.tag_lead.push_back({l->pos, l->mono});
    FreeVec v(ring, rank + nonzero.size());
    for (std::size_t c = 0; c < rank; ++c) v[c] = g[c];
    v[rank + a] = Poly::constant(ring, 1);
    aug.push_back(std::move(v));
  }
  auto gb = module_groebner(aug, mo);
  for (const auto& v : gb.basis) {
    bool value_zero = true;
    for (std::size_t c = 0; c < rank && value_zero; ++c)
      if (!v[c].is_zero()) value_zero = false;
    if (!value_zero) continue;
    FreeVec s(ring, m);
    for (std::size_t a = 0; a < nonzero.size(); ++a) s[nonzero[a]] = v[rank + a];
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<std::vector<Poly>> lift_into_submodule(const FreeVec& v,
                                                     const std::vector<FreeVec>& gens) {
  RingPtr ring = v.ring();
  std::vector<Poly> coeffs(gens.size(), Poly::zero(ring));
  if (v.is_zero()) return coeffs;
  std::vector<FreeVec> nz;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (!gens[i].is_zero()) {
      nz.push_back(gens[i]);
      idx.push_back(i);
    }
  if (nz.empty()) return std::nullopt;
  ModuleOrder mo = ModuleOrder::pot(v.rank());
  GBOptions opt;
  opt.track = true;
  auto gb = module_groebner(nz, mo, opt);
  Deadline dl = deadline_for(ring);
  auto div = divide_full(v, gb.basis, leads_of(gb.basis, mo), mo, dl, true);
  if (!div.rem.is_zero()) return std::nullopt;
  for (std::size_t l = 0; l < gb.basis.size(); ++l) {
    if (div.q[l].is_zero()) continue;
    for (std::size_t j = 0; j < nz.size(); ++j)
      coeffs[idx[j]] = poly_add(coeffs[idx[j]], poly_mul(div.q[l], gb.reps[l][j]));
  }
  return coeffs;
}

bool in_submodule(const FreeVec& v, const std::vector<FreeVec>& gens) {
  if (v.is_zero()) return true;
  std::vector<FreeVec> nz;
  for (const auto& g : gens)
    if (!g.is_zero()) nz.push_back(g);
  if (nz.empty()) return false;
  ModuleOrder mo = ModuleOrder::pot(v.rank());
  auto gb = module_groebner(nz, mo);
  return vec_normal_form(v, gb.basis, mo).is_zero();
}

bool submodule_contains(const std::vector<FreeVec>& big, const std::vector<FreeVec>& small) {
  std::vector<FreeVec> nz;
  for (const auto& g : big)
    if (!g.is_zero()) nz.push_back(g);
  std::optional<std::vector<FreeVec>> gb;
  ModuleOrder mo = ModuleOrder::pot(small.empty() ? 1 : small.front().rank());
  for (const auto& s : small) {
    if (s.is_zero()) continue;
    if (nz.empty()) return false;
    if (!gb) {
      mo = ModuleOrder::pot(s.rank());
      gb = module_groebner(nz, mo).basis;
    }
    if (!vec_normal_form(s, *gb, mo).is_zero()) return false;
  }
  return true;
}

bool submodule_equal(const std::vector<FreeVec>& a, const std::vector<FreeVec>& b) {
  return submodule_contains(a, b) && submodule_contains(b, a);
}

Ideal::Ideal(RingPtr r, std::vector<Poly> gens) : ring_(std::move(r)) {
  for (auto& g : gens) {
    if (g.is_zero()) continue;
    require_same_ring(g.ring(), ring_);
    gens_.push_back(std::move(g));
  }
}

Ideal Ideal::zero(RingPtr r) { return Ideal(std::move(r), {}); }

Ideal Ideal::unit(RingPtr r) {
  Poly one = Poly::constant(r, 1);
  return Ideal(std::move(r), {one});
}

const std::vector<Poly>& Ideal::groebner() const {
  std::call_once(cache_->once, [&] { cache_->gb = ideal_groebner(gens_); });
  return cache_->gb;
}

bool Ideal::is_unit_ideal() const {
  for (const auto& g : gens_)
    if (!g.is_zero() && g.is_constant()) return true;
  const auto& gb = groebner();
  return gb.size() == 1 && gb[0].is_one();
}

std::string Ideal::render() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (i) os << ", ";
    os << to_string(gens_[i]);
  }
  os << "]";
  return os.str();
}

bool in_ideal(const Poly& f, const Ideal& I) {
  if (f.is_zero()) return true;
  require_same_ring(f.ring(), I.ring());
  return normal_form(f, I.groebner()).is_zero();
}

bool ideal_equal(const Ideal& I, const Ideal& J) {
  require_same_ring(I.ring(), J.ring());
  const auto &a = I.groebner(), &b = J.groebner();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

Ideal ideal_sum(const Ideal& I, const Ideal& J) {
  require_same_ring(I.ring(), J.ring());
  std::vector<Poly> gens = I.gens();
  for (const auto& g : J.gens()) gens.push_back(g);
  return Ideal(I.ring(), std::move(gens));
}

Ideal ideal_product(const Ideal& I, const Ideal& J) {
  require_same_ring(I.ring(), J.ring());
  std::vector<Poly> gens;
  for (const auto& a : I.gens())
    for (const auto& b : J.gens()) {
      Poly p = poly_mul(a, b);
      bool dup = false;
      for (const auto& g : gens)
        if (g == p) {
          dup = true;
          break;
        }
      if (!dup) gens.push_back(std::move(p));
    }
  return Ideal(I.ring(), std::move(gens));
}

Ideal ideal_power(const Ideal& I, std::uint32_t n) {
  if (n == 0) return Ideal::unit(I.ring());
  Ideal acc = I;
  for (std::uint32_t i = 1; i < n; ++i) acc = ideal_product(acc, I);
  return acc;
}

namespace {

std::string fresh_name(const PolyRing& r, const std::string& hint) {
  if (!r.var_index(hint)) return hint;
  for (int i = 0;; ++i) {
    std::string cand = hint + std::to_string(i);
    if (!r.var_index(cand)) return cand;
  }
}

// Transfers a polynomial to another ring by variable name; every variable
// that actually occurs must exist in the target.
Poly transfer_poly(const Poly& f, const RingPtr& dst) {
  if (f.is_zero()) return Poly::zero(dst);
  const auto& src = f.ring();
  std::vector<std::optional<std::size_t>> where(src->nvars());
  for (std::size_t i = 0; i < src->nvars(); ++i) where[i] = dst->var_index(src->vars()[i]);
  std::vector<Term> terms;
  for (const auto& t : f.terms()) {
    Monomial m = Monomial::one(dst->nvars());
    for (std::size_t i = 0; i < t.mono.exp.size(); ++i) {
      if (!t.mono.exp[i]) continue;
      if (!where[i])
        throw StructuralError("cannot transfer variable '" + src->vars()[i] + "'");
      m.exp[*where[i]] += t.mono.exp[i];
      m.deg += t.mono.exp[i];
    }
    terms.push_back({std::move(m), t.coeff});
  }
  return Poly::from_terms(dst, std::move(terms));
}

}  // namespace

Ideal ideal_intersect(const Ideal& I, const Ideal& J) {
  require_same_ring(I.ring(), J.ring());
  if (I.is_zero_ideal() || J.is_zero_ideal()) return Ideal::zero(I.ring());
  if (I.is_unit_ideal()) return J;
  if (J.is_unit_ideal()) return I;
  const RingPtr& base = I.ring();
  std::string tname = fresh_name(*base, "t");
  std::vector<std::string> vars{tname};
  for (const auto& v : base->vars()) vars.push_back(v);
  RingPtr ext = PolyRing::make(base->modulus(), vars, MonomialOrder{OrderKind::Block, 1},
                               base->limits());
  Poly t = Poly::variable(ext, 0);
  Poly one_minus_t = poly_sub(Poly::constant(ext, 1), t);
  std::vector<Poly> gens;
  for (const auto& g : I.gens()) gens.push_back(poly_mul(t, transfer_poly(g, ext)));
  for (const auto& g : J.gens()) gens.push_back(poly_mul(one_minus_t, transfer_poly(g, ext)));
  auto gb = ideal_groebner(gens);
  std::vector<Poly> res;
  for (const auto& g : gb)
    if (g.degree_in(0) <= 0) res.push_back(transfer_poly(g, base));
  return Ideal(base, std::move(res));
}

Ideal ideal_colon_single(const Ideal& I, const Poly& f) {
  if (f.is_zero()) return Ideal::unit(I.ring());
  require_same_ring(f.ring(), I.ring());
  std::vector<FreeVec> vecs;
  vecs.push_back(FreeVec::from_components({f}));
  for (const auto& g : I.gens()) vecs.push_back(FreeVec::from_components({g}));
  auto syz = syzygies(vecs);
  std::vector<Poly> gens;
  for (const auto& s : syz)
    if (!s[0].is_zero()) gens.push_back(s[0]);
  return Ideal(I.ring(), std::move(gens));
}

Ideal ideal_colon(const Ideal& I, const Ideal& J) {
  require_same_ring(I.ring(), J.ring());
  if (J.is_zero_ideal()) return Ideal::unit(I.ring());
  std::optional<Ideal> acc;
  for (const auto& f : J.gens()) {
    Ideal c = ideal_colon_single(I, f);
    acc = acc ? ideal_intersect(*acc, c) : c;
  }
  return *acc;
}

SaturationResult saturate(const Ideal& I, const Ideal& J) {
  Ideal prev = I;
  for (std::uint32_t n = 0; n <= 64; ++n) {
    Ideal next = ideal_colon(prev, J);
    if (ideal_equal(prev, next)) return {prev, n};
    prev = next;
  }
  throw ResourceExceeded("saturation did not stabilize within 64 steps");
}

Ideal eliminate(const Ideal& I, const std::vector<std::size_t>& vars) {
  const RingPtr& base = I.ring();
  for (std::size_t v : vars)
    if (v >= base->nvars()) throw StructuralError("eliminated variable out of range");
  if (vars.empty()) return I;
  std::vector<char> kill(base->nvars(), 0);
  for (std::size_t v : vars) kill[v] = 1;
  std::vector<std::string> front, back;
  for (std::size_t i = 0; i < base->nvars(); ++i)
    (kill[i] ? front : back).push_back(base->vars()[i]);
  if (back.empty()) throw StructuralError("cannot eliminate every variable");

  std::vector<std::string> ordered = front;
  for (const auto& v : back) ordered.push_back(v);
  RingPtr work = PolyRing::make(base->modulus(), ordered,
                                MonomialOrder{OrderKind::Block, front.size()}, base->limits());
  std::vector<Poly> gens;
  for (const auto& g : I.gens()) gens.push_back(transfer_poly(g, work));
  auto gb = ideal_groebner(gens);

  RingPtr result = PolyRing::make(base->modulus(), back, base->order(), base->limits());
  std::vector<Poly> out;
  for (const auto& g : gb) {
    bool clean = true;
    for (std::size_t i = 0; i < front.size() && clean; ++i)
      if (g.degree_in(i) > 0) clean = false;
    if (clean) out.push_back(transfer_poly(g, result));
  }
  return Ideal(result, std::move(out));
}

int krull_dim(const Ideal& I) {
  const RingPtr& base = I.ring();
  std::vector<Poly> gb;
  if (base->order().is_graded()) {
    gb = I.groebner();
  } else {
    RingPtr g = base->with_order(MonomialOrder{OrderKind::Grevlex, 0});
    std::vector<Poly> gens;
    for (const auto& f : I.gens()) gens.push_back(transfer_poly(f, g));
    gb = ideal_groebner(gens);
  }
  for (const auto& f : gb)
    if (f.is_constant() && !f.is_zero()) return -1;

  const std::size_t n = base->nvars();
  std::vector<std::uint32_t> supports;
  for (const auto& f : gb) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (f.lm().exp[i]) mask |= (1u << i);
    supports.push_back(mask);
  }
  int best = 0;
  for (std::uint32_t set = 0; set < (1u << n); ++set) {
    int size = __builtin_popcount(set);
    if (size <= best) continue;
    bool independent = true;
    for (std::uint32_t s : supports)
      if ((s & ~set) == 0) {
        independent = false;
        break;
      }
    if (independent) best = size;
  }
  return best;
}

bool radical_member(const Poly& f, const Ideal& I) {
  if (f.is_zero()) return true;
  require_same_ring(f.ring(), I.ring());
  const RingPtr& base = I.ring();
  RingPtr ext = base->extended("t", MonomialOrder{OrderKind::Grevlex, 0});
  RingMap incl = RingMap::inclusion(base, ext);
  std::vector<Poly> gens;
  for (const auto& g : I.gens()) gens.push_back(incl.apply(g));
  Poly t = Poly::variable(ext, ext->nvars() - 1);
  gens.push_back(poly_sub(Poly::constant(ext, 1), poly_mul(t, incl.apply(f))));
  auto gb = ideal_groebner(gens);
  return gb.size() == 1 && gb[0].is_one();
}

}  // namespace codimcat
