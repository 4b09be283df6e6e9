#include "codimcat/fpmod.hpp"

#include <algorithm>
#include <sstream>

namespace codimcat {

PolyMatrix::PolyMatrix(RingPtr r, std::size_t rows, std::size_t cols)
    : ring_(std::move(r)), rows_(rows), cols_(cols) {
  e_.assign(rows * cols, Poly::zero(ring_));
}

PolyMatrix PolyMatrix::identity(RingPtr r, std::size_t n) {
  PolyMatrix m(r, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Poly::constant(r, 1);
  return m;
}

PolyMatrix PolyMatrix::from_rows(RingPtr r, const std::vector<std::vector<Poly>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows)
    if (row.size() != nc) throw StructuralError("ragged matrix rows");
  PolyMatrix m(r, rows.size(), nc);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < nc; ++j) {
      if (!rows[i][j].is_zero()) require_same_ring(rows[i][j].ring(), r);
      m.at(i, j) = rows[i][j].is_zero() ? Poly::zero(r) : rows[i][j];
    }
  return m;
}

PolyMatrix PolyMatrix::from_cols(RingPtr r, std::size_t rows, const std::vector<FreeVec>& cols) {
  PolyMatrix m(r, rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].rank() != rows) throw StructuralError("column rank mismatch");
    for (std::size_t i = 0; i < rows; ++i) m.at(i, j) = cols[j][i];
  }
  return m;
}

FreeVec PolyMatrix::col(std::size_t c) const {
  FreeVec v(ring_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, c);
  return v;
}

std::vector<FreeVec> PolyMatrix::columns() const {
  std::vector<FreeVec> out;
  out.reserve(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out.push_back(col(c));
  return out;
}

bool PolyMatrix::is_zero() const {
  for (const auto& f : e_)
    if (!f.is_zero()) return false;
  return true;
}

bool PolyMatrix::operator==(const PolyMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
}

std::string PolyMatrix::render() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << ", ";
    os << "[";
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ", ";
      os << to_string(at(i, j));
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

PolyMatrix mat_mul(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.rows()) throw StructuralError("matrix shape mismatch in product");
  PolyMatrix m(a.ring(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Poly acc = Poly::zero(a.ring());
      for (std::size_t k = 0; k < a.cols(); ++k)
        acc = poly_add(acc, poly_mul(a.at(i, k), b.at(k, j)));
      m.at(i, j) = std::move(acc);
    }
  return m;
}

PolyMatrix mat_add(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw StructuralError("matrix shape mismatch in sum");
  PolyMatrix m(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = poly_add(a.at(i, j), b.at(i, j));
  return m;
}

PolyMatrix mat_neg(const PolyMatrix& a) {
  PolyMatrix m(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = poly_neg(a.at(i, j));
  return m;
}

PolyMatrix mat_sub(const PolyMatrix& a, const PolyMatrix& b) { return mat_add(a, mat_neg(b)); }

PolyMatrix mat_scale(const PolyMatrix& a, const Poly& f) {
  PolyMatrix m(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = poly_mul(a.at(i, j), f);
  return m;
}

PolyMatrix mat_hcat(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows()) throw StructuralError("matrix shape mismatch in hcat");
  PolyMatrix m(a.ring(), a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) m.at(i, a.cols() + j) = b.at(i, j);
  }
  return m;
}

PolyMatrix mat_transpose(const PolyMatrix& a) {
  PolyMatrix m(a.ring(), a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m.at(j, i) = a.at(i, j);
  return m;
}

FreeVec mat_apply(const PolyMatrix& a, const FreeVec& v) {
  if (v.rank() != a.cols()) throw StructuralError("matrix shape mismatch in apply");
  FreeVec out(a.ring(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Poly acc = Poly::zero(a.ring());
    for (std::size_t j = 0; j < a.cols(); ++j) acc = poly_add(acc, poly_mul(a.at(i, j), v[j]));
    out[i] = std::move(acc);
  }
  return out;
}

FPModule::FPModule(RingPtr r, std::size_t gens_rank, std::vector<FreeVec> relations)
    : ring_(std::move(r)), rank_(gens_rank) {
  for (auto& c : relations) {
    if (c.rank() != rank_) throw StructuralError("relation rank mismatch");
    if (c.is_zero()) continue;
    require_same_ring(c.ring(), ring_);
    rel_.push_back(std::move(c));
  }
}

FPModule FPModule::free_module(RingPtr r, std::size_t n) { return FPModule(std::move(r), n, {}); }

FPModule FPModule::zero_module(RingPtr r) { return FPModule(std::move(r), 0, {}); }

FPModule FPModule::from_presentation(const PolyMatrix& pres) {
  return FPModule(pres.ring(), pres.rows(), pres.columns());
}

FPModule FPModule::cyclic(const Ideal& I) {
  std::vector<FreeVec> rel;
  for (const auto& g : I.gens()) rel.push_back(FreeVec::from_components({g}));
  return FPModule(I.ring(), 1, std::move(rel));
}

const std::vector<FreeVec>& FPModule::relation_basis() const {
  std::call_once(cache_->gb_once, [&] {
    cache_->gb = module_groebner(rel_, ModuleOrder::pot(rank_)).basis;
  });
  return cache_->gb;
}

PolyMatrix FPModule::presentation() const { return PolyMatrix::from_cols(ring_, rank_, rel_); }

std::string FPModule::render() const {
  if (rank_ == 0) return "0";
  if (rel_.empty()) return "free " + std::to_string(rank_);
  std::ostringstream os;
  os << "coker [";
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) os << ", ";
    os << "[";
    for (std::size_t j = 0; j < rel_.size(); ++j) {
      if (j) os << ", ";
      os << to_string(rel_[j][i]);
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

bool is_well_defined(const PolyMatrix& phi, const FPModule& M, const FPModule& N) {
  if (phi.rows() != N.rank() || phi.cols() != M.rank())
    throw StructuralError("candidate matrix has the wrong shape");
  if (M.rank() > 0 && N.rank() > 0) require_same_ring(M.ring(), N.ring());
  const auto& gb = N.relation_basis();
  ModuleOrder mo = ModuleOrder::pot(N.rank());
  for (const auto& c : M.relations()) {
    FreeVec img = mat_apply(phi, c);
    if (img.is_zero()) continue;
    if (gb.empty()) return false;
    if (!vec_normal_form(img, gb, mo).is_zero()) return false;
  }
  return true;
}

ModuleMap make_map(const FPModule& M, const FPModule& N, PolyMatrix phi) {
  ModuleMap f;
  f.source = M;
  f.target = N;
  f.welldef_cert = is_well_defined(phi, M, N);
  f.mat = std::move(phi);
  return f;
}

ModuleMap identity_map(const FPModule& M) {
  ModuleMap f;
  f.source = M;
  f.target = M;
  f.mat = PolyMatrix::identity(M.ring(), M.rank());
  f.welldef_cert = true;
  return f;
}

ModuleMap zero_map(const FPModule& M, const FPModule& N) {
  ModuleMap f;
  f.source = M;
  f.target = N;
  f.mat = PolyMatrix(N.ring() ? N.ring() : M.ring(), N.rank(), M.rank());
  f.welldef_cert = true;
  return f;
}

namespace {

void require_same_module(const FPModule& A, const FPModule& B, const char* where) {
  bool ok = A.rank() == B.rank() && A.relations().size() == B.relations().size();
  if (ok)
    for (std::size_t i = 0; i < A.relations().size() && ok; ++i)
      ok = A.relations()[i] == B.relations()[i];
  if (!ok) throw StructuralError(std::string("module mismatch in ") + where);
}

void require_cert(const ModuleMap& f, const char* where) {
  if (!f.welldef_cert)
    throw StructuralError(std::string("uncertified map passed to ") + where);
}

}  // namespace

ModuleMap compose(const ModuleMap& g, const ModuleMap& f) {
  require_same_module(f.target, g.source, "compose");
  ModuleMap h;
  h.source = f.source;
  h.target = g.target;
  h.mat = mat_mul(g.mat, f.mat);
  h.welldef_cert = f.welldef_cert && g.welldef_cert;
  return h;
}

ModuleMap map_add(const ModuleMap& a, const ModuleMap& b) {
  require_same_module(a.source, b.source, "map_add");
  require_same_module(a.target, b.target, "map_add");
  ModuleMap h;
  h.source = a.source;
  h.target = a.target;
  h.mat = mat_add(a.mat, b.mat);
  h.welldef_cert = a.welldef_cert && b.welldef_cert;
  return h;
}

ModuleMap map_sub(const ModuleMap& a, const ModuleMap& b) {
  require_same_module(a.source, b.source, "map_sub");
  require_same_module(a.target, b.target, "map_sub");
  ModuleMap h;
  h.source = a.source;
  h.target = a.target;
  h.mat = mat_sub(a.mat, b.mat);
  h.welldef_cert = a.welldef_cert && b.welldef_cert;
  return h;
}

bool maps_equal_on_gens(const ModuleMap& a, const ModuleMap& b) {
  require_same_module(a.source, b.source, "maps_equal_on_gens");
  require_same_module(a.target, b.target, "maps_equal_on_gens");
  PolyMatrix d = mat_sub(a.mat, b.mat);
  const auto& gb = a.target.relation_basis();
  ModuleOrder mo = ModuleOrder::pot(a.target.rank());
  for (std::size_t j = 0; j < d.cols(); ++j) {
    FreeVec c = d.col(j);
    if (c.is_zero()) continue;
    if (gb.empty()) return false;
    if (!vec_normal_form(c, gb, mo).is_zero()) return false;
  }
  return true;
}

namespace {

// Generators of { u in R^cols(phi) : phi * u lies in the span of rel }.
std::vector<FreeVec> preimage_of_submodule(const PolyMatrix& phi,
                                           const std::vector<FreeVec>& rel) {
  const std::size_t src_rank = phi.cols();
  std::vector<FreeVec> out;
  if (src_rank == 0) return out;
  if (phi.rows() == 0) {
    for (std::size_t i = 0; i < src_rank; ++i)
      out.push_back(FreeVec::unit(phi.ring(), src_rank, i));
    return out;
  }
  std::vector<FreeVec> combined = phi.columns();
  const std::size_t phi_cols = combined.size();
  for (const auto& c : rel) combined.push_back(c);
  auto syz = syzygies(combined);
  for (const auto& s : syz) {
    FreeVec u(phi.ring(), src_rank);
    bool nz = false;
    for (std::size_t i = 0; i < phi_cols; ++i) {
      u[i] = s[i];
      nz = nz || !s[i].is_zero();
    }
    if (nz) out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

SubmoduleResult submodule(const FPModule& M, const std::vector<FreeVec>& gens) {
  PolyMatrix incl = PolyMatrix::from_cols(M.ring(), M.rank(), gens);
  std::vector<FreeVec> rel = preimage_of_submodule(incl, M.relations());
  FPModule S(M.ring(), gens.size(), std::move(rel));
  SubmoduleResult res{S, make_map(S, M, incl)};
  return res;
}

SubmoduleResult kernel(const ModuleMap& phi) {
  require_cert(phi, "kernel");
  const FPModule& M = phi.source;
  // {u : phi(u) in rel N}, dropping generators already zero in M
  std::vector<FreeVec> pre = preimage_of_submodule(phi.mat, phi.target.relations());
  const auto& gbM = M.relation_basis();
  ModuleOrder mo = ModuleOrder::pot(M.rank());
  std::vector<FreeVec> gens;
  for (auto& u : pre) {
    if (gbM.empty() ? u.is_zero() : vec_normal_form(u, gbM, mo).is_zero()) continue;
    gens.push_back(std::move(u));
  }
  return submodule(M, gens);
}

FPModule cokernel(const ModuleMap& phi) {
  require_cert(phi, "cokernel");
  std::vector<FreeVec> rel = phi.target.relations();
  for (const auto& c : phi.mat.columns()) rel.push_back(c);
  return FPModule(phi.target.ring(), phi.target.rank(), std::move(rel));
}

ImageResult image(const ModuleMap& phi) {
  require_cert(phi, "image");
  std::vector<FreeVec> rel = preimage_of_submodule(phi.mat, phi.target.relations());
  FPModule img(phi.source.ring(), phi.source.rank(), rel);
  ImageResult res{img,
                  make_map(phi.source, img,
                           PolyMatrix::identity(phi.source.ring(), phi.source.rank())),
                  make_map(img, phi.target, phi.mat)};
  return res;
}

bool module_is_zero(const FPModule& M) {
  if (M.rank() == 0) return true;
  const auto& gb = M.relation_basis();
  if (gb.empty()) return false;
  ModuleOrder mo = ModuleOrder::pot(M.rank());
  for (std::size_t i = 0; i < M.rank(); ++i) {
    FreeVec e = FreeVec::unit(M.ring(), M.rank(), i);
    if (!vec_normal_form(e, gb, mo).is_zero()) return false;
  }
  return true;
}

Ideal annihilator(const FPModule& M) {
  std::call_once(M.cache_->ann_once, [&] {
    if (M.rank() == 0) {
      M.cache_->ann = Ideal::unit(M.ring());
      return;
    }
    std::optional<Ideal> acc;
    for (std::size_t i = 0; i < M.rank(); ++i) {
      // (rel : e_i) from first coordinates of syzygies of [e_i | rel]
      std::vector<FreeVec> combined;
      combined.push_back(FreeVec::unit(M.ring(), M.rank(), i));
      for (const auto& c : M.relations()) combined.push_back(c);
      auto syz = syzygies(combined);
      std::vector<Poly> gens;
      for (const auto& s : syz)
        if (!s[0].is_zero()) gens.push_back(s[0]);
      Ideal col(M.ring(), std::move(gens));
      acc = acc ? ideal_intersect(*acc, col) : col;
    }
    M.cache_->ann = *acc;
  });
  return *M.cache_->ann;
}

int module_dim(const FPModule& M) {
  annihilator(M);
  std::call_once(M.cache_->dim_once, [&] { M.cache_->dim = krull_dim(*M.cache_->ann); });
  return *M.cache_->dim;
}

namespace {

Poly minor_det(const PolyMatrix& A, const std::vector<std::size_t>& rows,
               const std::vector<std::size_t>& cols) {
  const RingPtr& r = A.ring();
  if (rows.empty()) return Poly::constant(r, 1);
  if (rows.size() == 1) return A.at(rows[0], cols[0]);
  Poly acc = Poly::zero(r);
  std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Poly& pivot = A.at(rows[0], cols[k]);
    if (pivot.is_zero()) continue;
    std::vector<std::size_t> sub_cols;
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (j != k) sub_cols.push_back(cols[j]);
    Poly term = poly_mul(pivot, minor_det(A, sub_rows, sub_cols));
    acc = (k % 2 == 0) ? poly_add(acc, term) : poly_sub(acc, term);
  }
  return acc;
}

void subsets_of_size(std::size_t n, std::size_t k,
                     const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == k) {
      f(idx);
      return;
    }
    for (std::size_t i = start; i + (k - depth) <= n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

Ideal fitting_ideal(const FPModule& M, std::size_t i) {
  const std::size_t n = M.rank();
  if (n <= i) return Ideal::unit(M.ring());
  const std::size_t k = n - i;  // minor size
  PolyMatrix A = M.presentation();
  if (k > A.cols()) return Ideal::zero(M.ring());
  std::vector<Poly> gens;
  subsets_of_size(n, k, [&](const std::vector<std::size_t>& rows) {
    subsets_of_size(A.cols(), k, [&](const std::vector<std::size_t>& cols) {
      Poly d = minor_det(A, rows, cols);
      if (!d.is_zero()) gens.push_back(std::move(d));
    });
  });
  return Ideal(M.ring(), std::move(gens));
}

bool is_iso(const ModuleMap& phi) {
  require_cert(phi, "is_iso");
  if (!module_is_zero(cokernel(phi))) return false;
  return module_is_zero(kernel(phi).module);
}

FPModule ext_module(const FPModule& M, std::size_t i) {
  const RingPtr& r = M.ring();
  if (i > r->nvars()) throw StructuralError("ext index beyond the ring dimension");
  // free resolution ... -> F_2 -> F_1 -> F_0 with d_1 the presentation
  std::vector<std::vector<FreeVec>> d;  // d[j] = columns of d_{j+1}
  std::vector<std::size_t> f;           // f[j] = rank of F_j
  f.push_back(M.rank());
  d.push_back(M.relations());
  for (std::size_t step = 1; step <= i; ++step) {
    f.push_back(d[step - 1].size());
    if (d[step - 1].empty())
      d.push_back({});
    else
      d.push_back(syzygies(d[step - 1]));
  }

  const std::size_t fi = f[i];
  if (fi == 0) return FPModule::zero_module(r);

  // kernel of the transposed next differential
  std::vector<FreeVec> K;
  if (d[i].empty()) {
    for (std::size_t j = 0; j < fi; ++j) K.push_back(FreeVec::unit(r, fi, j));
  } else {
    PolyMatrix D = PolyMatrix::from_cols(r, fi, d[i]);
    K = syzygies(mat_transpose(D).columns());
    if (K.empty()) return FPModule::zero_module(r);
  }

  // relations: coefficients whose K-combination lands in the dual image
  std::vector<FreeVec> combined = K;
  if (i > 0 && f[i - 1] > 0 && !d[i - 1].empty()) {
    PolyMatrix P = PolyMatrix::from_cols(r, f[i - 1], d[i - 1]);
    for (const auto& c : mat_transpose(P).columns()) combined.push_back(c);
  }
  auto syz = syzygies(combined);
  std::vector<FreeVec> rel;
  for (const auto& s : syz) {
    FreeVec c(r, K.size());
    bool nz = false;
    for (std::size_t j = 0; j < K.size(); ++j) {
      c[j] = s[j];
      nz = nz || !s[j].is_zero();
    }
    if (nz) rel.push_back(std::move(c));
  }
  return FPModule(r, K.size(), std::move(rel));
}

namespace {

std::vector<FreeVec> reduced_basis(const std::vector<FreeVec>& gens, std::size_t rank) {
  return module_groebner(gens, ModuleOrder::pot(rank)).basis;
}

// One colon step { u : g u in span(cur) for every generator g of J },
// through a single stacked syzygy computation.
std::vector<FreeVec> colon_step(const RingPtr& r, std::size_t rank,
                                const std::vector<FreeVec>& cur, const std::vector<Poly>& jgens) {
  const std::size_t s = jgens.size();
  std::vector<FreeVec> combined;
  for (std::size_t i = 0; i < rank; ++i) {
    FreeVec v(r, rank * s);
    for (std::size_t j = 0; j < s; ++j) v[j * rank + i] = jgens[j];
    combined.push_back(std::move(v));
  }
  for (std::size_t j = 0; j < s; ++j)
    for (const auto& w : cur) {
      FreeVec v(r, rank * s);
      for (std::size_t i = 0; i < rank; ++i) v[j * rank + i] = w[i];
      combined.push_back(std::move(v));
    }
  auto syz = syzygies(combined);
  std::vector<FreeVec> out;
  for (const auto& sy : syz) {
    FreeVec u(r, rank);
    bool nz = false;
    for (std::size_t i = 0; i < rank; ++i) {
      u[i] = sy[i];
      nz = nz || !u[i].is_zero();
    }
    if (nz) out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

SubmoduleResult torsion_wrt(const FPModule& M, const Ideal& J) {
  if (M.rank() == 0) return submodule(M, {});
  if (J.is_zero_ideal()) {
    // a power of the zero ideal kills everything
    std::vector<FreeVec> units;
    for (std::size_t i = 0; i < M.rank(); ++i)
      units.push_back(FreeVec::unit(M.ring(), M.rank(), i));
    return submodule(M, units);
  }
  std::vector<FreeVec> cur = reduced_basis(M.relations(), M.rank());
  for (int round = 0; round < 64; ++round) {
    std::vector<FreeVec> step = colon_step(M.ring(), M.rank(), cur, J.gens());
    std::vector<FreeVec> next = reduced_basis(step, M.rank());
    bool same = next.size() == cur.size();
    for (std::size_t i = 0; same && i < cur.size(); ++i) same = next[i] == cur[i];
    if (same) {
      const auto& gbM = M.relation_basis();
      ModuleOrder mo = ModuleOrder::pot(M.rank());
      std::vector<FreeVec> gens;
      for (const auto& u : cur)
        if (gbM.empty() ? !u.is_zero() : !vec_normal_form(u, gbM, mo).is_zero())
          gens.push_back(u);
      return submodule(M, gens);
    }
    cur = std::move(next);
  }
  throw ResourceExceeded("torsion saturation did not stabilize");
}

namespace {

Ideal torsion_candidate_ideal(const FPModule& M, int d) {
  const RingPtr& r = M.ring();
  const int n = int(r->nvars());
  Ideal J = Ideal::unit(r);
  for (int dp = 0; dp <= d; ++dp) {
    if (n - dp < 0) continue;
    FPModule E = ext_module(M, std::size_t(n - dp));
    J = ideal_product(J, annihilator(E));
  }
  return J;
}

}  // namespace

SubmoduleResult torsion_part(const FPModule& M, int d) {
  const int ring_dim = int(M.ring()->nvars());
  if (d < -1 || d > ring_dim) throw StructuralError("torsion level out of range");
  if (d < 0 || M.rank() == 0) return submodule(M, {});
  if (module_dim(M) <= d) {
    std::vector<FreeVec> units;
    for (std::size_t i = 0; i < M.rank(); ++i)
      units.push_back(FreeVec::unit(M.ring(), M.rank(), i));
    return submodule(M, units);
  }
  Ideal J = torsion_candidate_ideal(M, d);
  SubmoduleResult T = torsion_wrt(M, J);
  if (module_dim(T.module) > d)
    throw VerificationFailed("torsion candidate produced a part of too large dimension");
  FPModule Q = cokernel(T.inclusion);
  Ideal J2 = torsion_candidate_ideal(Q, d);
  SubmoduleResult T2 = torsion_wrt(Q, J2);
  if (!module_is_zero(T2.module))
    throw VerificationFailed("torsion candidate missed part of the small stratum");
  return T;
}

LocalizedModule localize(const FPModule& M, const Poly& f) {
  if (f.is_zero()) throw StructuralError("cannot invert zero");
  require_same_ring(f.ring(), M.ring());
  const RingPtr& base = M.ring();
  RingPtr ext = base->extended("t", base->order());
  std::size_t tvar = ext->nvars() - 1;
  RingMap incl = RingMap::inclusion(base, ext);
  Poly rel = poly_sub(poly_mul(Poly::variable(ext, tvar), incl.apply(f)), Poly::constant(ext, 1));
  std::vector<FreeVec> rels;
  for (std::size_t i = 0; i < M.rank(); ++i) {
    FreeVec v(ext, M.rank());
    v[i] = rel;
    rels.push_back(std::move(v));
  }
  for (const auto& c : M.relations()) {
    FreeVec v(ext, M.rank());
    for (std::size_t i = 0; i < M.rank(); ++i) v[i] = incl.apply(c[i]);
    rels.push_back(std::move(v));
  }
  LocalizedModule out;
  out.base = M;
  out.inverted = f;
  out.localized = FPModule(ext, M.rank(), std::move(rels));
  out.ext_ring = ext;
  out.inv_var = tvar;
  return out;
}

ModuleMap localize_map(const ModuleMap& phi, const Poly& f) {
  require_cert(phi, "localize_map");
  LocalizedModule src = localize(phi.source, f);
  LocalizedModule dst = localize(phi.target, f);
  RingMap incl = RingMap::inclusion(phi.source.ring(), src.ext_ring);
  PolyMatrix m(src.ext_ring, phi.mat.rows(), phi.mat.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = incl.apply(phi.mat.at(i, j));
  return make_map(src.localized, dst.localized, std::move(m));
}

ModuleMap HomModule::decode(const std::vector<Poly>& coeffs) const {
  if (coeffs.size() != gen_maps.size())
    throw StructuralError("hom element needs one coefficient per generator");
  PolyMatrix acc(M.ring() ? M.ring() : N.ring(), N.rank(), M.rank());
  for (std::size_t l = 0; l < coeffs.size(); ++l)
    if (!coeffs[l].is_zero()) acc = mat_add(acc, mat_scale(gen_maps[l].mat, coeffs[l]));
  return make_map(M, N, std::move(acc));
}

HomModule hom_module(const FPModule& M, const FPModule& N) {
  const RingPtr& r = M.ring() ? M.ring() : N.ring();
  HomModule out;
  out.M = M;
  out.N = N;
  const std::size_t nM = M.rank(), nN = N.rank();
  const std::size_t flat = nN * nM;
  if (flat == 0) {
    out.hom = FPModule::zero_module(r);
    return out;
  }
  // P = N^{nM}; copy j of N sits at the flat indices i*nM + j
  std::vector<FreeVec> relP;
  for (std::size_t j = 0; j < nM; ++j)
    for (const auto& w : N.relations()) {
      FreeVec v(r, flat);
      for (std::size_t i = 0; i < nN; ++i) v[i * nM + j] = w[i];
      relP.push_back(std::move(v));
    }
  FPModule P(r, flat, relP);

  const auto& relsM = M.relations();
  const std::size_t sM = relsM.size();

  if (sM == 0) {
    out.hom = P;
    for (std::size_t idx = 0; idx < flat; ++idx)
      out.flat_gens.push_back(FreeVec::unit(r, flat, idx));
  } else {
    // Q = N^{sM}; block b at flat indices b*nN + i
    std::vector<FreeVec> relQ;
    for (std::size_t b = 0; b < sM; ++b)
      for (const auto& w : N.relations()) {
        FreeVec v(r, sM * nN);
        for (std::size_t i = 0; i < nN; ++i) v[b * nN + i] = w[i];
        relQ.push_back(std::move(v));
      }
    FPModule Q(r, sM * nN, relQ);
    PolyMatrix B(r, sM * nN, flat);
    for (std::size_t b = 0; b < sM; ++b)
      for (std::size_t i = 0; i < nN; ++i)
        for (std::size_t j = 0; j < nM; ++j) B.at(b * nN + i, i * nM + j) = relsM[b][j];
    ModuleMap bm = make_map(P, Q, std::move(B));
    SubmoduleResult K = kernel(bm);
    out.hom = K.module;
    out.flat_gens = K.inclusion.mat.columns();
  }

  for (const auto& g : out.flat_gens) {
    PolyMatrix mat(r, nN, nM);
    for (std::size_t i = 0; i < nN; ++i)
      for (std::size_t j = 0; j < nM; ++j) mat.at(i, j) = g[i * nM + j];
    ModuleMap mm = make_map(M, N, std::move(mat));
    if (!mm.welldef_cert)
      throw VerificationFailed("hom generator failed the lifting certificate");
    out.gen_maps.push_back(std::move(mm));
  }
  return out;
}

FPModule direct_sum(const FPModule& A, const FPModule& B) {
  const RingPtr& r = A.ring() ? A.ring() : B.ring();
  std::vector<FreeVec> rel;
  const std::size_t n = A.rank() + B.rank();
  for (const auto& c : A.relations()) {
    FreeVec v(r, n);
    for (std::size_t i = 0; i < A.rank(); ++i) v[i] = c[i];
    rel.push_back(std::move(v));
  }
  for (const auto& c : B.relations()) {
    FreeVec v(r, n);
    for (std::size_t i = 0; i < B.rank(); ++i) v[A.rank() + i] = c[i];
    rel.push_back(std::move(v));
  }
  return FPModule(r, n, std::move(rel));
}

FPModule tensor_product(const FPModule& A, const FPModule& B) {
  require_same_ring(A.ring(), B.ring());
  const RingPtr& r = A.ring();
  const std::size_t nA = A.rank(), nB = B.rank();
  std::vector<FreeVec> rel;
  for (const auto& u : A.relations())
    for (std::size_t b = 0; b < nB; ++b) {
      FreeVec v(r, nA * nB);
      for (std::size_t a = 0; a < nA; ++a) v[a * nB + b] = u[a];
      rel.push_back(std::move(v));
    }
  for (const auto& w : B.relations())
    for (std::size_t a = 0; a < nA; ++a) {
      FreeVec v(r, nA * nB);
      for (std::size_t b = 0; b < nB; ++b) v[a * nB + b] = w[b];
      rel.push_back(std::move(v));
    }
  return FPModule(r, nA * nB, std::move(rel));
}

std::optional<long> vs_dimension(const FPModule& M) {
  if (M.rank() == 0) return 0;
  const auto& gb = M.relation_basis();
  const std::size_t nv = M.ring()->nvars();
  ModuleOrder mo = ModuleOrder::pot(M.rank());
  long total = 0;
  for (std::size_t p = 0; p < M.rank(); ++p) {
    std::vector<Monomial> leads;
    bool dead = false;
    for (const auto& g : gb) {
      auto l = vec_lead(g, mo);
      if (l->pos == p) {
        if (l->mono.is_one()) dead = true;  // the whole position is zero
        leads.push_back(l->mono);
      }
    }
    if (dead) continue;
    // finite iff every variable has a pure power among the leads
    std::vector<std::uint32_t> bound(nv, 0);
    for (std::size_t v = 0; v < nv; ++v) {
      std::uint32_t best = 0;
      for (const auto& m : leads) {
        bool pure = m.exp[v] > 0;
        for (std::size_t w = 0; w < nv && pure; ++w)
          if (w != v && m.exp[w]) pure = false;
        if (pure && (best == 0 || m.exp[v] < best)) best = m.exp[v];
      }
      if (best == 0) return std::nullopt;
      bound[v] = best;
    }
    std::vector<std::uint32_t> e(nv, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t v) {
      if (v == nv) {
        Monomial m = Monomial::one(nv);
        m.exp = e;
        for (auto x : e) m.deg += x;
        for (const auto& l : leads)
          if (mono_divides(l, m)) return;
        ++total;
        return;
      }
      for (e[v] = 0; e[v] < bound[v]; ++e[v]) rec(v + 1);
      e[v] = 0;
    };
    rec(0);
  }
  return total;
}

TrimResult trim(const FPModule& M) {
  const RingPtr& r = M.ring();
  std::size_t n = M.rank();
  std::vector<FreeVec> cols = M.relations();
  PolyMatrix to = PolyMatrix::identity(r, n);    // current x original
  PolyMatrix from = PolyMatrix::identity(r, n);  // original x current

  auto drop_junk_cols = [&] {
    std::vector<FreeVec> out;
    for (const auto& c : cols) {
      if (c.is_zero()) continue;
      bool dup = false;
      for (const auto& o : out)
        if (o == c) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(c);
    }
    cols = std::move(out);
  };
  drop_junk_cols();

  while (n > 0) {
    std::size_t pi = n, pj = cols.size();
    for (std::size_t j = 0; j < cols.size() && pj == cols.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const Poly& e = cols[j][i];
        if (!e.is_zero() && e.is_constant()) {
          pi = i;
          pj = j;
          break;
        }
      }
    if (pj == cols.size()) break;

    // normalize the pivot column, then clear its row with column ops
    std::uint32_t cinv = r->field().inv(cols[pj][pi].lc());
    cols[pj] = vec_term_mul(cols[pj], Monomial::one(r->nvars()), cinv);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j == pj || cols[j][pi].is_zero()) continue;
      cols[j] = vec_sub(cols[j], vec_scale(cols[pj], cols[j][pi]));
    }
    // clear the pivot column with row ops; other columns have a zero in
    // the pivot row already, so only the bookkeeping matrices change
    for (std::size_t i = 0; i < n; ++i) {
      if (i == pi || cols[pj][i].is_zero()) continue;
      Poly g = cols[pj][i];
      cols[pj][i] = Poly::zero(r);
      for (std::size_t c = 0; c < to.cols(); ++c)
        to.at(i, c) = poly_sub(to.at(i, c), poly_mul(g, to.at(pi, c)));
      for (std::size_t rr = 0; rr < from.rows(); ++rr)
        from.at(rr, pi) = poly_add(from.at(rr, pi), poly_mul(g, from.at(rr, i)));
    }

    // delete generator pi and relation column pj
    cols.erase(cols.begin() + std::ptrdiff_t(pj));
    std::vector<FreeVec> shrunk;
    for (auto& c : cols) {
      FreeVec v(r, n - 1);
      for (std::size_t i = 0, k = 0; i < n; ++i) {
        if (i == pi) continue;
        v[k++] = c[i];
      }
      shrunk.push_back(std::move(v));
    }
    cols = std::move(shrunk);
    PolyMatrix to2(r, n - 1, to.cols());
    for (std::size_t i = 0, k = 0; i < n; ++i) {
      if (i == pi) continue;
      for (std::size_t c = 0; c < to.cols(); ++c) to2.at(k, c) = to.at(i, c);
      ++k;
    }
    to = std::move(to2);
    PolyMatrix from2(r, from.rows(), n - 1);
    for (std::size_t rr = 0; rr < from.rows(); ++rr)
      for (std::size_t i = 0, k = 0; i < n; ++i) {
        if (i == pi) continue;
        from2.at(rr, k++) = from.at(rr, i);
      }
    from = std::move(from2);
    --n;
    drop_junk_cols();
  }

  FPModule T(r, n, cols);
  TrimResult res{T, make_map(M, T, to), make_map(T, M, from)};
  return res;
}

}  // namespace codimcat
