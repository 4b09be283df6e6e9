#include "codimcat/session.hpp"

#include <atomic>
#include <chrono>
#include <cctype>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <variant>

#include "json.hpp"

#include "codimcat/birgeom.hpp"

namespace codimcat {

using Json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- tokens

struct Tok {
  enum Kind { Ident, Int, Sym, End } kind = End;
  std::string text;
  long long value = 0;
  int line = 0, col = 0;
};

std::vector<std::vector<Tok>> tokenize(const std::string& text) {
  std::vector<std::vector<Tok>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    ++line_no;
    std::vector<Tok> toks;
    for (std::size_t i = 0; i < line.size();) {
      char c = line[i];
      if (c == '#') break;
      if (std::isspace(std::uint8_t(c))) {
        ++i;
        continue;
      }
      Tok t;
      t.line = line_no;
      t.col = int(i) + 1;
      if (std::isalpha(std::uint8_t(c)) || c == '_') {
        std::size_t j = i;
        while (j < line.size() && (std::isalnum(std::uint8_t(line[j])) || line[j] == '_')) ++j;
        t.kind = Tok::Ident;
        t.text = line.substr(i, j - i);
        i = j;
      } else if (std::isdigit(std::uint8_t(c))) {
        std::size_t j = i;
        while (j < line.size() && std::isdigit(std::uint8_t(line[j]))) ++j;
        t.kind = Tok::Int;
        t.text = line.substr(i, j - i);
        t.value = std::stoll(t.text);
        i = j;
      } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
        t.kind = Tok::Sym;
        t.text = "->";
        i += 2;
      } else if (std::string("=[](),:^*+-/").find(c) != std::string::npos) {
        t.kind = Tok::Sym;
        t.text = std::string(1, c);
        ++i;
      } else {
        throw ParseError("unexpected character '" + std::string(1, c) + "'", line_no, int(i) + 1);
      }
      toks.push_back(std::move(t));
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return lines;
}

class Cursor {
 public:
  explicit Cursor(const std::vector<Tok>& toks) : toks_(toks) {}
  const Tok& peek_at(std::size_t ahead) const {
    static Tok end;
    if (i_ + ahead >= toks_.size()) {
      end.kind = Tok::End;
      return end;
    }
    return toks_[i_ + ahead];
  }
  const Tok& peek() const {
    static Tok end;
    if (i_ >= toks_.size()) {
      end.kind = Tok::End;
      end.line = toks_.empty() ? 0 : toks_.back().line;
      end.col = toks_.empty() ? 0 : toks_.back().col + int(toks_.back().text.size());
      return end;
    }
    return toks_[i_];
  }
  Tok take() {
    Tok t = peek();
    if (i_ < toks_.size()) ++i_;
    return t;
  }
  bool at_end() const { return i_ >= toks_.size(); }
  bool is_sym(const std::string& s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool is_ident(const std::string& s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  Tok expect_sym(const std::string& s) {
    if (!is_sym(s)) fail("expected '" + s + "'");
    return take();
  }
  Tok expect_ident() {
    if (peek().kind != Tok::Ident) fail("expected an identifier");
    return take();
  }
  long long expect_int() {
    if (peek().kind != Tok::Int) fail("expected an integer");
    return take().value;
  }
  std::size_t mark() const { return i_; }
  void reset(std::size_t m) { i_ = m; }
  [[noreturn]] void fail(const std::string& what) const {
    const Tok& t = peek();
    std::string got = t.kind == Tok::End ? "end of line" : "'" + t.text + "'";
    throw ParseError(what + ", got " + got, t.line, t.col);
  }

 private:
  const std::vector<Tok>& toks_;
  std::size_t i_ = 0;
};

// ------------------------------------------------------------ poly parsing

bool poly_stop(const Cursor& c) {
  if (c.at_end() || c.is_sym(",") || c.is_sym("]") || c.is_sym(")") || c.is_sym("/")) return true;
  // a key=value boundary ends the polynomial; '=' never occurs inside one
  return c.peek().kind == Tok::Ident && c.peek_at(1).kind == Tok::Sym &&
         c.peek_at(1).text == "=";
}

Poly parse_poly(Cursor& c, const RingPtr& ring) {
  if (!ring) c.fail("no ring declared before this polynomial");
  Poly acc = Poly::zero(ring);
  bool first = true;
  while (true) {
    if (poly_stop(c)) {
      if (first) c.fail("expected a polynomial");
      break;
    }
    std::int64_t sign = 1;
    if (c.is_sym("+") || c.is_sym("-")) {
      sign = c.take().text == "-" ? -1 : 1;
    } else if (!first) {
      c.fail("expected '+' or '-' between terms");
    }
    // one term: factors joined by optional '*'
    std::uint32_t coeff = 1;
    Monomial mono = Monomial::one(ring->nvars());
    bool have_factor = false;
    while (true) {
      if (poly_stop(c)) break;
      if (c.peek().kind == Tok::Int) {
        Tok t = c.take();
        coeff = ring->field().mul(coeff, ring->field().reduce_int(t.value));
        have_factor = true;
      } else if (c.peek().kind == Tok::Ident) {
        Tok t = c.take();
        auto idx = ring->var_index(t.text);
        if (!idx) throw ParseError("unknown variable '" + t.text + "'", t.line, t.col);
        std::uint32_t e = 1;
        if (c.is_sym("^")) {
          Tok caret = c.take();
          if (c.is_sym("^")) c.fail("malformed exponent");
          if (c.peek().kind != Tok::Int)
            throw ParseError("expected an exponent after '^'", caret.line, caret.col + 1);
          long long v = c.take().value;
          if (v < 0 || v > 1000) c.fail("exponent out of range");
          e = std::uint32_t(v);
        }
        mono.exp[*idx] += e;
        mono.deg += e;
        have_factor = true;
      } else {
        break;
      }
      if (c.is_sym("*")) {
        c.take();
        if (poly_stop(c)) c.fail("dangling '*'");
      }
    }
    if (!have_factor) c.fail("expected a term");
    Poly term = Poly::term(ring, mono, sign * std::int64_t(coeff));
    acc = poly_add(acc, term);
    first = false;
  }
  return acc;
}

std::vector<Poly> parse_poly_list(Cursor& c, const RingPtr& ring) {
  c.expect_sym("[");
  std::vector<Poly> out;
  if (c.is_sym("]")) {
    c.take();
    return out;
  }
  while (true) {
    out.push_back(parse_poly(c, ring));
    if (c.is_sym(",")) {
      c.take();
      continue;
    }
    c.expect_sym("]");
    break;
  }
  return out;
}

std::vector<std::vector<Poly>> parse_matrix(Cursor& c, const RingPtr& ring) {
  c.expect_sym("[");
  std::vector<std::vector<Poly>> rows;
  if (c.is_sym("]")) {
    c.take();
    return rows;
  }
  while (true) {
    rows.push_back(parse_poly_list(c, ring));
    if (c.is_sym(",")) {
      c.take();
      continue;
    }
    c.expect_sym("]");
    break;
  }
  for (const auto& row : rows)
    if (row.size() != rows.front().size()) c.fail("ragged matrix rows");
  return rows;
}

struct FracLit {
  Poly num;
  Poly den;
};

std::vector<FracLit> parse_frac_list(Cursor& c, const RingPtr& ring) {
  c.expect_sym("[");
  std::vector<FracLit> out;
  if (c.is_sym("]")) {
    c.take();
    return out;
  }
  while (true) {
    FracLit f;
    f.num = parse_poly(c, ring);
    if (c.is_sym("/")) {
      c.take();
      f.den = parse_poly(c, ring);
    } else {
      f.den = Poly::constant(ring, 1);
    }
    out.push_back(std::move(f));
    if (c.is_sym(",")) {
      c.take();
      continue;
    }
    c.expect_sym("]");
    break;
  }
  return out;
}

std::vector<std::string> parse_name_list(Cursor& c) {
  c.expect_sym("[");
  std::vector<std::string> out;
  if (c.is_sym("]")) {
    c.take();
    return out;
  }
  while (true) {
    out.push_back(c.expect_ident().text);
    if (c.is_sym(",")) {
      c.take();
      continue;
    }
    c.expect_sym("]");
    break;
  }
  return out;
}

// ------------------------------------------------------------- statements

struct RingDecl {
  std::uint32_t p;
  std::vector<std::string> vars;
  MonomialOrder ord;
};
struct ChartDecl {
  std::vector<Poly> gens;
};
struct LevelDecl {
  int k;
};
struct IdealDecl {
  std::string name;
  std::vector<Poly> gens;
};
struct ModuleDecl {
  std::string name;
  std::optional<std::string> over;
  bool is_free = false;
  std::size_t free_rank = 0;
  std::vector<std::vector<Poly>> rows;
};
struct MapDecl {
  std::string name;
  std::string src, dst;
  std::vector<std::vector<Poly>> rows;
};
struct RoofDecl {
  std::string name;
  std::string sleg, tleg;
};
struct AlgebraDecl {
  std::string name;
  RingPtr ring;
  std::vector<Poly> gens;
};
struct WitnessDecl {
  std::string name;
  std::string a, b;
  bool extend = true;
  std::vector<FracLit> images;  // extension form
  std::vector<Poly> pgens, qgens;
  Poly s, t;  // explicit form
  std::vector<FracLit> fwd, bwd;
};
struct AutoEqDecl {
  std::string name;
  std::string witness;
  bool line_is_name = false;
  std::string line_name;
  std::vector<Poly> line_gens;
};
struct Command {
  std::string verb;
  std::vector<std::string> names;
  std::map<std::string, std::vector<Poly>> ideal_args;
  std::optional<int> n_arg;
  std::optional<int> k_arg;
  std::optional<std::string> bind;
  int line = 0;
};

using Stmt = std::variant<RingDecl, ChartDecl, LevelDecl, IdealDecl, ModuleDecl, MapDecl,
                          RoofDecl, AlgebraDecl, WitnessDecl, AutoEqDecl, Command>;

}  // namespace

struct Session::Impl {
  RingPtr ring;  // session ring, built at parse (after overrides)
  std::map<std::string, RingPtr> algebra_rings;
  std::vector<std::pair<int, Stmt>> stmts;  // with source lines
};

namespace {

// -------------------------------------------------------------- rendering

std::string render_list(const std::vector<Poly>& polys) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (i) os << ", ";
    os << to_string(polys[i]);
  }
  os << "]";
  return os.str();
}

std::string render_matrix(const std::vector<std::vector<Poly>>& rows) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) os << ", ";
    os << render_list(rows[i]);
  }
  os << "]";
  return os.str();
}

std::string render_fracs(const std::vector<FracLit>& fr) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < fr.size(); ++i) {
    if (i) os << ", ";
    os << to_string(fr[i].num);
    if (!fr[i].den.is_one()) os << "/" << to_string(fr[i].den);
  }
  os << "]";
  return os.str();
}

std::string render_command(const Command& c) {
  std::ostringstream os;
  os << c.verb;
  for (const auto& n : c.names) os << " " << n;
  for (const auto& [key, gens] : c.ideal_args) os << " " << key << "=" << render_list(gens);
  if (c.k_arg) os << " k=" << *c.k_arg;
  if (c.n_arg) os << " n=" << *c.n_arg;
  if (c.bind) os << " as " << *c.bind;
  return os.str();
}

std::string render_stmt(const Stmt& stmt) {
  std::ostringstream os;
  if (auto* r = std::get_if<RingDecl>(&stmt)) {
    os << "ring p=" << r->p << " vars=" << "[";
    for (std::size_t i = 0; i < r->vars.size(); ++i) os << (i ? ", " : "") << r->vars[i];
    os << "] order=" << order_name(r->ord);
  } else if (auto* c = std::get_if<ChartDecl>(&stmt)) {
    os << "chart = " << render_list(c->gens);
  } else if (auto* l = std::get_if<LevelDecl>(&stmt)) {
    os << "level k=" << l->k;
  } else if (auto* i = std::get_if<IdealDecl>(&stmt)) {
    os << "ideal " << i->name << " = " << render_list(i->gens);
  } else if (auto* m = std::get_if<ModuleDecl>(&stmt)) {
    os << "module " << m->name;
    if (m->over) os << " over " << *m->over;
    if (m->is_free)
      os << " = free " << m->free_rank;
    else
      os << " = coker " << render_matrix(m->rows);
  } else if (auto* f = std::get_if<MapDecl>(&stmt)) {
    os << "map " << f->name << " : " << f->src << " -> " << f->dst << " = "
       << render_matrix(f->rows);
  } else if (auto* rf = std::get_if<RoofDecl>(&stmt)) {
    os << "roof " << rf->name << " = (" << rf->sleg << ", " << rf->tleg << ")";
  } else if (auto* a = std::get_if<AlgebraDecl>(&stmt)) {
    os << "algebra " << a->name << " = vars=";
    os << "[";
    for (std::size_t i = 0; i < a->ring->nvars(); ++i)
      os << (i ? ", " : "") << a->ring->vars()[i];
    os << "] ideal=" << render_list(a->gens);
  } else if (auto* w = std::get_if<WitnessDecl>(&stmt)) {
    os << "witness " << w->name << " : " << w->a << " -> " << w->b << " = ";
    if (w->extend) {
      os << "images=" << render_fracs(w->images) << " P=" << render_list(w->pgens)
         << " Q=" << render_list(w->qgens);
    } else {
      os << "s=" << to_string(w->s) << " t=" << to_string(w->t) << " fwd=" << render_fracs(w->fwd)
         << " bwd=" << render_fracs(w->bwd);
    }
  } else if (auto* e = std::get_if<AutoEqDecl>(&stmt)) {
    os << "autoeq " << e->name << " = (" << e->witness << ", ";
    if (e->line_is_name)
      os << e->line_name;
    else
      os << render_list(e->line_gens);
    os << ")";
  } else if (auto* cmd = std::get_if<Command>(&stmt)) {
    os << render_command(*cmd);
  }
  return os.str();
}

// ----------------------------------------------------------------- parser

const std::vector<std::string> kVerbs = {"dim",     "ann",     "gb",      "small",
                                         "weq",     "zero",    "roofcomp", "roofeq",
                                         "minimal", "suppk",   "pic",      "homsec",
                                         "filtration", "verify", "transport", "autoeq"};

bool is_verb(const std::string& s) {
  for (const auto& v : kVerbs)
    if (v == s) return true;
  return false;
}

struct ParseEnv {
  RingPtr ring;
  bool saw_module = false;
  std::map<std::string, std::string> kinds;  // name -> kind
  std::map<std::string, RingPtr> algebra_rings;
  std::map<std::string, RingPtr> object_rings;  // modules/maps: the chart ring

  void declare(Cursor& c, const std::string& name, const std::string& kind) {
    if (kinds.count(name)) c.fail("name '" + name + "' is already declared");
    if (is_verb(name) || name == "ring" || name == "ideal" || name == "module" ||
        name == "map" || name == "roof" || name == "algebra" || name == "witness" ||
        name == "level" || name == "chart" || name == "free" || name == "coker" ||
        name == "over" || name == "as")
      c.fail("'" + name + "' is a reserved word");
    kinds[name] = kind;
  }
  void require(Cursor& c, const std::string& name, const std::string& kind) const {
    auto it = kinds.find(name);
    if (it == kinds.end()) c.fail("unresolved name '" + name + "'");
    if (!kind.empty() && it->second != kind)
      c.fail("'" + name + "' is a " + it->second + ", expected a " + kind);
  }
};

Stmt parse_statement(Cursor& c, ParseEnv& env, const RunConfig& cfg) {
  Tok head = c.expect_ident();
  const std::string& word = head.text;

  if (word == "ring") {
    if (env.ring) c.fail("the ring is already declared");
    RingDecl d;
    c.expect_ident();  // p
    c.expect_sym("=");
    long long p = c.expect_int();
    c.expect_ident();  // vars -- keyword order is fixed
    c.expect_sym("=");
    d.vars = parse_name_list(c);
    c.expect_ident();  // order
    c.expect_sym("=");
    Tok ord = c.expect_ident();
    auto parsed = order_from_name(ord.text);
    if (!parsed) throw ParseError("unknown order '" + ord.text + "'", ord.line, ord.col);
    d.ord = *parsed;
    d.p = cfg.prime_override ? *cfg.prime_override : std::uint32_t(p);
    if (cfg.order_override) d.ord = *cfg.order_override;
    env.ring = PolyRing::make(d.p, d.vars, d.ord, cfg.limits);
    d.p = env.ring->modulus();
    return d;
  }
  if (word == "chart") {
    if (env.saw_module) c.fail("the chart must be declared before any module");
    c.expect_sym("=");
    return ChartDecl{parse_poly_list(c, env.ring)};
  }
  if (word == "level") {
    c.expect_ident();  // k
    c.expect_sym("=");
    return LevelDecl{int(c.expect_int())};
  }
  if (word == "ideal") {
    IdealDecl d;
    d.name = c.expect_ident().text;
    c.expect_sym("=");
    d.gens = parse_poly_list(c, env.ring);
    env.declare(c, d.name, "ideal");
    return d;
  }
  if (word == "module") {
    ModuleDecl d;
    d.name = c.expect_ident().text;
    RingPtr ring = env.ring;
    if (c.is_ident("over")) {
      c.take();
      std::string alg = c.expect_ident().text;
      env.require(c, alg, "algebra");
      d.over = alg;
      ring = env.algebra_rings.at(alg);
    }
    c.expect_sym("=");
    if (c.is_ident("free")) {
      c.take();
      d.is_free = true;
      long long n = c.expect_int();
      if (n < 0 || n > 64) c.fail("free rank out of range");
      d.free_rank = std::size_t(n);
    } else if (c.is_ident("coker")) {
      c.take();
      d.rows = parse_matrix(c, ring);
      if (d.rows.empty()) c.fail("a presentation needs at least one row; use 'free 0'");
    } else {
      c.fail("expected 'free' or 'coker'");
    }
    env.saw_module = true;
    env.declare(c, d.name, "module");
    env.object_rings[d.name] = ring;
    return d;
  }
  if (word == "map") {
    MapDecl d;
    d.name = c.expect_ident().text;
    c.expect_sym(":");
    d.src = c.expect_ident().text;
    env.require(c, d.src, "module");
    c.expect_sym("->");
    d.dst = c.expect_ident().text;
    env.require(c, d.dst, "module");
    c.expect_sym("=");
    d.rows = parse_matrix(c, env.object_rings.at(d.src));
    env.declare(c, d.name, "map");
    env.object_rings[d.name] = env.object_rings.at(d.src);
    return d;
  }
  if (word == "roof") {
    RoofDecl d;
    d.name = c.expect_ident().text;
    c.expect_sym("=");
    c.expect_sym("(");
    d.sleg = c.expect_ident().text;
    env.require(c, d.sleg, "map");
    c.expect_sym(",");
    d.tleg = c.expect_ident().text;
    env.require(c, d.tleg, "map");
    c.expect_sym(")");
    env.declare(c, d.name, "roof");
    return d;
  }
  if (word == "algebra") {
    AlgebraDecl d;
    d.name = c.expect_ident().text;
    c.expect_sym("=");
    c.expect_ident();  // vars
    c.expect_sym("=");
    std::vector<std::string> vars = parse_name_list(c);
    if (!env.ring) c.fail("declare the session ring before algebras");
    d.ring = PolyRing::make(env.ring->modulus(), vars, env.ring->order(), cfg.limits);
    c.expect_ident();  // ideal
    c.expect_sym("=");
    d.gens = parse_poly_list(c, d.ring);
    env.declare(c, d.name, "algebra");
    env.algebra_rings[d.name] = d.ring;
    return d;
  }
  if (word == "witness") {
    WitnessDecl d;
    d.name = c.expect_ident().text;
    c.expect_sym(":");
    d.a = c.expect_ident().text;
    env.require(c, d.a, "algebra");
    c.expect_sym("->");
    d.b = c.expect_ident().text;
    env.require(c, d.b, "algebra");
    c.expect_sym("=");
    RingPtr ra = env.algebra_rings.at(d.a), rb = env.algebra_rings.at(d.b);
    Tok key = c.expect_ident();
    if (key.text == "images") {
      d.extend = true;
      c.expect_sym("=");
      d.images = parse_frac_list(c, ra);
      c.expect_ident();  // P
      c.expect_sym("=");
      d.pgens = parse_poly_list(c, ra);
      c.expect_ident();  // Q
      c.expect_sym("=");
      d.qgens = parse_poly_list(c, rb);
    } else if (key.text == "s") {
      d.extend = false;
      c.expect_sym("=");
      d.s = parse_poly(c, ra);
      c.expect_ident();  // t
      c.expect_sym("=");
      d.t = parse_poly(c, rb);
      c.expect_ident();  // fwd
      c.expect_sym("=");
      d.fwd = parse_frac_list(c, ra);
      c.expect_ident();  // bwd
      c.expect_sym("=");
      d.bwd = parse_frac_list(c, rb);
    } else {
      throw ParseError("expected 'images=' or 's='", key.line, key.col);
    }
    env.declare(c, d.name, "witness");
    return d;
  }
  if (word == "autoeq" && c.peek().kind == Tok::Ident) {
    // declaration form: autoeq E = (W, L)
    std::size_t save = c.mark();
    Tok name = c.take();
    if (c.is_sym("=")) {
      AutoEqDecl d;
      d.name = name.text;
      c.expect_sym("=");
      c.expect_sym("(");
      d.witness = c.expect_ident().text;
      env.require(c, d.witness, "witness");
      c.expect_sym(",");
      if (c.peek().kind == Tok::Ident) {
        d.line_is_name = true;
        d.line_name = c.expect_ident().text;
        env.require(c, d.line_name, "ideal");
      } else {
        d.line_gens = parse_poly_list(c, env.ring);
      }
      c.expect_sym(")");
      env.declare(c, d.name, "autoeq");
      return d;
    }
    c.reset(save);  // fall through to the command form
  }

  if (!is_verb(word)) throw ParseError("unknown statement '" + word + "'", head.line, head.col);

  Command cmd;
  cmd.verb = word;
  cmd.line = head.line;
  while (!c.at_end()) {
    if (c.is_ident("as")) {
      c.take();
      std::string bound = c.expect_ident().text;
      env.declare(c, bound, cmd.verb == "roofcomp" ? "roof" : "module");
      cmd.bind = bound;
      continue;
    }
    if (c.peek().kind == Tok::Ident) {
      Tok t = c.take();
      if (c.is_sym("=")) {
        c.take();
        if (t.text == "k") {
          cmd.k_arg = int(c.expect_int());
        } else if (t.text == "n") {
          cmd.n_arg = int(c.expect_int());
        } else {
          cmd.ideal_args[t.text] = parse_poly_list(c, env.ring);
        }
      } else {
        env.require(c, t.text, "");
        cmd.names.push_back(t.text);
      }
      continue;
    }
    c.fail("unexpected token in command");
  }
  return cmd;
}

}  // namespace

Session parse_session(const std::string& text, const RunConfig& cfg) {
  auto lines = tokenize(text);
  auto impl = std::make_shared<Session::Impl>();
  ParseEnv env;
  for (const auto& line : lines) {
    Cursor c(line);
    Stmt s = parse_statement(c, env, cfg);
    if (!c.at_end()) c.fail("trailing tokens");
    impl->stmts.emplace_back(line.front().line, std::move(s));
  }
  impl->ring = env.ring;
  impl->algebra_rings = env.algebra_rings;
  Session s;
  s.impl = impl;
  return s;
}

std::string print_session(const Session& s) {
  std::ostringstream os;
  for (const auto& [line, stmt] : s.impl->stmts) os << render_stmt(stmt) << "\n";
  return os.str();
}

// ------------------------------------------------------------------ runner

namespace {

struct ModVal {
  FPModule mod;
  AffineAlgebra chart;
};
struct MapVal {
  ModuleMap map;
  AffineAlgebra chart;
};
struct RoofVal {
  Roof roof;
};
using Val = std::variant<Ideal, ModVal, MapVal, RoofVal, IsoWitness, AutoEq, AffineAlgebra>;

struct RunState {
  RingPtr ring;
  std::optional<AffineAlgebra> chart;
  std::optional<int> k;
  std::map<std::string, Val> env;
  const RunConfig* cfg = nullptr;

  AffineAlgebra session_chart() {
    if (!chart) {
      if (!ring) throw StructuralError("no ring declared");
      chart = make_affine_algebra(ring, Ideal::zero(ring));
    }
    return *chart;
  }
  int level_k(int line) const {
    if (!k) throw StructuralError("no level declared before line " + std::to_string(line));
    return *k;
  }
  const Val& lookup(const std::string& name) const {
    auto it = env.find(name);
    if (it == env.end()) throw NameError("unresolved name '" + name + "'");
    return it->second;
  }
};

std::string anchor_for(const std::string& verb) {
  if (verb == "dim") return "krull-dimension";
  if (verb == "ann") return "annihilator-support";
  if (verb == "gb") return "plumbing";
  if (verb == "small") return "serre-subcategory-membership";
  if (verb == "weq") return "weak-equivalence";
  if (verb == "zero") return "quotient-zero-test";
  if (verb == "roofcomp") return "roof-composition";
  if (verb == "roofeq") return "roof-equality";
  if (verb == "minimal") return "minimal-objects-classification";
  if (verb == "suppk") return "topological-k-support";
  if (verb == "pic") return "restricted-picard-membership";
  if (verb == "homsec") return "quotient-sections-colimit";
  if (verb == "filtration") return "power-filtration";
  if (verb == "witness") return "local-iso-extension";
  if (verb == "verify") return "codim-isomorphism-witness";
  if (verb == "transport") return "module-transport";
  if (verb == "autoeq") return "autoequivalence-action";
  return "plumbing";
}

std::string render_ideal_canonical(const Ideal& I) {
  std::ostringstream os;
  os << "[";
  const auto& gb = I.groebner();
  for (std::size_t i = 0; i < gb.size(); ++i) {
    if (i) os << ", ";
    os << to_string(gb[i]);
  }
  os << "]";
  return os.str();
}

Ideal command_ideal(const Command& cmd, const std::string& key, const RingPtr& ring) {
  auto it = cmd.ideal_args.find(key);
  if (it == cmd.ideal_args.end())
    throw StructuralError("command '" + cmd.verb + "' needs " + key + "=[...]");
  std::vector<Poly> gens;
  for (const auto& g : it->second) gens.push_back(g);
  return Ideal(ring, std::move(gens));
}

const ModVal& as_module(RunState& st, const std::string& name) {
  const Val& v = st.lookup(name);
  if (auto* m = std::get_if<ModVal>(&v)) return *m;
  throw StructuralError("'" + name + "' is not a module");
}

// one queued result entry, filled by execute
struct Entry {
  bool is_result = false;
  Json value;
};

Entry run_command(RunState& st, const Command& cmd) {
  Json out;
  out["cmd"] = render_command(cmd);
  auto level_for = [&](const AffineAlgebra& chart) {
    return make_level(chart, st.level_k(cmd.line));
  };

  if (cmd.verb == "dim") {
    const Val& v = st.lookup(cmd.names.at(0));
    if (auto* I = std::get_if<Ideal>(&v))
      out["verdict"] = krull_dim(*I);
    else if (auto* m = std::get_if<ModVal>(&v))
      out["verdict"] = module_dim(m->mod);
    else
      throw StructuralError("dim expects an ideal or a module");
  } else if (cmd.verb == "ann") {
    out["object"] = render_ideal_canonical(annihilator(as_module(st, cmd.names.at(0)).mod));
  } else if (cmd.verb == "gb") {
    const Val& v = st.lookup(cmd.names.at(0));
    auto* I = std::get_if<Ideal>(&v);
    if (!I) throw StructuralError("gb expects an ideal");
    out["object"] = render_ideal_canonical(*I);
  } else if (cmd.verb == "small") {
    const ModVal& m = as_module(st, cmd.names.at(0));
    out["verdict"] = is_small(m.mod, level_for(m.chart));
  } else if (cmd.verb == "weq" || cmd.verb == "zero") {
    const Val& v = st.lookup(cmd.names.at(0));
    auto* f = std::get_if<MapVal>(&v);
    if (!f) throw StructuralError(cmd.verb + " expects a map");
    out["verdict"] = cmd.verb == "weq" ? is_weak_equivalence(f->map, level_for(f->chart))
                                       : is_zero_in_quotient(f->map, level_for(f->chart));
  } else if (cmd.verb == "roofcomp") {
    auto* r2 = std::get_if<RoofVal>(&st.lookup(cmd.names.at(0)));
    auto* r1 = std::get_if<RoofVal>(&st.lookup(cmd.names.at(1)));
    if (!r1 || !r2) throw StructuralError("roofcomp expects two roofs");
    Roof comp = roof_compose(r2->roof, r1->roof);
    Json o;
    o["apex_rank"] = comp.apex.rank();
    o["is_iso"] = roof_is_iso(comp);
    o["is_zero"] = roof_is_zero(comp);
    out["object"] = o;
    if (cmd.bind) st.env.emplace(*cmd.bind, RoofVal{comp});
  } else if (cmd.verb == "roofeq") {
    auto* r1 = std::get_if<RoofVal>(&st.lookup(cmd.names.at(0)));
    auto* r2 = std::get_if<RoofVal>(&st.lookup(cmd.names.at(1)));
    if (!r1 || !r2) throw StructuralError("roofeq expects two roofs");
    out["verdict"] = roof_equal(r1->roof, r2->roof);
  } else if (cmd.verb == "minimal") {
    const ModVal& m = as_module(st, cmd.names.at(0));
    Ideal P = ideal_sum(command_ideal(cmd, "P", m.chart.ring), m.chart.defining);
    PrimeWitness pw = prime_witness(P, st.cfg->seed);
    out["verdict"] = is_minimal(m.mod, level_for(m.chart), pw);
  } else if (cmd.verb == "suppk") {
    const ModVal& m = as_module(st, cmd.names.at(0));
    SuppProfile prof = supp_k(m.mod, level_for(m.chart));
    Json arr = Json::array();
    for (const auto& s : prof) {
      Json item;
      item["dim"] = s.dim;
      item["component"] = render_ideal_canonical(s.component);
      arr.push_back(item);
    }
    out["object"] = arr;
  } else if (cmd.verb == "pic") {
    const ModVal& m = as_module(st, cmd.names.at(0));
    out["verdict"] = pic_member(m.mod, level_for(m.chart), st.cfg->seed);
  } else if (cmd.verb == "homsec") {
    const ModVal& F = as_module(st, cmd.names.at(0));
    const ModVal& G = as_module(st, cmd.names.at(1));
    Ideal J = command_ideal(cmd, "J", F.chart.ring);
    int n = cmd.n_arg ? *cmd.n_arg : 4;
    HomSections h = hom_quotient_sections(F.mod, G.mod, level_for(F.chart), J, n);
    Json o;
    o["stabilized"] = h.stabilized;
    o["n_stop"] = h.n_stop;
    o["sections"] = trim(h.sections).module.render();
    out["object"] = o;
  } else if (cmd.verb == "filtration") {
    const ModVal& m = as_module(st, cmd.names.at(0));
    Ideal I = command_ideal(cmd, "I", m.chart.ring);
    auto layers = ideal_power_filtration(m.mod, I);
    Json arr = Json::array();
    for (const auto& L : layers) arr.push_back(trim(L).module.render());
    out["object"] = arr;
  } else if (cmd.verb == "verify") {
    auto* w = std::get_if<IsoWitness>(&st.lookup(cmd.names.at(0)));
    if (!w) throw StructuralError("verify expects a witness");
    if (!cmd.k_arg) throw StructuralError("verify needs k=<int>");
    WitnessVerdict v = verify_iso_witness(*w, *cmd.k_arg);
    Json o;
    o["verify"] = v.ok;
    o["k"] = *cmd.k_arg;
    if (!v.ok) o["reason"] = v.reason;
    out["object"] = o;
  } else if (cmd.verb == "transport") {
    auto* w = std::get_if<IsoWitness>(&st.lookup(cmd.names.at(0)));
    if (!w) throw StructuralError("transport expects a witness");
    const ModVal& m = as_module(st, cmd.names.at(1));
    FPModule moved = transport_module(*w, m.mod);
    FPModule shown = trim(moved).module;
    out["object"] = shown.render();
    if (cmd.bind) st.env.emplace(*cmd.bind, ModVal{moved, transport_chart(*w)});
  } else if (cmd.verb == "autoeq") {
    auto* e = std::get_if<AutoEq>(&st.lookup(cmd.names.at(0)));
    if (!e) throw StructuralError("autoeq application expects a declared autoequivalence");
    const ModVal& m = as_module(st, cmd.names.at(1));
    FPModule moved = autoeq_apply(*e, m.mod);
    out["object"] = trim(moved).module.render();
    if (cmd.bind) st.env.emplace(*cmd.bind, ModVal{moved, transport_chart(e->witness)});
  } else {
    throw StructuralError("unhandled command '" + cmd.verb + "'");
  }
  out["anchor"] = anchor_for(cmd.verb);
  Entry e;
  e.is_result = true;
  e.value = std::move(out);
  return e;
}

Entry run_stmt(RunState& st, const Stmt& stmt, int line) {
  Entry none;
  if (auto* r = std::get_if<RingDecl>(&stmt)) {
    st.ring = PolyRing::make(r->p, r->vars, r->ord, st.cfg->limits);
    // materialize the default chart now; commands may run concurrently
    st.chart = make_affine_algebra(st.ring, Ideal::zero(st.ring));
    return none;
  }
  if (auto* cd = std::get_if<ChartDecl>(&stmt)) {
    if (!st.ring) throw StructuralError("chart before ring");
    st.chart = make_affine_algebra(st.ring, Ideal(st.ring, cd->gens));
    return none;
  }
  if (auto* l = std::get_if<LevelDecl>(&stmt)) {
    st.k = l->k;
    return none;
  }
  if (auto* d = std::get_if<IdealDecl>(&stmt)) {
    st.env.emplace(d->name, Ideal(st.ring, d->gens));
    return none;
  }
  if (auto* d = std::get_if<ModuleDecl>(&stmt)) {
    AffineAlgebra chart = st.session_chart();
    if (d->over) {
      auto* alg = std::get_if<AffineAlgebra>(&st.lookup(*d->over));
      if (!alg) throw StructuralError("'" + *d->over + "' is not an algebra");
      chart = *alg;
    }
    FPModule M;
    if (d->is_free) {
      M = chart_module(chart, d->free_rank, {});
    } else {
      std::size_t n = d->rows.size();
      std::size_t m = d->rows.front().size();
      std::vector<FreeVec> cols;
      for (std::size_t j = 0; j < m; ++j) {
        FreeVec v(chart.ring, n);
        for (std::size_t i = 0; i < n; ++i) v[i] = d->rows[i][j];
        cols.push_back(std::move(v));
      }
      M = chart_module(chart, n, cols);
    }
    st.env.emplace(d->name, ModVal{M, chart});
    return none;
  }
  if (auto* d = std::get_if<MapDecl>(&stmt)) {
    const ModVal& src = as_module(st, d->src);
    const ModVal& dst = as_module(st, d->dst);
    PolyMatrix mat = PolyMatrix::from_rows(src.chart.ring, d->rows);
    ModuleMap f = make_map(src.mod, dst.mod, std::move(mat));
    if (!f.welldef_cert)
      throw StructuralError("map '" + d->name + "' is not well defined");
    st.env.emplace(d->name, MapVal{f, src.chart});
    return none;
  }
  if (auto* d = std::get_if<RoofDecl>(&stmt)) {
    auto* sleg = std::get_if<MapVal>(&st.lookup(d->sleg));
    auto* tleg = std::get_if<MapVal>(&st.lookup(d->tleg));
    if (!sleg || !tleg) throw StructuralError("roof legs must be maps");
    QuotientLevel lvl = make_level(sleg->chart, st.level_k(line));
    st.env.emplace(d->name, RoofVal{roof_make(lvl, sleg->map, tleg->map)});
    return none;
  }
  if (auto* d = std::get_if<AlgebraDecl>(&stmt)) {
    st.env.emplace(d->name, make_affine_algebra(d->ring, Ideal(d->ring, d->gens)));
    return none;
  }
  if (auto* d = std::get_if<WitnessDecl>(&stmt)) {
    auto* A = std::get_if<AffineAlgebra>(&st.lookup(d->a));
    auto* B = std::get_if<AffineAlgebra>(&st.lookup(d->b));
    if (!A || !B) throw StructuralError("witness endpoints must be algebras");
    IsoWitness w;
    if (d->extend) {
      PrimeWitness P = prime_witness(ideal_sum(Ideal(A->ring, d->pgens), A->defining),
                                     st.cfg->seed);
      PrimeWitness Q = prime_witness(ideal_sum(Ideal(B->ring, d->qgens), B->defining),
                                     st.cfg->seed);
      std::vector<Fraction> images;
      for (const auto& fr : d->images) images.push_back({fr.num, fr.den});
      w = extend_local_iso(*A, *B, images, P, Q, st.cfg->seed);
    } else {
      std::vector<Fraction> fwd, bwd;
      for (const auto& fr : d->fwd) fwd.push_back({fr.num, fr.den});
      for (const auto& fr : d->bwd) bwd.push_back({fr.num, fr.den});
      w = make_witness(*A, *B, d->s, d->t, fwd, bwd);
    }
    Json o;
    o["certified"] = w.certified;
    if (!w.certified) o["reason"] = w.reason;
    o["s"] = to_string(w.locA.inverted);
    o["t"] = to_string(w.locB.inverted);
    Json back = Json::array();
    for (const auto& b : w.backward) back.push_back(to_string(b));
    o["backward"] = back;
    o["bad_dims"] = Json::array({w.bad_dim_A, w.bad_dim_B});
    st.env.emplace(d->name, std::move(w));
    Json entry;
    entry["cmd"] = render_stmt(stmt);
    entry["object"] = o;
    entry["anchor"] = anchor_for("witness");
    Entry e;
    e.is_result = true;
    e.value = std::move(entry);
    return e;
  }
  if (auto* d = std::get_if<AutoEqDecl>(&stmt)) {
    auto* w = std::get_if<IsoWitness>(&st.lookup(d->witness));
    if (!w) throw StructuralError("autoeq needs a witness");
    std::vector<Poly> gens;
    if (d->line_is_name) {
      auto* I = std::get_if<Ideal>(&st.lookup(d->line_name));
      if (!I) throw StructuralError("autoeq line class must be an ideal");
      gens = I->gens();
    } else {
      gens = d->line_gens;
    }
    st.env.emplace(d->name, autoeq_make(*w, gens, st.level_k(line), st.cfg->seed));
    return none;
  }
  if (auto* cmd = std::get_if<Command>(&stmt)) return run_command(st, *cmd);
  return none;
}

}  // namespace

std::string run_session(const Session& s, const RunConfig& cfg) {
  Json report;
  report["ring"] = nullptr;
  report["results"] = Json::array();
  report["errors"] = Json::array();

  RunState st;
  st.cfg = &cfg;

  auto record_error = [&](int line, const std::string& code, const std::string& what,
                          const std::string& cmdtext) {
    Json e;
    e["line"] = line;
    if (!cmdtext.empty()) e["cmd"] = cmdtext;
    e["code"] = code;
    e["what"] = what;
    report["errors"].push_back(std::move(e));
  };

  // commands without bindings may run concurrently; declarations and
  // binding commands are barriers
  std::size_t i = 0;
  const auto& stmts = s.impl->stmts;
  while (i < stmts.size()) {
    const auto& [line, stmt] = stmts[i];
    const Command* cmd = std::get_if<Command>(&stmt);
    bool parallelizable = cmd && !cmd->bind && cfg.jobs > 1;
    if (!parallelizable) {
      auto started = std::chrono::steady_clock::now();
      try {
        Entry e = run_stmt(st, stmt, line);
        if (e.is_result) {
          if (cfg.timing) {
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
            e.value["ms"] = ms;
          }
          report["results"].push_back(std::move(e.value));
        }
      } catch (const ParseError& pe) {
        record_error(pe.line(), pe.code(), pe.what(), render_stmt(stmt));
      } catch (const Error& err) {
        record_error(line, err.code(), err.what(), render_stmt(stmt));
      } catch (const std::exception& ex) {
        record_error(line, "internal", ex.what(), render_stmt(stmt));
      }
      ++i;
      continue;
    }
    // batch of independent commands
    std::size_t j = i;
    while (j < stmts.size()) {
      const Command* cj = std::get_if<Command>(&stmts[j].second);
      if (!cj || cj->bind) break;
      ++j;
    }
    struct Slot {
      Entry entry;
      std::optional<std::string> error_code, error_what;
      int line = 0;
      std::string text;
      long ms = 0;
    };
    std::vector<Slot> slots(j - i);
    std::atomic<std::size_t> next(0);
    auto worker = [&] {
      while (true) {
        std::size_t idx = next.fetch_add(1);
        if (idx >= slots.size()) return;
        const auto& [cline, cstmt] = stmts[i + idx];
        Slot& slot = slots[idx];
        slot.line = cline;
        slot.text = render_stmt(cstmt);
        auto started = std::chrono::steady_clock::now();
        try {
          slot.entry = run_stmt(st, cstmt, cline);
        } catch (const Error& err) {
          slot.error_code = err.code();
          slot.error_what = err.what();
        } catch (const std::exception& ex) {
          slot.error_code = "internal";
          slot.error_what = ex.what();
        }
        slot.ms = long(std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count());
      }
    };
    std::vector<std::future<void>> pool;
    int nthreads = std::min<int>(cfg.jobs, int(slots.size()));
    for (int t = 0; t < nthreads; ++t) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
    for (auto& slot : slots) {
      if (slot.error_code) {
        record_error(slot.line, *slot.error_code, *slot.error_what, slot.text);
      } else if (slot.entry.is_result) {
        if (cfg.timing) slot.entry.value["ms"] = slot.ms;
        report["results"].push_back(std::move(slot.entry.value));
      }
    }
    i = j;
  }

  if (st.ring) {
    Json rj;
    rj["p"] = st.ring->modulus();
    rj["vars"] = st.ring->vars();
    rj["order"] = order_name(st.ring->order());
    report["ring"] = std::move(rj);
  }
  return report.dump(2);
}

std::string run_session_text(const std::string& text, const RunConfig& cfg) {
  try {
    Session s = parse_session(text, cfg);
    return run_session(s, cfg);
  } catch (const ParseError& pe) {
    Json report;
    report["ring"] = nullptr;
    report["results"] = Json::array();
    Json e;
    e["line"] = pe.line();
    e["col"] = pe.col();
    e["code"] = pe.code();
    e["what"] = pe.what();
    report["errors"] = Json::array({e});
    return report.dump(2);
  }
}

Poly parse_poly_text(const RingPtr& ring, const std::string& text) {
  auto lines = tokenize(text);
  if (lines.size() != 1) throw ParseError("expected one polynomial", 1, 1);
  Cursor c(lines.front());
  Poly f = parse_poly(c, ring);
  if (!c.at_end()) c.fail("trailing tokens after the polynomial");
  return f;
}

std::string check_report(const RunConfig& cfg) {
  Json out;
  out["sessions"] = Json::array();
  for (const auto& entry : builtin_corpus()) {
    Json item;
    item["name"] = entry.name;
    item["report"] = Json::parse(run_session_text(entry.text, cfg));
    out["sessions"].push_back(std::move(item));
  }
  return out.dump(2);
}

bool report_clean(const std::string& report_json) {
  auto j = Json::parse(report_json);
  return j.contains("errors") && j["errors"].is_array() && j["errors"].empty();
}

}  // namespace codimcat
