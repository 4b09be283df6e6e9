#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "codimcat/birgeom.hpp"
#include "codimcat/sampling.hpp"
#include "codimcat/session.hpp"

using namespace codimcat;

namespace {

std::uint64_t env_seed() {
  if (const char* s = std::getenv("CODIMCAT_SEED")) return std::strtoull(s, nullptr, 10);
  return 0xC0D1CA7ull;
}

int run_file(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open '" << path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::string report = run_session_text(buf.str(), cfg);
  std::cout << report << "\n";
  return report_clean(report) ? 0 : 1;
}

int run_check(const RunConfig& cfg) {
  std::cout << check_report(cfg) << "\n";
  return 0;
}

struct SelfTest {
  int failures = 0;
  void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS " : "FAIL ") << name;
    if (!ok && !detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

void selftest_poly_algebra(SelfTest& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto r = PolyRing::make(101, {"x", "y", "z"});
  bool ok = true;
  for (int it = 0; it < 300 && ok; ++it) {
    Poly f = sampling::random_poly(rng, r, 4, 3);
    Poly g = sampling::random_poly(rng, r, 4, 3);
    Poly h = sampling::random_poly(rng, r, 4, 3);
    ok = poly_add(poly_add(f, g), h) == poly_add(f, poly_add(g, h)) &&
         poly_mul(f, poly_add(g, h)) == poly_add(poly_mul(f, g), poly_mul(f, h)) &&
         poly_mul(f, g) == poly_mul(g, f);
  }
  t.report("ring-axioms", ok);
}

void selftest_orders(SelfTest& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 1);
  std::vector<MonomialOrder> orders = {{OrderKind::Lex, 0}, {OrderKind::Grevlex, 0},
                                       {OrderKind::Block, 2}};
  bool ok = true;
  for (const auto& ord : orders)
    for (int it = 0; it < 200 && ok; ++it) {
      Monomial u = Monomial::one(3), v = Monomial::one(3), w = Monomial::one(3);
      for (int d = 0; d < 5; ++d) {
        auto bump = [&](Monomial& m) {
          if (rng() % 2) {
            std::size_t i = rng() % 3;
            m.exp[i]++;
            m.deg++;
          }
        };
        bump(u);
        bump(v);
        bump(w);
      }
      ok = cmp_monomials(mono_mul(u, w), mono_mul(v, w), ord) == cmp_monomials(u, v, ord);
      if (!u.is_one()) ok = ok && cmp_monomials(u, Monomial::one(3), ord) > 0;
    }
  t.report("order-multiplicativity", ok);
}

void selftest_groebner(SelfTest& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 2);
  auto r = PolyRing::make(32003, {"x", "y"});
  bool ok = true;
  for (int it = 0; it < 10 && ok; ++it) {
    std::vector<Poly> gens;
    for (int i = 0; i < 2; ++i) gens.push_back(sampling::random_poly(rng, r, 3, 3));
    Ideal I(r, gens);
    const auto& gb = I.groebner();
    for (std::size_t a = 0; a < gb.size() && ok; ++a)
      for (std::size_t b = a + 1; b < gb.size() && ok; ++b) {
        Monomial l = mono_lcm(gb[a].lm(), gb[b].lm());
        const PrimeField& fp = r->field();
        Poly s = poly_sub(poly_term_mul(gb[a], mono_div(l, gb[a].lm()), fp.inv(gb[a].lc())),
                          poly_term_mul(gb[b], mono_div(l, gb[b].lm()), fp.inv(gb[b].lc())));
        ok = normal_form(s, gb).is_zero();
      }
    for (const auto& g : I.gens()) ok = ok && normal_form(g, gb).is_zero();
  }
  t.report("groebner-soundness", ok);
}

void selftest_syzygies(SelfTest& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 3);
  auto r = PolyRing::make(32003, {"x", "y"});
  bool ok = true;
  for (int it = 0; it < 10 && ok; ++it) {
    std::vector<FreeVec> gens;
    int m = 2 + int(rng() % 2);
    for (int i = 0; i < m; ++i)
      gens.push_back(FreeVec::from_components(
          {sampling::random_poly(rng, r, 2, 2), sampling::random_poly(rng, r, 2, 2)}));
    for (const auto& s : syzygies(gens)) {
      FreeVec acc(r, 2);
      for (int i = 0; i < m; ++i)
        acc = vec_add(acc, vec_scale(gens[std::size_t(i)], s[std::size_t(i)]));
      ok = ok && acc.is_zero();
    }
  }
  t.report("syzygy-identity", ok);
}

void selftest_roofs(SelfTest& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 4);
  auto r = PolyRing::make(32003, {"x", "y"});
  AffineAlgebra A2 = make_affine_algebra(r, Ideal::zero(r));
  QuotientLevel lvl = make_level(A2, 1);
  bool ok = true;
  int done = 0;
  while (done < 5 && ok) {
    FPModule F = sampling::random_module(rng, A2);
    FPModule G = sampling::random_module(rng, A2);
    auto r1 = sampling::random_roof(rng, lvl, F, G);
    if (!r1) continue;
    ++done;
    Roof idF = roof_identity(lvl, F);
    Roof idG = roof_identity(lvl, G);
    ok = roof_equal(roof_compose(*&idG, *r1), *r1) && roof_equal(roof_compose(*r1, idF), *r1);
  }
  t.report("roof-units", ok);
}

void selftest_fractions(SelfTest& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 5);
  auto r = PolyRing::make(32003, {"x", "y"});
  AffineAlgebra A2 = make_affine_algebra(r, Ideal::zero(r));
  QuotientLevel lvl = make_level(A2, 1);
  PrimeWitness P = prime_witness(Ideal(r, {Poly::variable(r, 1)}), seed);
  bool ok = true;
  int done = 0;
  while (done < 8 && ok) {
    Poly a = sampling::random_poly(rng, r, 2, 2);
    Poly b = sampling::random_poly(rng, r, 2, 2, false);
    Poly c = sampling::random_poly(rng, r, 2, 2);
    Poly d = sampling::random_poly(rng, r, 2, 2, false);
    if (in_ideal(b, P.ideal) || in_ideal(d, P.ideal)) continue;
    ++done;
    bool eq = roof_equal(roof_fraction(lvl, P, a, b), roof_fraction(lvl, P, c, d));
    bool crit = in_ideal(poly_sub(poly_mul(a, d), poly_mul(b, c)), P.ideal);
    ok = (eq == crit);
  }
  t.report("residue-fractions", ok);
}

int run_selftest(std::uint64_t seed) {
  SelfTest t;
  selftest_poly_algebra(t, seed);
  selftest_orders(t, seed);
  selftest_groebner(t, seed);
  selftest_syzygies(t, seed);
  selftest_roofs(t, seed);
  selftest_fractions(t, seed);
  std::cout << (t.failures == 0 ? "selftest OK" : "selftest FAILED") << "\n";
  return t.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codim-cat: quotient categories of coherent modules on affine charts"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.seed = env_seed();

  std::string path;
  std::uint32_t prime = 0;
  std::string order;
  double timeout = 0;
  int maxdeg = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--prime", prime, "override the session modulus");
    sub->add_option("--order", order, "override the monomial order (lex|grevlex)");
    sub->add_option("--max-degree", maxdeg, "degree guard for basis computations");
    sub->add_option("--timeout-s", timeout, "wall clock limit per engine call");
    sub->add_option("--jobs", cfg.jobs, "run independent commands concurrently");
    sub->add_flag_callback("--no-timing", [&] { cfg.timing = false; },
                           "omit timings for byte-stable output");
    sub->add_option("--seed", cfg.seed, "seed for the probabilistic probes");
  };

  CLI::App* run = app.add_subcommand("run", "execute a session file");
  run->add_option("file", path, "session file")->required();
  add_common(run);

  CLI::App* check = app.add_subcommand("check", "run the built-in example corpus");
  add_common(check);

  CLI::App* selftest = app.add_subcommand("selftest", "run the property suites");
  selftest->add_option("--seed", cfg.seed, "seed for the random suites");

  CLI11_PARSE(app, argc, argv);

  if (prime) cfg.prime_override = prime;
  if (!order.empty()) {
    auto parsed = order_from_name(order);
    if (!parsed) {
      std::cerr << "unknown order '" << order << "'\n";
      return 2;
    }
    cfg.order_override = *parsed;
  }
  if (maxdeg) cfg.limits.max_degree = std::uint32_t(maxdeg);
  if (timeout > 0) cfg.limits.timeout_s = timeout;

  try {
    if (run->parsed()) return run_file(path, cfg);
    if (check->parsed()) return run_check(cfg);
    if (selftest->parsed()) return run_selftest(cfg.seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
