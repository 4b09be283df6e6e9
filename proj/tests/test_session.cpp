#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "json.hpp"

#include "codimcat/session.hpp"

using namespace codimcat;
using Json = nlohmann::json;

namespace {

RunConfig quiet() {
  RunConfig cfg;
  cfg.timing = false;
  return cfg;
}

Json results_of(const std::string& report) { return Json::parse(report)["results"]; }

}  // namespace

TEST_CASE("parsing the grammar examples") {
  Session s = parse_session("ring p=32003 vars=[x,y] order=grevlex\n");
  Json ring = Json::parse(run_session(s, quiet()))["ring"];
  CHECK(ring["p"] == 32003);
  CHECK(ring["vars"].size() == 2);

  Session s2 = parse_session("ring p=32003 vars=[x,y] order=grevlex\nideal I=[x^2-y]\ndim I\n");
  CHECK(print_session(s2) ==
        "ring p=32003 vars=[x, y] order=grevlex\nideal I = [x^2 + 32002*y]\ndim I\n");

  CHECK_THROWS_AS(parse_session("ring p=32003 vars=[x,y] order=grevlex\nideal I=[x^^2]\n"),
                  ParseError);
  try {
    parse_session("ring p=32003 vars=[x,y] order=grevlex\nideal I=[x^^2]\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() >= 12);
  }

  // unresolved names are rejected with a position
  CHECK_THROWS_AS(parse_session("ring p=32003 vars=[x,y] order=grevlex\ndim nosuch\n"),
                  ParseError);
  // the ring must come first
  CHECK_THROWS_AS(parse_session("ideal I=[x]\n"), ParseError);
  // duplicate names are rejected
  CHECK_THROWS_AS(
      parse_session("ring p=32003 vars=[x,y] order=grevlex\nideal I=[x]\nideal I=[y]\n"),
      ParseError);
}

TEST_CASE("print and reparse round trip") {
  for (const auto& entry : builtin_corpus()) {
    Session s1 = parse_session(entry.text);
    std::string printed = print_session(s1);
    Session s2 = parse_session(printed);
    CHECK(print_session(s2) == printed);
  }
}

TEST_CASE("empty session") {
  std::string rep = run_session_text("", quiet());
  Json j = Json::parse(rep);
  CHECK(j["results"].empty());
  CHECK(j["errors"].empty());
  CHECK(report_clean(rep));
}

TEST_CASE("verdict commands") {
  std::string text = R"(ring p=32003 vars=[x,y] order=grevlex
level k=1
module M = coker [[x, y]]
module R = free 1
map pr : R -> M = [[1]]
dim M
small M
zero pr
)";
  Json res = results_of(run_session_text(text, quiet()));
  REQUIRE(res.size() == 3);
  CHECK(res[0]["verdict"] == 0);
  CHECK(res[1]["verdict"] == true);
  CHECK(res[2]["verdict"] == true);
  for (const auto& r : res) {
    CHECK(r.contains("anchor"));
    CHECK(!r.contains("ms"));
  }
}

TEST_CASE("hartogs session matches the expected shape") {
  std::string text = R"(ring p=32003 vars=[x,y] order=grevlex
level k=1
module R = free 1
homsec R R J=[x, y] n=4
)";
  Json res = results_of(run_session_text(text, quiet()));
  REQUIRE(res.size() == 1);
  CHECK(res[0]["object"]["stabilized"] == true);
  CHECK(res[0]["object"]["sections"] == "free 1");
}

TEST_CASE("runtime errors are structured and do not stop the run") {
  std::string text = R"(ring p=32003 vars=[x,y] order=grevlex
level k=1
module M = coker [[x]]
module N = coker [[x^2]]
map bad : M -> N = [[1]]
dim M
)";
  std::string rep = run_session_text(text, quiet());
  Json j = Json::parse(rep);
  REQUIRE(j["errors"].size() == 1);
  CHECK(j["errors"][0]["code"] == "structural");
  CHECK(j["errors"][0]["line"] == 5);
  // the later command still ran
  REQUIRE(j["results"].size() == 1);
  CHECK(j["results"][0]["verdict"] == 1);
  CHECK(!report_clean(rep));
}

TEST_CASE("determinism across runs and parallel modes") {
  for (const auto& entry : builtin_corpus()) {
    RunConfig cfg = quiet();
    std::string a = run_session_text(entry.text, cfg);
    std::string b = run_session_text(entry.text, cfg);
    CHECK(a == b);
    cfg.jobs = 4;
    std::string c = run_session_text(entry.text, cfg);
    CHECK(a == c);
  }
}

TEST_CASE("flag overrides reach the engine") {
  RunConfig cfg = quiet();
  cfg.prime_override = 7;
  std::string rep = run_session_text(
      "ring p=32003 vars=[x,y] order=grevlex\nideal I = [3*x + 10*y]\ngb I\n", cfg);
  Json j = Json::parse(rep);
  CHECK(j["ring"]["p"] == 7);
  // 10 = 3 mod 7, and the basis is monic: x + y
  CHECK(j["results"][0]["object"] == "[x + y]");
}

TEST_CASE("witness declarations store and reverify") {
  std::string text = R"(ring p=32003 vars=[x,y] order=grevlex
level k=1
algebra A = vars=[x,y] ideal=[y^2 - x^3]
algebra B = vars=[u] ideal=[]
witness W : A -> B = s=x t=u^2 fwd=[y/x] bwd=[u^2, u^3]
verify W k=1
)";
  Json res = results_of(run_session_text(text, quiet()));
  REQUIRE(res.size() == 2);
  CHECK(res[0]["object"]["certified"] == true);
  CHECK(res[1]["object"]["verify"] == true);

  // a tampered witness fails with a reason
  std::string bad = R"(ring p=32003 vars=[x,y] order=grevlex
algebra A = vars=[x,y] ideal=[y^2 - x^3]
algebra B = vars=[u] ideal=[]
witness W : A -> B = s=x t=u^2 fwd=[y/x] bwd=[u^2, u^2]
verify W k=1
)";
  Json res2 = results_of(run_session_text(bad, quiet()));
  REQUIRE(res2.size() == 2);
  CHECK(res2[0]["object"]["certified"] == false);
  CHECK(res2[1]["object"]["verify"] == false);
  CHECK(res2[1]["object"].contains("reason"));
}
