#include <doctest.h>

#include "support.hpp"
#include "whilesos/coinduction.hpp"
#include "whilesos/flag_based.hpp"
#include "whilesos/json_io.hpp"
#include "whilesos/pretty_big.hpp"
#include "whilesos/rule_dsl.hpp"

using namespace whilesos;
using testing::rules_dir;
using testing::store;
using testing::stream;

TEST_SUITE("json_io") {

TEST_CASE("values, stores, statuses") {
  CHECK(store_to_json(store("{x |-> 3, y |-> null}")) == json::parse(R"({"x":3,"y":null})"));
  CHECK(store_from_json(json::parse(R"({"x":3,"y":null})")) == store("{x |-> 3, y |-> null}"));
  for (auto s : {Status::down(), Status::up(), Status::exc(Val::nat(4), store("{z |-> 1}"))})
    CHECK(status_from_json(status_to_json(s)) == s);
  CHECK(status_to_json(Status::up()) == "up");
  for (auto o : {Outcome::div(), Outcome::conv(store("{a |-> 0}"))})
    CHECK(outcome_from_json(outcome_to_json(o)) == o);
  auto in = *stream("1,2,3").pop();
  CHECK(stream_to_json(in.second) == json::parse("[2,3]"));
}

TEST_CASE("semantic commands") {
  auto c = parse_cmd("x := 1");
  std::vector<SemCmd> all = {SemCmd::plain(c),
                             SemCmd::assign2("x", Val::nat(2)),
                             SemCmd::seq2(Outcome::div(), c),
                             SemCmd::if2(Val::nat(0), c, Cmd::skip()),
                             SemCmd::while2(Val::null(), Expr::var("x"), c),
                             SemCmd::while3(Outcome::conv(store("{x |-> 1}")), Expr::nat(1), c)};
  for (const auto& s : all) CHECK(semcmd_from_json(semcmd_to_json(s)) == s);
}

TEST_CASE("graphs round trip and still check") {
  auto cases = {std::pair{ProofSystem::DivPred, "while 1 { skip }"},
                std::pair{ProofSystem::PrettyCo, "alloc x; x := 0; while 1 { x := x + 1 }"},
                std::pair{ProofSystem::FlagCo, "while 1 { skip }; alloc x; x := x + 0"}};
  for (auto [sys, text] : cases) {
    CAPTURE(text);
    Abstraction abs;
    if (std::string(text).find("x + 1") != std::string::npos) abs.vars = {"x"};
    auto g = prove_divergence(parse_cmd(text), {}, {}, sys, 100, abs);
    REQUIRE(g);
    auto j = graph_to_json(*g);
    CHECK(j["kind"] == "derivation-graph");
    CHECK(j["system"] == system_name(sys));
    auto back = graph_from_json(json::parse(j.dump()));
    CHECK(graph_to_json(back) == j);
    CHECK(check_derivation_graph(back, sys).ok);
  }
}

TEST_CASE("finite flag tree round trip") {
  auto run = run_flag(testing::program("uncaught.whl"), {}, Status::down(), {}, 100,
                      FlagOptions{true, false});
  REQUIRE(run.tree);
  auto back = graph_from_json(graph_to_json(*run.tree));
  CHECK(graph_to_json(back) == graph_to_json(*run.tree));
  CHECK(check_derivation_graph(back, ProofSystem::FlagCo).ok);
}

TEST_CASE("lassos and certificates") {
  auto l = *detect_lasso({testing::program("loop.whl"), {}, {}}, 100, Abstraction{{"x"}});
  auto j = lasso_to_json(l);
  CHECK(j["kind"] == "lasso");
  auto back = lasso_from_json(j);
  CHECK(lasso_to_json(back) == j);
  CHECK(check_lasso(back).ok);
  Certificate cert{back};
  CHECK(check_certificate(certificate_from_json(certificate_to_json(cert))).ok);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(certificate_from_json(json::parse(R"({"kind":"tree"})")), FormatError);
  CHECK_THROWS_AS(graph_from_json(json::parse(R"({"kind":"derivation-graph"})")), FormatError);
  CHECK_THROWS_AS(store_from_json(json::parse("[1]")), FormatError);
  CHECK_THROWS_AS(status_from_json(json::parse(R"("sideways")")), FormatError);
}

TEST_CASE("verdicts") {
  auto v = verdict_to_json(Converged{store("{c |-> 0, r |-> 24}")});
  CHECK(v["verdict"] == "Converged");
  CHECK(v["store"]["r"] == 24);
  CHECK(verdict_to_json(Unknown{5})["fuel"] == 5);
}

TEST_CASE("traces") {
  auto run = run_star({parse_cmd("alloc x; x := input"), {}, stream("9")}, 10);
  auto t = trace_to_json(run.trace);
  REQUIRE(t.size() == 4);
  CHECK(t[3]["stream-cursor"] == 1);
  CHECK(t[3]["store"]["x"] == 9);
}

}  // TEST_SUITE

TEST_SUITE("rule_dsl") {

TEST_CASE("shipped rule counts") {
  CHECK(load_rules(rules_dir() / "big_step.rules").rules.size() == 11);
  CHECK(load_rules(rules_dir() / "flag_based.rules").rules.size() == 13);
  CHECK(load_rules(rules_dir() / "exprs.rules").rules.size() == 3);
}

TEST_CASE("metrics") {
  auto flag = count_metrics(load_rules(rules_dir() / "flag_based.rules"));
  CHECK(flag.rules == 13);
  CHECK(flag.premises == 13);
  CHECK_FALSE(flag.duplicates);

  auto pretty = count_metrics(load_rules(rules_dir() / "pretty_big.rules"));
  CHECK(pretty.rules == 18);
  CHECK(pretty.premises == 16);

  auto base = load_rules(rules_dir() / "big_step.rules");
  auto div = count_metrics(load_rules(rules_dir() / "div_pred.rules"), &base);
  CHECK(div.rules == 17);
  CHECK(div.premises == 25);
  REQUIRE(div.duplicates);
  CHECK(*div.duplicates == 6);
}

TEST_CASE("missing separator") {
  const char* text = "sig (c, sigma) =B=> (sigma')\nrule B-Skip:\n(skip, sigma) =B=> (sigma)\n";
  CHECK_THROWS_AS(parse_rules(text), RuleParseError);
  try {
    parse_rules(text, "bad.rules");
  } catch (const RuleParseError& e) {
    CHECK(e.file == "bad.rules");
    CHECK(e.line >= 2);
  }
}

TEST_CASE("unknown relation and bad include") {
  CHECK_THROWS_AS(parse_rules("rule X:\n---\n(skip) =Q=> ()\n"), RuleParseError);
  CHECK_THROWS_AS(parse_rules("include \"nope.rules\"\n", "<t>", rules_dir()), RuleParseError);
}

TEST_CASE("threading single rules") {
  auto rs = parse_rules(R"(
const skip down
sig (c, sigma, [delta :- down]) =G=> (sigma', [delta'])
rule F-Skip:
---
(skip, sigma) =G=> (sigma)
rule F-Seq:
(c1, sigma) =G=> (sigma')
(c2, sigma') =G=> (sigma'')
---
(c1; c2, sigma) =G=> (sigma'')
)");
  auto t = thread_flags(rs);
  CHECK(print_rule(t.rules[0]) == "rule F-Skip:\n---\n(skip, sigma, down) =G=> (sigma, down)\n");
  CHECK(print_rule(t.rules[1]) ==
        "rule F-Seq:\n"
        "(c1, sigma, down) =G=> (sigma', delta1)\n"
        "(c2, sigma', delta1) =G=> (sigma'', delta')\n"
        "---\n"
        "(c1; c2, sigma, down) =G=> (sigma'', delta')\n");
}

TEST_CASE("mixed flag usage") {
  auto rs = parse_rules(R"(
const down
sig (c, sigma, [delta :- down]) =G=> (sigma', [delta'])
rule F-Bad:
(c1, sigma, down) =G=> (sigma', delta)
---
(c1, sigma) =G=> (sigma')
)");
  CHECK_THROWS_AS(thread_flags(rs), MixedFlagUsage);
}

TEST_CASE("threaded implicit rules equal the explicit transcription") {
  auto implicit = load_rules(rules_dir() / "flag_based_implicit.rules");
  auto explicit_ = load_rules(rules_dir() / "flag_based.rules");
  CHECK_FALSE(alpha_equal(implicit, explicit_));
  CHECK(alpha_equal(thread_flags(implicit), explicit_));
  // explicit rules pass through unchanged
  CHECK(alpha_equal(thread_flags(explicit_), explicit_));
}

TEST_CASE("alpha equality") {
  auto flag = load_rules(rules_dir() / "flag_based.rules");
  CHECK(alpha_equal(flag, flag));
  CHECK_FALSE(alpha_equal(flag, load_rules(rules_dir() / "pretty_big.rules")));

  const std::string sig = "sig (c, sigma) =B=> (sigma')\n";
  auto a = parse_rules(sig + "rule A:\n(c, s) =B=> (t)\n---\n(c, s) =B=> (t)\n");
  auto b = parse_rules(sig + "rule B:\n(d, u) =B=> (w)\n---\n(d, u) =B=> (w)\n");
  auto c = parse_rules(sig + "rule C:\n(d, u) =B=> (u)\n---\n(d, u) =B=> (w)\n");
  CHECK(alpha_equal(a, b));
  CHECK_FALSE(alpha_equal(a, c));
}

TEST_CASE("print and reparse") {
  for (const char* f : {"big_step.rules", "div_pred.rules", "pretty_big.rules", "flag_based.rules",
                        "flag_based_implicit.rules", "small_step.rules"}) {
    CAPTURE(f);
    auto rs = load_rules(rules_dir() / f);
    auto again = parse_rules(print_rules(rs));
    CHECK(again.rules.size() == rs.rules.size());
    CHECK(alpha_equal(again, rs));
    CHECK(count_metrics(again).premises == count_metrics(rs).premises);
  }
}

}  // TEST_SUITE
