#include <doctest.h>

#include "support.hpp"
#include "whilesos/coinduction.hpp"
#include "whilesos/json_io.hpp"

using namespace whilesos;
using testing::store;
using testing::stream;

namespace {

const Cmd while1 = Cmd::while_(Expr::nat(1), Cmd::skip());

Cmd loop_body() { return parse_cmd("while 1 { x := x + 1 }"); }

}  // namespace

TEST_SUITE("coinduction") {

TEST_CASE("lasso of while 1 skip") {
  auto l = detect_lasso({while1, {}, {}}, 10);
  REQUIRE(l);
  CHECK(l->prefix.empty());
  REQUIRE(l->cycle.size() == 2);
  // hand-enumerated orbit
  CHECK(l->cycle[0].cmd == while1);
  CHECK(l->cycle[1].cmd == Cmd::seq(Cmd::skip(), while1));
  CHECK(check_lasso(*l).ok);
}

TEST_CASE("growing store has no concrete repeat") {
  CHECK_FALSE(detect_lasso({loop_body(), store("{x |-> 0}"), {}}, 1000));
  auto l = detect_lasso({loop_body(), store("{x |-> 0}"), {}}, 100, Abstraction{{"x"}});
  REQUIRE(l);
  CHECK(check_lasso(*l).ok);
}

TEST_CASE("lasso exists from any start value") {
  for (std::uint64_t n : {0ull, 1ull, 77ull, 18446744073709551615ull}) {
    Store s{{"x", Val::nat(n)}};
    auto l = detect_lasso({loop_body(), s, {}}, 100, Abstraction{{"x"}});
    REQUIRE(l);
    CHECK(check_lasso(*l).ok);
  }
}

TEST_CASE("converging and stuck programs have no lasso") {
  CHECK_FALSE(detect_lasso({fac_program(3), {}, {}}, 1000));
  CHECK_FALSE(detect_lasso({parse_cmd("x := 1"), {}, {}}, 1000));
}

TEST_CASE("corrupted lassos are rejected") {
  auto l = *detect_lasso({while1, {}, {}}, 10);
  auto broken = l;
  broken.cycle[1].cmd = Cmd::seq(Cmd::skip(), Cmd::while_(Expr::nat(2), Cmd::skip()));
  CHECK_FALSE(check_lasso(broken).ok);

  auto empty = l;
  empty.prefix = l.cycle;
  empty.cycle.clear();
  CHECK_FALSE(check_lasso(empty).ok);

  auto wrong_store = l;
  wrong_store.cycle[1].store = store("{x |-> 1}");
  CHECK_FALSE(check_lasso(wrong_store).ok);
}

TEST_CASE("abstraction must not reach guards") {
  auto bad = parse_cmd("alloc x; x := 0; while x + 1 { x := x + 1 }");
  CHECK(abstraction_violation(bad, {"x"}).has_value());
  CHECK_THROWS_AS(check_abstraction(bad, Abstraction{{"x"}}), AbstractionUnsound);
  // flows into a guard variable through an assignment
  auto flow = parse_cmd("alloc x; alloc y; x := 0; y := 1; while y { x := x + 1; y := x }");
  CHECK(abstraction_violation(flow, {"x"}).has_value());
  CHECK_FALSE(abstraction_violation(testing::program("loop.whl"), {"x"}).has_value());
  CHECK_THROWS_AS(detect_lasso({bad, {}, {}}, 100, Abstraction{{"x"}}), AbstractionUnsound);
}

TEST_CASE("div-pred graph through D-While is accepted") {
  DerivationGraph g;
  g.system = ProofSystem::DivPred;
  g.add(DivJudgment{while1, {}, {}}, "D-While", {0});
  CHECK(check_derivation_graph(g, ProofSystem::DivPred).ok);
}

TEST_CASE("div-pred graph through D-WhileBody is rejected") {
  // its premise would be (skip, .) =inf=>, which has no rule
  DerivationGraph g;
  g.system = ProofSystem::DivPred;
  g.add(DivJudgment{while1, {}, {}}, "D-WhileBody", {1});
  g.add(DivJudgment{Cmd::skip(), {}, {}}, "D-While", {0});
  auto r = check_derivation_graph(g, ProofSystem::DivPred);
  CHECK_FALSE(r.ok);
  CHECK(r.diagnostic.find("does not match") != std::string::npos);

  DerivationGraph self;
  self.system = ProofSystem::DivPred;
  self.add(DivJudgment{while1, {}, {}}, "D-WhileBody", {0});
  CHECK_FALSE(check_derivation_graph(self, ProofSystem::DivPred).ok);
}

TEST_CASE("flag-co graph with F-While back edge") {
  DerivationGraph g;
  g.system = ProofSystem::FlagCo;
  auto d = Status::down();
  g.add(FlagJudgment{while1, {}, {}, d, {}, {}, Status::up()}, "F-While", {1, 2, 0});
  g.add(FlagExprJudgment{Expr::nat(1), {}, {}, d, Val::nat(1), {}, d}, "FE-Val");
  g.add(FlagJudgment{Cmd::skip(), {}, {}, d, {}, {}, d}, "F-Skip");
  CHECK(check_derivation_graph(g, ProofSystem::FlagCo).ok);

  auto bad = g;
  std::get<FlagJudgment>(bad.nodes[2].judgment).out_store = store("{x |-> 1}");
  CHECK_FALSE(check_derivation_graph(bad, ProofSystem::FlagCo).ok);
}

TEST_CASE("prove_divergence for every system") {
  for (auto sys : {ProofSystem::DivPred, ProofSystem::PrettyCo, ProofSystem::FlagCo}) {
    CAPTURE(system_name(sys));
    auto g = prove_divergence(while1, {}, {}, sys, 10);
    REQUIRE(g);
    CHECK(g->system == sys);
    CHECK(g->has_back_edges());
    CHECK(check_derivation_graph(*g, sys).ok);
    CHECK_FALSE(prove_divergence(fac_program(2), {}, {}, sys, 1000));
  }
}

TEST_CASE("prove_divergence modulo an abstraction") {
  auto c = testing::program("loop.whl");
  for (auto sys : {ProofSystem::DivPred, ProofSystem::PrettyCo, ProofSystem::FlagCo}) {
    CAPTURE(system_name(sys));
    auto g = prove_divergence(c, {}, {}, sys, 100, Abstraction{{"x"}});
    REQUIRE(g);
    CHECK(check_derivation_graph(*g, sys).ok);
    auto concrete = *g;
    concrete.abstraction.clear();
    CHECK_FALSE(check_derivation_graph(concrete, sys).ok);
  }
}

TEST_CASE("necessity program needs F-Div") {
  auto c = testing::program("necessity.whl");
  auto g = prove_divergence(c, {}, {}, ProofSystem::FlagCo, 100);
  REQUIRE(g);
  CHECK(check_derivation_graph(*g, ProofSystem::FlagCo).ok);
  auto j = graph_to_json(*g);
  auto root = j["nodes"][j["root"].get<std::size_t>()];
  CHECK(root["rule"] == "F-Seq");
  auto second = root["premises"][1].get<std::size_t>();
  CHECK(j["nodes"][second]["rule"] == "F-Div");
  CHECK(detect_lasso({c, {}, {}}, 100));
}

TEST_CASE("flag-co graphs for exception programs") {
  auto c = parse_cmd("alloc x; x := 0; while 1 { try { throw 1 } catch { x := x + 1 } }");
  auto g = build_flag_co(c, {}, {}, 1000, Abstraction{{"x"}});
  REQUIRE(g);
  CHECK(check_derivation_graph(*g, ProofSystem::FlagCo).ok);
  CHECK_FALSE(build_flag_co(testing::program("catch.whl"), {}, {}, 1000));
}

TEST_CASE("classify") {
  CHECK(std::holds_alternative<Converged>(classify(fac_program(3), {}, {}, 1000)));
  CHECK(std::holds_alternative<Stuck>(classify(parse_cmd("x := 1"), {}, {}, 1000)));
  auto d = classify(while1, {}, {}, 1000);
  REQUIRE(std::holds_alternative<DivergesProven>(d));
  CHECK(std::get<DivergesProven>(d).summary == "lasso, cycle=2");
  CHECK(check_certificate(*std::get<DivergesProven>(d).certificate).ok);
  auto e = classify(testing::program("uncaught.whl"), {}, {}, 1000);
  CHECK(std::holds_alternative<ExceptionV>(e));
  CHECK(std::holds_alternative<Unknown>(classify(testing::program("loop.whl"), {}, {}, 100)));
}

TEST_CASE("stuck or diverging depending on the input") {
  auto c = testing::program("input_guard.whl");
  CHECK(std::holds_alternative<Stuck>(classify(c, {}, stream("1"), 1000)));
  auto d = classify(c, {}, stream("0"), 1000);
  REQUIRE(std::holds_alternative<DivergesProven>(d));
  CHECK(check_certificate(*std::get<DivergesProven>(d).certificate).ok);
}

}  // TEST_SUITE
