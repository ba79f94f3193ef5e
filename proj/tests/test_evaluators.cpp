#include <doctest.h>

#include "support.hpp"
#include "whilesos/big_step.hpp"
#include "whilesos/coinduction.hpp"
#include "whilesos/flag_based.hpp"
#include "whilesos/pretty_big.hpp"
#include "whilesos/small_step.hpp"

using namespace whilesos;
using testing::store;
using testing::stream;

namespace {

const Cmd while1 = Cmd::while_(Expr::nat(1), Cmd::skip());

Store fac_store(std::uint64_t n) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 2; i <= n; ++i) r *= i;
  return {{"c", Val::nat(0)}, {"r", Val::nat(r)}};
}

template <class T, class V>
const T& must(const V& v) {
  REQUIRE(std::holds_alternative<T>(v));
  return std::get<T>(v);
}

}  // namespace

TEST_SUITE("small_step") {

TEST_CASE("expressions") {
  auto one = must<ExprValue>(eval_expr(Expr::nat(1), {}, {}));
  CHECK(one.value == Val::nat(1));
  CHECK(one.stream == InputStream());
  CHECK(must<ExprValue>(eval_expr(Expr::var("x"), store("{x |-> 3}"), {})).value == Val::nat(3));
  auto add = Expr::bop(BinOp::Add, Expr::var("x"), Expr::nat(0));
  CHECK(std::holds_alternative<ExprStuck>(eval_expr(add, store("{x |-> null}"), {})));
  CHECK(std::holds_alternative<ExprStuck>(eval_expr(Expr::var("y"), {}, {})));
  auto in = must<ExprValue>(eval_expr(Expr::input(), {}, stream("7")));
  CHECK(in.value == Val::nat(7));
  CHECK(in.stream == InputStream());
  CHECK(std::holds_alternative<ExprStuck>(eval_expr(Expr::input(), {}, {})));
}

TEST_CASE("operands read input left to right") {
  auto e = parse_expr("input - input");
  CHECK(must<ExprValue>(eval_expr(e, {}, stream("5,2"))).value == Val::nat(3));
  CHECK(must<ExprValue>(eval_expr(e, {}, stream("2,5"))).value == Val::nat(0));
}

TEST_CASE("single steps") {
  auto s1 = must<SmallConfig>(step({while1, {}, {}}));
  CHECK(s1.cmd == Cmd::seq(Cmd::skip(), while1));
  auto c = parse_cmd("alloc x");
  auto s2 = must<SmallConfig>(step({Cmd::seq(Cmd::skip(), c), store("{y |-> 1}"), stream("4")}));
  CHECK(s2.cmd == c);
  CHECK(s2.store == store("{y |-> 1}"));
  CHECK(s2.stream == stream("4"));
  auto stuck = must<NoStep>(step({Cmd::assign("x", Expr::nat(0)), {}, {}}));
  CHECK_FALSE(stuck.terminal);
  CHECK(must<NoStep>(step({Cmd::skip(), {}, {}})).terminal);
}

TEST_CASE("alloc of an allocated variable is stuck") {
  CHECK(std::holds_alternative<NoStep>(step({Cmd::alloc("x"), store("{x |-> 1}"), {}})));
}

TEST_CASE("run_star") {
  CHECK(must<Converged>(run_star({fac_program(4), {}, {}}, 10000).verdict).store == fac_store(4));
  CHECK(must<Converged>(run_star({fac_program(0), {}, {}}, 10000).verdict).store ==
        store("{c |-> 0, r |-> 1}"));
  CHECK(must<Converged>(run_star({fac_program(6), {}, {}}, 10000).verdict).store == fac_store(6));
  CHECK(fac_store(6).at("r") == Val::nat(720));
  auto s = store("{x |-> 5}");
  CHECK(must<Converged>(run_star({Cmd::skip(), s, {}}, 0).verdict).store == s);
  CHECK(must<Unknown>(run_star({while1, {}, {}}, 100).verdict).fuel == 100);
}

TEST_CASE("trace records every configuration") {
  auto run = run_star({parse_cmd("alloc x; x := 1"), {}, {}}, 100);
  REQUIRE(run.trace.configs.size() == 4);
  CHECK(run.trace.terminal);
  CHECK(run.trace.configs.back().cmd.is_skip());
  CHECK(run.steps == 3);
}

}  // TEST_SUITE

TEST_SUITE("big_step") {

TEST_CASE("factorial") {
  CHECK(must<Done>(eval_big(fac_program(4), {}, {}, 10000)).store == fac_store(4));
  CHECK(must<Done>(eval_big(fac_program(6), {}, {}, 10000)).store == fac_store(6));
}

TEST_CASE("skip needs one unit of fuel") {
  auto s = store("{x |-> 1}");
  CHECK(must<Done>(eval_big(Cmd::skip(), s, {}, 1)).store == s);
  CHECK(std::holds_alternative<OutOfFuel>(eval_big(Cmd::skip(), s, {}, 0)));
}

TEST_CASE("while 1 skip runs out of fuel") {
  CHECK(std::holds_alternative<OutOfFuel>(eval_big(while1, {}, {}, 100000)));
}

TEST_CASE("stuck programs") {
  CHECK(std::holds_alternative<StuckB>(eval_big(parse_cmd("x := 0"), {}, {}, 100)));
  CHECK(std::holds_alternative<StuckB>(eval_big(parse_cmd("throw 1"), {}, {}, 100)));
}

TEST_CASE("trees are finite and checkable") {
  auto run = run_big(fac_program(3), {}, {}, 1000, true);
  REQUIRE(run.tree);
  CHECK_FALSE(run.tree->has_back_edges());
  CHECK(check_derivation_graph(*run.tree, ProofSystem::BigStep).ok);
}

}  // TEST_SUITE

TEST_SUITE("pretty_big") {

TEST_CASE("factorial agrees with big-step") {
  auto d = must<DoneP>(eval_pretty(SemCmd::plain(fac_program(4)), {}, {}, 10000));
  CHECK(d.outcome == Outcome::conv(fac_store(4)));
  auto b = must<Done>(eval_big(fac_program(4), {}, {}, 10000));
  CHECK(d.outcome.store() == b.store);
}

TEST_CASE("abort rules") {
  auto s = store("{x |-> 1}");
  auto c = parse_cmd("x := 2");
  CHECK(must<DoneP>(eval_pretty(SemCmd::seq2(Outcome::div(), c), s, {}, 1)).outcome ==
        Outcome::div());
  CHECK(must<DoneP>(eval_pretty(SemCmd::while3(Outcome::div(), Expr::nat(1), c), s, {}, 1))
            .outcome == Outcome::div());
  CHECK(must<DoneP>(eval_pretty(SemCmd::plain(Cmd::skip()), s, {}, 1)).outcome ==
        Outcome::conv(s));
}

TEST_CASE("intermediate forms") {
  auto s = store("{x |-> 1}");
  CHECK(must<DoneP>(eval_pretty(SemCmd::assign2("x", Val::nat(5)), s, {}, 1)).outcome ==
        Outcome::conv(store("{x |-> 5}")));
  CHECK(std::holds_alternative<StuckP>(eval_pretty(SemCmd::assign2("y", Val::nat(5)), s, {}, 1)));
  auto c = SemCmd::if2(Val::nat(0), parse_cmd("x := 7"), parse_cmd("x := 8"));
  CHECK(must<DoneP>(eval_pretty(c, s, {}, 10)).outcome == Outcome::conv(store("{x |-> 8}")));
}

TEST_CASE("while 1 skip runs out of fuel") {
  CHECK(std::holds_alternative<OutOfFuelP>(eval_pretty(SemCmd::plain(while1), {}, {}, 100000)));
}

TEST_CASE("trees accepted by the coinductive checker") {
  auto run = run_pretty(SemCmd::plain(fac_program(3)), {}, {}, 1000, true);
  REQUIRE(run.tree);
  CHECK(check_derivation_graph(*run.tree, ProofSystem::PrettyCo).ok);
}

}  // TEST_SUITE

TEST_SUITE("flag_based") {

TEST_CASE("expressions") {
  auto one = must<FlagResult>(eval_expr_flag(Expr::nat(1), {}, Status::down(), {}, 10));
  CHECK(one.status.is_down());
  CHECK(one.value == Val::nat(1));
  auto five =
      must<FlagResult>(eval_expr_flag(parse_expr("2 + 3"), {}, Status::down(), {}, 10));
  CHECK(five.value == Val::nat(5));
  auto up = must<FlagResult>(
      eval_expr_flag(parse_expr("x + 1"), store("{x |-> 1}"), Status::up(), stream("3"), 10));
  CHECK(up.status.is_up());
  CHECK(up.store.empty());
  CHECK(up.stream == InputStream());
}

TEST_CASE("factorial") {
  auto r = must<FlagResult>(eval_flag(fac_program(4), {}, Status::down(), {}, 10000));
  CHECK(r.status.is_down());
  CHECK(r.store == fac_store(4));
}

TEST_CASE("throw") {
  auto s = store("{x |-> 1}");
  auto r = must<FlagResult>(eval_flag(Cmd::throw_(Val::nat(7)), s, Status::down(), {}, 10));
  CHECK(r.status == Status::exc(Val::nat(7), s));
  CHECK(r.store.empty());
}

TEST_CASE("catch resumes the handler in the store at the throw") {
  auto s = store("{x |-> 1}");
  auto c = Cmd::catch_(Cmd::seq(Cmd::throw_(Val::nat(7)), Cmd::assign("x", Expr::nat(9))),
                       Cmd::skip());
  auto r = must<FlagResult>(eval_flag(c, s, Status::down(), {}, 100));
  CHECK(r.status.is_down());
  CHECK(r.store == s);

  auto prog = testing::program("catch.whl");
  auto r2 = must<FlagResult>(eval_flag(prog, {}, Status::down(), {}, 100));
  CHECK(r2.store == store("{x |-> 20}"));
}

TEST_CASE("uncaught exception keeps the stream") {
  auto c = parse_cmd("alloc x; x := input; throw 3");
  auto r = must<FlagResult>(eval_flag(c, {}, Status::down(), stream("1,2"), 100));
  CHECK(r.status == Status::exc(Val::nat(3), store("{x |-> 1}")));
  CHECK(r.stream == stream("2"));
}

TEST_CASE("up start leaves fuel untouched") {
  auto run = run_flag(fac_program(4), store("{q |-> 1}"), Status::up(), {}, 10);
  auto r = must<FlagResult>(run.result);
  CHECK(r.status.is_up());
  CHECK(r.store.empty());
  CHECK(run.fuel_used == 0);
}

TEST_CASE("exc start propagates") {
  auto d = Status::exc(Val::nat(2), store("{y |-> 0}"));
  auto r = must<FlagResult>(eval_flag(parse_cmd("alloc x"), {}, d, stream("1"), 10));
  CHECK(r.status == d);
  CHECK(r.stream == stream("1"));
}

TEST_CASE("while 1 skip runs out of fuel") {
  CHECK(std::holds_alternative<OutOfFuelF>(eval_flag(while1, {}, Status::down(), {}, 100000)));
}

TEST_CASE("result equality ignores sentinel parts") {
  FlagResult a{Status::up(), store("{x |-> 1}"), std::nullopt, stream("1")};
  FlagResult b{Status::up(), {}, std::nullopt, {}};
  CHECK(a == b);
  CHECK(canonicalize(a).store.empty());
}

TEST_CASE("trees accepted by the coinductive checker") {
  auto run = run_flag(testing::program("catch.whl"), {}, Status::down(), {}, 1000,
                      FlagOptions{true, false});
  REQUIRE(run.tree);
  CHECK(check_derivation_graph(*run.tree, ProofSystem::FlagCo).ok);
}

}  // TEST_SUITE
