// Property suites over generated programs. Runs standalone:
//   ./property_tests [-ts=<suite>] [doctest options]
// WHILESOS_PROP_COUNT overrides the number of programs per property.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "whilesos/big_step.hpp"
#include "whilesos/coinduction.hpp"
#include "whilesos/flag_based.hpp"
#include "whilesos/harness.hpp"
#include "whilesos/parser.hpp"
#include "whilesos/pretty_big.hpp"
#include "whilesos/small_step.hpp"

using namespace whilesos;

namespace {

std::uint64_t count() {
  if (const char* s = std::getenv("WHILESOS_PROP_COUNT")) return std::strtoull(s, nullptr, 10);
  return 1500;
}

GenConfig config(std::uint64_t seed, bool input, bool exceptions) {
  GenConfig g;
  g.seed = seed;
  g.input = input;
  g.exceptions = exceptions;
  return g;
}

const std::vector<InputStream>& streams() {
  static const auto s = [] {
    auto all = enumerate_streams();
    return std::vector<InputStream>{all[0], all[1], all[2], all[5], all[14]};
  }();
  return s;
}

// every program kind the generator can produce, with a few streams each
template <class F>
void for_programs(std::uint64_t seed, F f) {
  const std::uint64_t n = count();
  for (std::uint64_t i = 0; i < n; ++i) {
    bool input = i % 3 == 1, exc = i % 3 == 2;
    Cmd c = generate_program(config(seed, input, exc), i);
    CAPTURE(pretty_cmd(c));
    if (input) {
      for (const auto& in : streams()) f(c, in);
    } else {
      f(c, InputStream());
    }
  }
}

// (prefix ++ cycle) is a run from its head, and the cycle closes
void replay(const Lasso& l) {
  std::vector<SmallConfig> run = l.prefix;
  run.insert(run.end(), l.cycle.begin(), l.cycle.end());
  const auto& vars = l.abstraction.vars;
  auto same = [&](const SmallConfig& a, const SmallConfig& b) {
    return a.cmd == b.cmd && project(a.store, vars) == project(b.store, vars) &&
           a.stream == b.stream;
  };
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    auto next = step(run[i]);
    REQUIRE(std::holds_alternative<SmallConfig>(next));
    CHECK(same(std::get<SmallConfig>(next), run[i + 1]));
  }
  auto back = step(run.back());
  REQUIRE(std::holds_alternative<SmallConfig>(back));
  CHECK(same(std::get<SmallConfig>(back), l.cycle.front()));
}

}  // namespace

TEST_SUITE("inductive") {

TEST_CASE("no up result from a down start") {
  for_programs(11, [](const Cmd& c, const InputStream& in) {
    auto r = eval_flag(c, {}, Status::down(), in, 2000);
    if (auto* f = std::get_if<FlagResult>(&r)) CHECK_FALSE(f->status.is_up());
  });
}

TEST_CASE("no div outcome from a source program") {
  for_programs(12, [](const Cmd& c, const InputStream& in) {
    if (uses_exceptions(c)) return;
    auto r = eval_pretty(SemCmd::plain(c), {}, in, 6000);
    if (auto* d = std::get_if<DoneP>(&r)) CHECK(d->outcome.is_conv());
  });
}

TEST_CASE("big-step and flag-based agree on convergence") {
  for_programs(13, [](const Cmd& c, const InputStream& in) {
    if (uses_exceptions(c)) return;
    auto b = eval_big(c, {}, in, 2000);
    auto f = eval_flag(c, {}, Status::down(), in, 2000);
    auto* done = std::get_if<Done>(&b);
    auto* fr = std::get_if<FlagResult>(&f);
    CHECK(bool(done) == bool(fr && fr->status.is_down()));
    if (done && fr) {
      CHECK(done->store == fr->store);
      CHECK(done->stream == fr->stream);
    }
  });
}

TEST_CASE("fuel monotonicity") {
  for_programs(14, [](const Cmd& c, const InputStream& in) {
    for (std::uint64_t f : {5ull, 40ull, 300ull}) {
      auto small = run_star({c, {}, in}, f, false).verdict;
      auto small2 = run_star({c, {}, in}, 4 * f, false).verdict;
      if (!std::holds_alternative<Unknown>(small))
        CHECK(std::string(verdict_class(small)) == verdict_class(small2));
      if (auto* cv = std::get_if<Converged>(&small)) CHECK(std::get<Converged>(small2) == *cv);

      auto b = eval_big(c, {}, in, f), b2 = eval_big(c, {}, in, 4 * f);
      if (!std::holds_alternative<OutOfFuel>(b)) CHECK(b.index() == b2.index());
      if (auto* d = std::get_if<Done>(&b)) CHECK(std::get<Done>(b2).store == d->store);

      auto p = eval_pretty(SemCmd::plain(c), {}, in, f);
      auto p2 = eval_pretty(SemCmd::plain(c), {}, in, 4 * f);
      if (!std::holds_alternative<OutOfFuelP>(p)) CHECK(p.index() == p2.index());
      if (auto* d = std::get_if<DoneP>(&p)) CHECK(std::get<DoneP>(p2).outcome == d->outcome);

      auto g = eval_flag(c, {}, Status::down(), in, f);
      auto g2 = eval_flag(c, {}, Status::down(), in, 4 * f);
      if (!std::holds_alternative<OutOfFuelF>(g)) CHECK(g.index() == g2.index());
      if (auto* r = std::get_if<FlagResult>(&g)) CHECK(std::get<FlagResult>(g2) == *r);
    }
  });
}

}  // TEST_SUITE

TEST_SUITE("coinductive") {

TEST_CASE("finite derivations are accepted") {
  for_programs(21, [](const Cmd& c, const InputStream& in) {
    auto b = run_big(c, {}, in, 2000, true);
    if (b.tree) {
      CHECK_FALSE(b.tree->has_back_edges());
      CHECK(check_derivation_graph(*b.tree, ProofSystem::BigStep).ok);
    }
    auto p = run_pretty(SemCmd::plain(c), {}, in, 6000, true);
    if (p.tree) CHECK(check_derivation_graph(*p.tree, ProofSystem::PrettyCo).ok);
    auto f = run_flag(c, {}, Status::down(), in, 2000, FlagOptions{true, false});
    if (f.tree) {
      auto r = check_derivation_graph(*f.tree, ProofSystem::FlagCo);
      CAPTURE(r.diagnostic);
      CHECK(r.ok);
    }
  });
}

TEST_CASE("up labels are store-irrelevant") {
  const Store junk{{"junk", Val::nat(42)}, {"x", Val::null()}};
  std::size_t graphs = 0;
  for_programs(22, [&](const Cmd& c, const InputStream& in) {
    if (uses_exceptions(c)) return;
    auto g = prove_divergence(c, {}, in, ProofSystem::FlagCo, 500);
    if (!g) return;
    ++graphs;
    REQUIRE(check_derivation_graph(*g, ProofSystem::FlagCo).ok);
    auto h = *g;
    for (auto& n : h.nodes)
      if (auto* j = std::get_if<FlagJudgment>(&n.judgment); j && j->out_flag.is_up()) {
        j->out_store = junk;
        j->out_stream = InputStream({Val::nat(9)});
      }
    auto r = check_derivation_graph(h, ProofSystem::FlagCo);
    CAPTURE(r.diagnostic);
    CHECK(r.ok);
  });
  CHECK(graphs > 20);
}

TEST_CASE("while 1 skip coevaluates to anything") {
  const Cmd w = Cmd::while_(Expr::nat(1), Cmd::skip());
  const auto d = Status::down();
  std::vector<Store> targets = {{}, {{"x", Val::nat(3)}}, {{"y", Val::null()}}};
  for (const auto& s : targets)
    for (auto out : {Status::down(), Status::up(), Status::exc(Val::nat(1), s)}) {
      DerivationGraph g;
      g.system = ProofSystem::FlagCo;
      g.add(FlagJudgment{w, {}, {}, d, s, {}, out}, "F-While", {1, 2, 0});
      g.add(FlagExprJudgment{Expr::nat(1), {}, {}, d, Val::nat(1), {}, d}, "FE-Val");
      g.add(FlagJudgment{Cmd::skip(), {}, {}, d, {}, {}, d}, "F-Skip");
      auto r = check_derivation_graph(g, ProofSystem::FlagCo);
      CAPTURE(r.diagnostic);
      CHECK(r.ok);
    }
  for (const auto& s : targets)
    for (auto o : {Outcome::div(), Outcome::conv(s)}) {
      // P-While -> P-While2 -> (P-Skip, P-While3 -> back to the root)
      DerivationGraph g;
      g.system = ProofSystem::PrettyCo;
      g.add(PrettyJudgment{SemCmd::plain(w), {}, {}, o, {}}, "P-While", {1, 2});
      g.add(ExprJudgment{Expr::nat(1), {}, {}, Val::nat(1), {}}, "E-Val");
      g.add(PrettyJudgment{SemCmd::while2(Val::nat(1), Expr::nat(1), Cmd::skip()), {}, {}, o, {}},
            "P-While2", {3, 4});
      g.add(PrettyJudgment{SemCmd::plain(Cmd::skip()), {}, {}, Outcome::conv({}), {}}, "P-Skip");
      g.add(PrettyJudgment{SemCmd::while3(Outcome::conv({}), Expr::nat(1), Cmd::skip()), {}, {}, o,
                           {}},
            "P-While3", {0});
      auto r = check_derivation_graph(g, ProofSystem::PrettyCo);
      CAPTURE(r.diagnostic);
      CHECK(r.ok);
    }
}

TEST_CASE("lassos replay") {
  std::size_t found = 0;
  for_programs(23, [&](const Cmd& c, const InputStream& in) {
    if (uses_exceptions(c)) return;
    auto l = detect_lasso({c, {}, in}, 500);
    if (!l) return;
    ++found;
    CHECK(check_lasso(*l).ok);
    replay(*l);
  });
  CHECK(found > 20);
}

TEST_CASE("a graph exists exactly when a lasso does") {
  for_programs(24, [](const Cmd& c, const InputStream& in) {
    if (uses_exceptions(c)) return;
    bool lasso = detect_lasso({c, {}, in}, 300).has_value();
    for (auto sys : {ProofSystem::DivPred, ProofSystem::PrettyCo, ProofSystem::FlagCo}) {
      auto g = prove_divergence(c, {}, in, sys, 300);
      CHECK(g.has_value() == lasso);
      if (g) CHECK(check_derivation_graph(*g, sys).ok);
    }
  });
}

TEST_CASE("diverging verdicts carry valid certificates") {
  for_programs(25, [](const Cmd& c, const InputStream& in) {
    auto v = classify(c, {}, in, 300);
    if (auto* d = std::get_if<DivergesProven>(&v)) {
      REQUIRE(d->certificate);
      CHECK(check_certificate(*d->certificate).ok);
    }
  });
}

}  // TEST_SUITE

TEST_SUITE("syntax") {

TEST_CASE("parse and pretty round trip") {
  for_programs(31, [](const Cmd& c, const InputStream&) {
    auto text = pretty_cmd(c);
    CHECK(parse_cmd(text) == c);
    CHECK(pretty_cmd(parse_cmd(text)) == text);
  });
}

}  // TEST_SUITE
