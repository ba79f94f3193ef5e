#include <doctest.h>

#include <limits>

#include "support.hpp"
#include "whilesos/harness.hpp"
#include "whilesos/parser.hpp"
#include "whilesos/syntax.hpp"

using namespace whilesos;

TEST_SUITE("syntax") {

TEST_CASE("store update") {
  CHECK(store_update({}, "x", Val::nat(3)) == Store{{"x", Val::nat(3)}});
  CHECK(store_update({{"x", Val::nat(3)}}, "x", Val::null()) == Store{{"x", Val::null()}});
  Store s{{"x", Val::nat(1)}, {"y", Val::nat(2)}};
  CHECK(store_update(s, "y", Val::nat(9)) == Store{{"x", Val::nat(1)}, {"y", Val::nat(9)}});
  // original untouched
  CHECK(s.at("y") == Val::nat(2));
}

TEST_CASE("arithmetic wraps and subtraction truncates") {
  const auto max = std::numeric_limits<std::uint64_t>::max();
  CHECK(apply_binop(BinOp::Add, max, 1) == 0);
  CHECK(apply_binop(BinOp::Sub, 2, 5) == 0);
  CHECK(apply_binop(BinOp::Sub, 5, 2) == 3);
  CHECK(apply_binop(BinOp::Mul, 6, 7) == 42);
}

TEST_CASE("null is not zero") {
  CHECK(Val::nat(0).is_zero());
  CHECK_FALSE(Val::null().is_zero());
  CHECK_FALSE(Val::nat(1).is_zero());
}

TEST_CASE("streams compare by unread suffix") {
  auto s = InputStream({Val::nat(1), Val::nat(2)});
  auto [v, rest] = *s.pop();
  CHECK(v == Val::nat(1));
  CHECK(rest == InputStream({Val::nat(2)}));
  CHECK(rest.cursor() == 1);
  CHECK(InputStream() == rest.pop()->second);
  CHECK_FALSE(InputStream().pop().has_value());
}

TEST_CASE("fac_program shape") {
  CHECK(pretty_cmd(fac_program(4)) ==
        "alloc c; c := 4; alloc r; r := 1; while c { r := r * c; c := c - 1 }");
}

}  // TEST_SUITE

TEST_SUITE("parser") {

TEST_CASE("parses the sample commands") {
  CHECK(parse_cmd("skip; skip") == Cmd::seq(Cmd::skip(), Cmd::skip()));
  CHECK(parse_cmd("while 1 { skip }") == Cmd::while_(Expr::nat(1), Cmd::skip()));
  auto loop = Cmd::seq(
      Cmd::alloc("x"),
      Cmd::seq(Cmd::assign("x", Expr::nat(0)),
               Cmd::while_(Expr::nat(1),
                           Cmd::assign("x", Expr::bop(BinOp::Add, Expr::var("x"), Expr::nat(1))))));
  CHECK(parse_cmd("alloc x; x := 0; while 1 { x := x + 1 }") == loop);
}

TEST_CASE("sequence is right-nested") {
  auto c = parse_cmd("skip; alloc x; alloc y");
  REQUIRE(c.kind() == Cmd::Kind::Seq);
  CHECK(c.left().is_skip());
  CHECK(c.right().kind() == Cmd::Kind::Seq);
}

TEST_CASE("precedence") {
  auto e = parse_expr("1 + 2 * x - 3");
  // (1 + (2 * x)) - 3
  REQUIRE(e.kind() == Expr::Kind::Bop);
  CHECK(e.op() == BinOp::Sub);
  CHECK(e.lhs().op() == BinOp::Add);
  CHECK(e.lhs().rhs().op() == BinOp::Mul);
}

TEST_CASE("exceptions and comments") {
  auto c = parse_cmd("# header\ntry { throw 7 } catch { skip } # tail\n");
  REQUIRE(c.kind() == Cmd::Kind::Catch);
  CHECK(c.left() == Cmd::throw_(Val::nat(7)));
  CHECK(parse_cmd("throw null") == Cmd::throw_(Val::null()));
}

TEST_CASE("pretty printing") {
  CHECK(pretty_cmd(Cmd::skip()) == "skip");
  CHECK(pretty_cmd(Cmd::while_(Expr::nat(1), Cmd::skip())) == "while 1 { skip }");
  CHECK(pretty_expr(parse_expr("(1 + 2) * 3")) == "(1 + 2) * 3");
  CHECK(pretty_expr(parse_expr("1 - (2 - 3)")) == "1 - (2 - 3)");
  CHECK(pretty_store(parse_store("{r |-> 24, c ↦ 0}")) == "{c↦0, r↦24}");
  CHECK(pretty_stream(parse_stream("1,0,null")) == "[1,0,null]");
}

TEST_CASE("parse errors carry positions inside the text") {
  const char* bad[] = {"while 1 skip", "x := ", "if 1 { skip }", "alloc", "skip;;", "{ skip",
                       "x := 1 +* 2", "throw x", "try { skip }", "alloc while", "@"};
  for (const char* text : bad) {
    CAPTURE(text);
    std::string s = text;
    try {
      parse_cmd(s);
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(e.offset() <= s.size());
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
  }
}

TEST_CASE("error line and column") {
  try {
    parse_cmd("skip;\nx := @");
    FAIL("accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 6);
  }
}

TEST_CASE("round trip over generated programs") {
  GenConfig cfg;
  cfg.input = true;
  cfg.exceptions = true;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Cmd c = generate_program(cfg, i);
    auto text = pretty_cmd(c);
    CAPTURE(text);
    CHECK(parse_cmd(text) == c);
  }
}

TEST_CASE("shipped programs parse") {
  for (const auto& entry : std::filesystem::directory_iterator(testing::programs_dir())) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(testing::program(entry.path().filename().string()));
  }
}

}  // TEST_SUITE
