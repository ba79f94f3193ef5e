#include "whilesos/parser.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

namespace whilesos {

ParseError::ParseError(std::string message, std::size_t offset, std::size_t line,
                       std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(std::move(message)),
      offset_(offset),
      line_(line),
      column_(column) {}

namespace {

constexpr std::array<std::string_view, 10> kReserved = {
    "skip", "alloc", "if", "else", "while", "throw", "try", "catch", "input", "null"};

enum class Tok { Ident, Nat, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, offset, line, col);
  }

  std::string_view source() const { return src_; }

 private:
  void advance() {
    skip_blank();
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    const char ch = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Tok::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      tok_.kind = Tok::Nat;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    static constexpr std::array<std::string_view, 3> multi = {":=", "|->", "\xE2\x86\xA6"};
    for (std::string_view m : multi) {
      if (src_.substr(pos_, m.size()) == m) {
        pos_ += m.size();
        tok_.kind = Tok::Sym;
        tok_.text = m == "\xE2\x86\xA6" ? "|->" : std::string(m);
        return;
      }
    }
    if (std::string_view("+-*(){};,").find(ch) != std::string_view::npos) {
      ++pos_;
      tok_.kind = Tok::Sym;
      tok_.text = std::string(1, ch);
      return;
    }
    fail(std::string("unexpected character '") + ch + "'", pos_);
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char ch = src_[pos_];
      if (ch == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Cmd program() {
    Cmd c = seq();
    expect_end();
    return c;
  }

  Expr whole_expr() {
    Expr e = expr();
    expect_end();
    return e;
  }

  Val whole_value() {
    Val v = value();
    expect_end();
    return v;
  }

  InputStream whole_stream() {
    std::vector<Val> vals;
    if (lex_.peek().kind != Tok::End) {
      vals.push_back(value());
      while (accept(",")) vals.push_back(value());
    }
    expect_end();
    return InputStream(std::move(vals));
  }

  Store whole_store() {
    Store s;
    expect("{");
    if (!accept("}")) {
      do {
        std::string x = ident();
        expect("|->");
        if (s.count(x)) lex_.fail("duplicate store binding for '" + x + "'", lex_.peek().offset);
        s[x] = value();
      } while (accept(","));
      expect("}");
    }
    expect_end();
    return s;
  }

 private:
  bool is_sym(std::string_view s) const {
    return lex_.peek().kind == Tok::Sym && lex_.peek().text == s;
  }
  bool is_kw(std::string_view s) const {
    return lex_.peek().kind == Tok::Ident && lex_.peek().text == s;
  }
  bool accept(std::string_view s) {
    if (!is_sym(s)) return false;
    lex_.next();
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) lex_.fail("expected '" + std::string(s) + "'" + found(), lex_.peek().offset);
  }
  void expect_kw(std::string_view s) {
    if (!is_kw(s)) lex_.fail("expected '" + std::string(s) + "'" + found(), lex_.peek().offset);
    lex_.next();
  }
  void expect_end() {
    if (lex_.peek().kind != Tok::End)
      lex_.fail("unexpected trailing input" + found(), lex_.peek().offset);
  }
  std::string found() const {
    const Token& t = lex_.peek();
    if (t.kind == Tok::End) return ", found end of input";
    return ", found '" + t.text + "'";
  }

  std::string ident() {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Ident) lex_.fail("expected identifier" + found(), t.offset);
    if (is_reserved_word(t.text))
      lex_.fail("reserved word '" + t.text + "' cannot be an identifier", t.offset);
    return lex_.next().text;
  }

  std::uint64_t nat() {
    const Token t = lex_.next();
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      lex_.fail("natural number out of range", t.offset);
    return n;
  }

  Val value() {
    if (lex_.peek().kind == Tok::Nat) return Val::nat(nat());
    if (is_kw("null")) {
      lex_.next();
      return Val::null();
    }
    lex_.fail("expected a value" + found(), lex_.peek().offset);
  }

  bool at_seq_end() const { return lex_.peek().kind == Tok::End || is_sym("}"); }

  Cmd seq() {
    Cmd first = stmt();
    if (accept(";")) {
      if (at_seq_end()) return first;
      return Cmd::seq(first, seq());
    }
    return first;
  }

  Cmd block() {
    expect("{");
    Cmd c = seq();
    expect("}");
    return c;
  }

  Cmd stmt() {
    const Token& t = lex_.peek();
    if (is_sym("{")) return block();
    if (t.kind != Tok::Ident) lex_.fail("expected a command" + found(), t.offset);
    if (t.text == "skip") {
      lex_.next();
      return Cmd::skip();
    }
    if (t.text == "alloc") {
      lex_.next();
      return Cmd::alloc(ident());
    }
    if (t.text == "if") {
      lex_.next();
      Expr guard = expr();
      Cmd then_branch = block();
      expect_kw("else");
      Cmd else_branch = block();
      return Cmd::if_(guard, then_branch, else_branch);
    }
    if (t.text == "while") {
      lex_.next();
      Expr guard = expr();
      return Cmd::while_(guard, block());
    }
    if (t.text == "throw") {
      lex_.next();
      return Cmd::throw_(value());
    }
    if (t.text == "try") {
      lex_.next();
      Cmd body = block();
      expect_kw("catch");
      return Cmd::catch_(body, block());
    }
    std::string x = ident();
    expect(":=");
    return Cmd::assign(x, expr());
  }

  Expr expr() {
    Expr acc = term();
    while (true) {
      if (accept("+")) {
        acc = Expr::bop(BinOp::Add, acc, term());
      } else if (accept("-")) {
        acc = Expr::bop(BinOp::Sub, acc, term());
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = atom();
    while (accept("*")) acc = Expr::bop(BinOp::Mul, acc, atom());
    return acc;
  }

  Expr atom() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Nat) return Expr::nat(nat());
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (is_kw("null")) {
      lex_.next();
      return Expr::lit(Val::null());
    }
    if (is_kw("input")) {
      lex_.next();
      return Expr::input();
    }
    if (t.kind == Tok::Ident) return Expr::var(ident());
    lex_.fail("expected an expression" + found(), t.offset);
  }

  Lexer lex_;
};

int precedence(const Expr& e) {
  if (e.kind() != Expr::Kind::Bop) return 3;
  return e.op() == BinOp::Mul ? 2 : 1;
}

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Lit:
      os << pretty_val(e.value());
      return;
    case Expr::Kind::Var:
      os << e.name();
      return;
    case Expr::Kind::Input:
      os << "input";
      return;
    case Expr::Kind::Bop: {
      const int p = precedence(e);
      const bool wrap_l = precedence(e.lhs()) < p;
      const bool wrap_r = precedence(e.rhs()) <= p;
      if (wrap_l) os << '(';
      print_expr(os, e.lhs());
      if (wrap_l) os << ')';
      os << ' ' << binop_symbol(e.op()) << ' ';
      if (wrap_r) os << '(';
      print_expr(os, e.rhs());
      if (wrap_r) os << ')';
      return;
    }
  }
}

void print_cmd(std::ostream& os, const Cmd& c) {
  switch (c.kind()) {
    case Cmd::Kind::Skip:
      os << "skip";
      return;
    case Cmd::Kind::Alloc:
      os << "alloc " << c.var();
      return;
    case Cmd::Kind::Assign:
      os << c.var() << " := ";
      print_expr(os, c.expr());
      return;
    case Cmd::Kind::Seq:
      if (c.left().kind() == Cmd::Kind::Seq) {
        os << "{ ";
        print_cmd(os, c.left());
        os << " }";
      } else {
        print_cmd(os, c.left());
      }
      os << "; ";
      print_cmd(os, c.right());
      return;
    case Cmd::Kind::If:
      os << "if ";
      print_expr(os, c.expr());
      os << " { ";
      print_cmd(os, c.left());
      os << " } else { ";
      print_cmd(os, c.right());
      os << " }";
      return;
    case Cmd::Kind::While:
      os << "while ";
      print_expr(os, c.expr());
      os << " { ";
      print_cmd(os, c.left());
      os << " }";
      return;
    case Cmd::Kind::Throw:
      os << "throw " << pretty_val(c.thrown());
      return;
    case Cmd::Kind::Catch:
      os << "try { ";
      print_cmd(os, c.left());
      os << " } catch { ";
      print_cmd(os, c.right());
      os << " }";
      return;
  }
}

}  // namespace

bool is_reserved_word(std::string_view word) {
  for (std::string_view r : kReserved)
    if (r == word) return true;
  return false;
}

Cmd parse_cmd(std::string_view text) { return Parser(text).program(); }
Expr parse_expr(std::string_view text) { return Parser(text).whole_expr(); }
Val parse_value(std::string_view text) { return Parser(text).whole_value(); }
InputStream parse_stream(std::string_view text) { return Parser(text).whole_stream(); }
Store parse_store(std::string_view text) { return Parser(text).whole_store(); }

std::string pretty_cmd(const Cmd& c) {
  std::ostringstream os;
  print_cmd(os, c);
  return os.str();
}

std::string pretty_expr(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string pretty_val(const Val& v) {
  return v.is_null() ? "null" : std::to_string(v.as_nat());
}

std::string pretty_store(const Store& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (!first) out += ", ";
    first = false;
    out += k + "\xE2\x86\xA6" + pretty_val(v);
  }
  return out + "}";
}

std::string pretty_stream(const InputStream& s) {
  std::string out = "[";
  bool first = true;
  for (const Val& v : s.remaining()) {
    if (!first) out += ",";
    first = false;
    out += pretty_val(v);
  }
  return out + "]";
}

std::string pretty_outcome(const Outcome& o) {
  return o.is_div() ? "div" : "conv " + pretty_store(o.store());
}

std::string pretty_status(const Status& s) {
  switch (s.kind()) {
    case Status::Kind::Down:
      return "\xE2\x87\x93";
    case Status::Kind::Up:
      return "\xE2\x87\x91";
    case Status::Kind::Exc:
      return "exc(" + pretty_val(s.thrown()) + ", " + pretty_store(s.at()) + ")";
  }
  return "?";
}

std::string pretty_semcmd(const SemCmd& c) {
  switch (c.kind) {
    case SemCmd::Kind::Plain:
      return pretty_cmd(c.cmd);
    case SemCmd::Kind::Assign2:
      return "assign2 " + c.var + " " + pretty_val(c.value);
    case SemCmd::Kind::Seq2:
      return "seq2 (" + pretty_outcome(c.outcome) + ") { " + pretty_cmd(c.cmd) + " }";
    case SemCmd::Kind::If2:
      return "if2 " + pretty_val(c.value) + " { " + pretty_cmd(c.cmd) + " } { " +
             pretty_cmd(c.alt) + " }";
    case SemCmd::Kind::While2:
      return "while2 " + pretty_val(c.value) + " (" + pretty_expr(c.guard) + ") { " +
             pretty_cmd(c.cmd) + " }";
    case SemCmd::Kind::While3:
      return "while3 (" + pretty_outcome(c.outcome) + ") (" + pretty_expr(c.guard) + ") { " +
             pretty_cmd(c.cmd) + " }";
  }
  return "?";
}

}  // namespace whilesos

namespace whilesos {

std::string verdict_text(const Verdict& v) {
  std::string out = verdict_class(v);
  if (auto* c = std::get_if<Converged>(&v)) return out + " " + pretty_store(c->store);
  if (auto* e = std::get_if<ExceptionV>(&v))
    return out + " " + pretty_val(e->value) + " " + pretty_store(e->store);
  if (auto* s = std::get_if<Stuck>(&v)) return out + " (" + s->reason + ")";
  if (auto* d = std::get_if<DivergesProven>(&v)) return out + " (" + d->summary + ")";
  return out + " (fuel " + std::to_string(std::get<Unknown>(v).fuel) + ")";
}

}  // namespace whilesos
