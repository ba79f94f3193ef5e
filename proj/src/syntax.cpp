#include "whilesos/syntax.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace whilesos {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_val(const Val& v) {
  return v.is_null() ? 0x51ed27 : std::hash<std::uint64_t>{}(v.as_nat()) * 31 + 7;
}

}  // namespace

std::uint64_t apply_binop(BinOp op, std::uint64_t lhs, std::uint64_t rhs) {
  switch (op) {
    case BinOp::Add:
      return lhs + rhs;
    case BinOp::Sub:
      return lhs > rhs ? lhs - rhs : 0;
    case BinOp::Mul:
      return lhs * rhs;
  }
  return 0;
}

const char* binop_symbol(BinOp op) {
  switch (op) {
    case BinOp::Add:
      return "+";
    case BinOp::Sub:
      return "-";
    case BinOp::Mul:
      return "*";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
  Kind kind;
  Val value;
  std::string name;
  BinOp op = BinOp::Add;
  std::optional<Expr> lhs, rhs;
  std::size_t hash = 0;
};

Expr Expr::lit(Val v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lit;
  n->value = v;
  n->hash = mix(1, hash_val(v));
  return Expr(std::move(n));
}

Expr Expr::var(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty identifier");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->hash = mix(2, std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::bop(BinOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bop;
  n->op = op;
  n->hash = mix(mix(mix(3, static_cast<std::size_t>(op)), lhs.hash()), rhs.hash());
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::input() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Input;
    n->hash = 0x1a2b3c;
    return n;
  }();
  return Expr(node);
}

Expr::Kind Expr::kind() const { return node_->kind; }
const Val& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
BinOp Expr::op() const { return node_->op; }
const Expr& Expr::lhs() const { return *node_->lhs; }
const Expr& Expr::rhs() const { return *node_->rhs; }
std::size_t Expr::hash() const { return node_->hash; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Lit:
      return a.value() == b.value();
    case Expr::Kind::Var:
      return a.name() == b.name();
    case Expr::Kind::Bop:
      return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case Expr::Kind::Input:
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Cmd

struct Cmd::Node {
  Kind kind = Kind::Skip;
  std::string var;
  std::optional<Expr> expr;
  std::optional<Cmd> left, right;
  Val thrown;
  std::size_t hash = 0;
};

Cmd::Cmd() {
  static const std::shared_ptr<const Node> skip = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Skip;
    n->hash = 0x5c1f;
    return n;
  }();
  node_ = skip;
}

namespace {
void check_ident(const std::string& x) {
  if (x.empty()) throw std::invalid_argument("empty identifier");
}
}  // namespace

Cmd Cmd::alloc(std::string var) {
  check_ident(var);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Alloc;
  n->hash = mix(11, std::hash<std::string>{}(var));
  n->var = std::move(var);
  return Cmd(std::move(n));
}

Cmd Cmd::assign(std::string var, Expr e) {
  check_ident(var);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Assign;
  n->hash = mix(mix(12, std::hash<std::string>{}(var)), e.hash());
  n->var = std::move(var);
  n->expr = std::move(e);
  return Cmd(std::move(n));
}

Cmd Cmd::seq(Cmd first, Cmd second) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Seq;
  n->hash = mix(mix(13, first.hash()), second.hash());
  n->left = std::move(first);
  n->right = std::move(second);
  return Cmd(std::move(n));
}

Cmd Cmd::seq(std::initializer_list<Cmd> cmds) {
  if (cmds.size() == 0) return Cmd();
  auto it = cmds.end();
  Cmd acc = *--it;
  while (it != cmds.begin()) acc = seq(*--it, acc);
  return acc;
}

Cmd Cmd::if_(Expr guard, Cmd then_branch, Cmd else_branch) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::If;
  n->hash = mix(mix(mix(14, guard.hash()), then_branch.hash()), else_branch.hash());
  n->expr = std::move(guard);
  n->left = std::move(then_branch);
  n->right = std::move(else_branch);
  return Cmd(std::move(n));
}

Cmd Cmd::while_(Expr guard, Cmd body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::While;
  n->hash = mix(mix(15, guard.hash()), body.hash());
  n->expr = std::move(guard);
  n->left = std::move(body);
  return Cmd(std::move(n));
}

Cmd Cmd::throw_(Val v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Throw;
  n->thrown = v;
  n->hash = mix(16, hash_val(v));
  return Cmd(std::move(n));
}

Cmd Cmd::catch_(Cmd body, Cmd handler) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Catch;
  n->hash = mix(mix(17, body.hash()), handler.hash());
  n->left = std::move(body);
  n->right = std::move(handler);
  return Cmd(std::move(n));
}

Cmd::Kind Cmd::kind() const { return node_->kind; }
const std::string& Cmd::var() const { return node_->var; }
const Expr& Cmd::expr() const { return *node_->expr; }
const Cmd& Cmd::left() const { return *node_->left; }
const Cmd& Cmd::right() const { return *node_->right; }
const Val& Cmd::thrown() const { return node_->thrown; }
std::size_t Cmd::hash() const { return node_->hash; }

bool operator==(const Cmd& a, const Cmd& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Cmd::Kind::Skip:
      return true;
    case Cmd::Kind::Alloc:
      return a.var() == b.var();
    case Cmd::Kind::Assign:
      return a.var() == b.var() && a.expr() == b.expr();
    case Cmd::Kind::Seq:
    case Cmd::Kind::Catch:
      return a.left() == b.left() && a.right() == b.right();
    case Cmd::Kind::If:
      return a.expr() == b.expr() && a.left() == b.left() && a.right() == b.right();
    case Cmd::Kind::While:
      return a.expr() == b.expr() && a.left() == b.left();
    case Cmd::Kind::Throw:
      return a.thrown() == b.thrown();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Stores and streams

Store store_update(const Store& s, const std::string& x, Val v) {
  Store out = s;
  out[x] = v;
  return out;
}

std::optional<Val> store_lookup(const Store& s, const std::string& x) {
  auto it = s.find(x);
  if (it == s.end()) return std::nullopt;
  return it->second;
}

std::size_t hash_store(const Store& s) {
  std::size_t h = 0x570e;
  for (const auto& [k, v] : s) h = mix(mix(h, std::hash<std::string>{}(k)), hash_val(v));
  return h;
}

InputStream::InputStream(std::vector<Val> values)
    : values_(std::make_shared<const std::vector<Val>>(std::move(values))) {}

const std::vector<Val>& InputStream::values() const {
  static const std::vector<Val> empty;
  return values_ ? *values_ : empty;
}

bool InputStream::exhausted() const { return cursor_ >= values().size(); }

std::span<const Val> InputStream::remaining() const {
  const auto& v = values();
  return std::span<const Val>(v).subspan(std::min(cursor_, v.size()));
}

std::optional<std::pair<Val, InputStream>> InputStream::pop() const {
  if (exhausted()) return std::nullopt;
  InputStream next = *this;
  ++next.cursor_;
  return std::make_pair(values()[cursor_], next);
}

std::size_t InputStream::hash() const {
  std::size_t h = 0x1e9;
  for (const Val& v : remaining()) h = mix(h, hash_val(v));
  return h;
}

bool operator==(const InputStream& a, const InputStream& b) {
  auto ra = a.remaining();
  auto rb = b.remaining();
  return std::equal(ra.begin(), ra.end(), rb.begin(), rb.end());
}

// ---------------------------------------------------------------------------
// Semantic commands

SemCmd SemCmd::plain(Cmd c) {
  SemCmd s;
  s.kind = Kind::Plain;
  s.cmd = std::move(c);
  return s;
}

SemCmd SemCmd::assign2(std::string x, Val v) {
  SemCmd s;
  s.kind = Kind::Assign2;
  s.var = std::move(x);
  s.value = v;
  return s;
}

SemCmd SemCmd::seq2(Outcome o, Cmd c) {
  SemCmd s;
  s.kind = Kind::Seq2;
  s.outcome = std::move(o);
  s.cmd = std::move(c);
  return s;
}

SemCmd SemCmd::if2(Val v, Cmd c1, Cmd c2) {
  SemCmd s;
  s.kind = Kind::If2;
  s.value = v;
  s.cmd = std::move(c1);
  s.alt = std::move(c2);
  return s;
}

SemCmd SemCmd::while2(Val v, Expr e, Cmd c) {
  SemCmd s;
  s.kind = Kind::While2;
  s.value = v;
  s.guard = std::move(e);
  s.cmd = std::move(c);
  return s;
}

SemCmd SemCmd::while3(Outcome o, Expr e, Cmd c) {
  SemCmd s;
  s.kind = Kind::While3;
  s.outcome = std::move(o);
  s.guard = std::move(e);
  s.cmd = std::move(c);
  return s;
}

const char* verdict_class(const Verdict& v) {
  struct {
    const char* operator()(const Converged&) const { return "Converged"; }
    const char* operator()(const ExceptionV&) const { return "Exception"; }
    const char* operator()(const Stuck&) const { return "Stuck"; }
    const char* operator()(const DivergesProven&) const { return "DivergesProven"; }
    const char* operator()(const Unknown&) const { return "Unknown"; }
  } name;
  return std::visit(name, v);
}

Cmd fac_program(std::uint64_t n) {
  const Expr c = Expr::var("c");
  const Expr r = Expr::var("r");
  return Cmd::seq({
      Cmd::alloc("c"),
      Cmd::assign("c", Expr::nat(n)),
      Cmd::alloc("r"),
      Cmd::assign("r", Expr::nat(1)),
      Cmd::while_(c, Cmd::seq(Cmd::assign("r", Expr::bop(BinOp::Mul, r, c)),
                              Cmd::assign("c", Expr::bop(BinOp::Sub, c, Expr::nat(1))))),
  });
}

bool uses_input(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Input:
      return true;
    case Expr::Kind::Bop:
      return uses_input(e.lhs()) || uses_input(e.rhs());
    default:
      return false;
  }
}

bool uses_input(const Cmd& c) {
  switch (c.kind()) {
    case Cmd::Kind::Assign:
      return uses_input(c.expr());
    case Cmd::Kind::Seq:
    case Cmd::Kind::Catch:
      return uses_input(c.left()) || uses_input(c.right());
    case Cmd::Kind::If:
      return uses_input(c.expr()) || uses_input(c.left()) || uses_input(c.right());
    case Cmd::Kind::While:
      return uses_input(c.expr()) || uses_input(c.left());
    default:
      return false;
  }
}

bool uses_exceptions(const Cmd& c) {
  switch (c.kind()) {
    case Cmd::Kind::Throw:
    case Cmd::Kind::Catch:
      return true;
    case Cmd::Kind::Seq:
    case Cmd::Kind::If:
      return uses_exceptions(c.left()) || uses_exceptions(c.right());
    case Cmd::Kind::While:
      return uses_exceptions(c.left());
    default:
      return false;
  }
}

bool uses_while(const Cmd& c) {
  switch (c.kind()) {
    case Cmd::Kind::While:
      return true;
    case Cmd::Kind::Seq:
    case Cmd::Kind::If:
    case Cmd::Kind::Catch:
      return uses_while(c.left()) || uses_while(c.right());
    default:
      return false;
  }
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Var:
      out.insert(e.name());
      break;
    case Expr::Kind::Bop:
      collect_vars(e.lhs(), out);
      collect_vars(e.rhs(), out);
      break;
    default:
      break;
  }
}

std::size_t cmd_size(const Cmd& c) {
  switch (c.kind()) {
    case Cmd::Kind::Seq:
    case Cmd::Kind::If:
    case Cmd::Kind::Catch:
      return 1 + cmd_size(c.left()) + cmd_size(c.right());
    case Cmd::Kind::While:
      return 1 + cmd_size(c.left());
    default:
      return 1;
  }
}

}  // namespace whilesos
