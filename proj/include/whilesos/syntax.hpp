#pragma once

// Abstract syntax of the While language (with input, throw and catch),
// stores, input streams, status flags, outcomes and semantic commands.
//
// Every type here is an immutable value. Expr and Cmd share subtrees through
// reference-counted nodes, so copying them is cheap and they may be handed to
// other threads freely.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace whilesos {

/// A value: `null` or a natural number. Arithmetic is modulo 2^64.
class Val {
 public:
  constexpr Val() = default;
  static constexpr Val null() { return Val(); }
  static constexpr Val nat(std::uint64_t n) { return Val(n); }

  constexpr bool is_null() const { return null_; }
  constexpr bool is_nat() const { return !null_; }
  constexpr std::uint64_t as_nat() const { return n_; }
  /// True for `0` only; `null` counts as non-zero in guards.
  constexpr bool is_zero() const { return !null_ && n_ == 0; }

  friend constexpr bool operator==(const Val&, const Val&) = default;
  friend constexpr auto operator<=>(const Val&, const Val&) = default;

 private:
  constexpr explicit Val(std::uint64_t n) : null_(false), n_(n) {}
  bool null_ = true;
  std::uint64_t n_ = 0;
};

enum class BinOp { Add, Sub, Mul };

/// Applies a binary operator; subtraction is truncated at zero.
std::uint64_t apply_binop(BinOp op, std::uint64_t lhs, std::uint64_t rhs);
const char* binop_symbol(BinOp op);

class Expr {
 public:
  enum class Kind { Lit, Var, Bop, Input };

  static Expr lit(Val v);
  static Expr nat(std::uint64_t n) { return lit(Val::nat(n)); }
  static Expr var(std::string name);
  static Expr bop(BinOp op, Expr lhs, Expr rhs);
  static Expr input();

  Kind kind() const;
  const Val& value() const;
  const std::string& name() const;
  BinOp op() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  std::size_t hash() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

class Cmd {
 public:
  enum class Kind { Skip, Alloc, Assign, Seq, If, While, Throw, Catch };

  Cmd();  // skip
  static Cmd skip() { return Cmd(); }
  static Cmd alloc(std::string var);
  static Cmd assign(std::string var, Expr e);
  static Cmd seq(Cmd first, Cmd second);
  /// Right-nested sequence; an empty list yields skip.
  static Cmd seq(std::initializer_list<Cmd> cmds);
  static Cmd if_(Expr guard, Cmd then_branch, Cmd else_branch);
  static Cmd while_(Expr guard, Cmd body);
  static Cmd throw_(Val v);
  static Cmd catch_(Cmd body, Cmd handler);

  Kind kind() const;
  bool is_skip() const { return kind() == Kind::Skip; }

  // Alloc, Assign
  const std::string& var() const;
  // Assign, If, While
  const Expr& expr() const;
  // Seq: first; If: then; While: body; Catch: body
  const Cmd& left() const;
  // Seq: second; If: else; Catch: handler
  const Cmd& right() const;
  // Throw
  const Val& thrown() const;

  std::size_t hash() const;
  friend bool operator==(const Cmd& a, const Cmd& b);

 private:
  struct Node;
  explicit Cmd(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

using Store = std::map<std::string, Val>;

/// sigma[x |-> v]; the argument is left untouched.
Store store_update(const Store& s, const std::string& x, Val v);
std::optional<Val> store_lookup(const Store& s, const std::string& x);
std::size_t hash_store(const Store& s);

/// A finite sequence of values consumed left to right by `input`.
class InputStream {
 public:
  InputStream() = default;
  explicit InputStream(std::vector<Val> values);

  bool exhausted() const;
  std::size_t cursor() const { return cursor_; }
  std::span<const Val> remaining() const;
  const std::vector<Val>& values() const;
  /// The next value and the stream after it, or nullopt when exhausted.
  std::optional<std::pair<Val, InputStream>> pop() const;
  std::size_t hash() const;

  /// Streams are equal when their unread suffixes are equal.
  friend bool operator==(const InputStream& a, const InputStream& b);

 private:
  std::shared_ptr<const std::vector<Val>> values_;
  std::size_t cursor_ = 0;
};

/// Status flag of the flag-based semantics: down, up, or exc(v, sigma).
class Status {
 public:
  enum class Kind { Down, Up, Exc };

  static Status down() { return Status(Kind::Down); }
  static Status up() { return Status(Kind::Up); }
  static Status exc(Val v, Store at) { return Status(Kind::Exc, v, std::move(at)); }

  Kind kind() const { return kind_; }
  bool is_down() const { return kind_ == Kind::Down; }
  bool is_up() const { return kind_ == Kind::Up; }
  bool is_exc() const { return kind_ == Kind::Exc; }
  const Val& thrown() const { return thrown_; }
  const Store& at() const { return at_; }

  friend bool operator==(const Status&, const Status&) = default;

 private:
  explicit Status(Kind k, Val v = Val::null(), Store at = {})
      : kind_(k), thrown_(v), at_(std::move(at)) {}
  Kind kind_;
  Val thrown_;
  Store at_;
};

/// Pretty-big-step outcome: conv sigma | div.
class Outcome {
 public:
  static Outcome conv(Store s) { return Outcome(false, std::move(s)); }
  static Outcome div() { return Outcome(true, {}); }

  bool is_div() const { return div_; }
  bool is_conv() const { return !div_; }
  const Store& store() const { return store_; }

  friend bool operator==(const Outcome&, const Outcome&) = default;

 private:
  Outcome(bool d, Store s) : div_(d), store_(std::move(s)) {}
  bool div_;
  Store store_;
};

/// Commands extended with the intermediate forms used by pretty-big-step.
struct SemCmd {
  enum class Kind { Plain, Assign2, Seq2, If2, While2, While3 };

  Kind kind = Kind::Plain;
  Cmd cmd;                  // Plain; Seq2 continuation; If2 then; While2/While3 body
  Cmd alt;                  // If2 else
  std::string var;          // Assign2
  Val value;                // Assign2, If2, While2
  Expr guard = Expr::nat(0);  // While2, While3
  Outcome outcome = Outcome::div();  // Seq2, While3

  static SemCmd plain(Cmd c);
  static SemCmd assign2(std::string x, Val v);
  static SemCmd seq2(Outcome o, Cmd c);
  static SemCmd if2(Val v, Cmd c1, Cmd c2);
  static SemCmd while2(Val v, Expr e, Cmd c);
  static SemCmd while3(Outcome o, Expr e, Cmd c);

  friend bool operator==(const SemCmd&, const SemCmd&) = default;
};

struct Certificate;  // defined in coinduction.hpp

/// Five-valued result of running a program under some semantics.
struct Converged {
  Store store;
  friend bool operator==(const Converged&, const Converged&) = default;
};
struct ExceptionV {
  Val value;
  Store store;
  friend bool operator==(const ExceptionV&, const ExceptionV&) = default;
};
struct Stuck {
  std::string reason;
};
struct DivergesProven {
  std::shared_ptr<const Certificate> certificate;
  std::string summary;
};
struct Unknown {
  std::uint64_t fuel = 0;
};
using Verdict = std::variant<Converged, ExceptionV, Stuck, DivergesProven, Unknown>;

const char* verdict_class(const Verdict& v);

/// alloc c; c := n; alloc r; r := 1; while c { r := r * c; c := c - 1 }
Cmd fac_program(std::uint64_t n);

// Syntactic queries used by the harness and the abstraction check.
bool uses_input(const Cmd& c);
bool uses_input(const Expr& e);
bool uses_exceptions(const Cmd& c);
bool uses_while(const Cmd& c);
void collect_vars(const Expr& e, std::set<std::string>& out);
std::size_t cmd_size(const Cmd& c);

}  // namespace whilesos

template <>
struct std::hash<whilesos::Cmd> {
  std::size_t operator()(const whilesos::Cmd& c) const noexcept { return c.hash(); }
};
template <>
struct std::hash<whilesos::Expr> {
  std::size_t operator()(const whilesos::Expr& e) const noexcept { return e.hash(); }
};
