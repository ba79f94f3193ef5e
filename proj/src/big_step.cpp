#include "whilesos/big_step.hpp"

#include <vector>

#include "whilesos/small_step.hpp"

namespace whilesos {

namespace {

struct StuckEx {
  std::string reason;
};
struct FuelEx {};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

class BigEval {
 public:
  BigEval(std::uint64_t fuel, bool record) : left_(fuel), record_(record) {}

  std::uint64_t used() const { return used_; }
  DerivationGraph& graph() { return g_; }

  // Evaluates c, updating s and in in place. Returns the node id when recording.
  std::size_t eval(const Cmd& c, Store& s, InputStream& in) {
    charge();
    Store s0;
    InputStream in0;
    if (record_) {
      s0 = s;
      in0 = in;
    }
    switch (c.kind()) {
      case Cmd::Kind::Skip:
        return node(c, s0, in0, s, in, "B-Skip", {});
      case Cmd::Kind::Alloc:
        if (s.count(c.var())) throw StuckEx{"alloc of allocated variable " + c.var()};
        s[c.var()] = Val::null();
        return node(c, s0, in0, s, in, "B-Alloc", {});
      case Cmd::Kind::Assign: {
        if (!s.count(c.var())) throw StuckEx{"assignment to unallocated " + c.var()};
        std::size_t e = expr_node(c.expr(), s, in);
        Val v = expr(c.expr(), s, in);
        s[c.var()] = v;
        return node(c, s0, in0, s, in, "B-Assign", {e});
      }
      case Cmd::Kind::Seq: {
        std::size_t p1 = eval(c.left(), s, in);
        std::size_t p2 = eval(c.right(), s, in);
        return node(c, s0, in0, s, in, "B-Seq", {p1, p2});
      }
      case Cmd::Kind::If: {
        std::size_t e = expr_node(c.expr(), s, in);
        Val v = expr(c.expr(), s, in);
        const bool zero = v.is_zero();
        std::size_t p = eval(zero ? c.right() : c.left(), s, in);
        return node(c, s0, in0, s, in, zero ? "B-IfZ" : "B-If", {e, p});
      }
      case Cmd::Kind::While:
        return loop(c, s, in, std::move(s0), std::move(in0));
      case Cmd::Kind::Throw:
      case Cmd::Kind::Catch:
        throw StuckEx{"no big-step rule for throw/catch"};
    }
    throw StuckEx{"bad command"};
  }

 private:
  struct Iter {
    Store s;
    InputStream in;
    std::size_t e, body;
  };

  // Iterates B-While unfoldings; nodes are linked back to front afterwards.
  std::size_t loop(const Cmd& w, Store& s, InputStream& in, Store s0, InputStream in0) {
    std::vector<Iter> iters;
    for (;;) {
      std::size_t e = expr_node(w.expr(), s, in);
      Val v = expr(w.expr(), s, in);
      if (v.is_zero()) {
        if (!record_) return kNone;
        std::size_t next = node(w, s0, in0, s, in, "B-WhileZ", {e});
        for (auto it = iters.rbegin(); it != iters.rend(); ++it)
          next = node(w, it->s, it->in, s, in, "B-While", {it->e, it->body, next});
        return next;
      }
      std::size_t body = eval(w.left(), s, in);
      if (record_) iters.push_back(Iter{std::move(s0), std::move(in0), e, body});
      charge();
      if (record_) {
        s0 = s;
        in0 = in;
      }
    }
  }

  void charge() {
    if (left_ == 0) throw FuelEx{};
    --left_;
    ++used_;
  }

  Val expr(const Expr& e, const Store& s, InputStream& in) {
    auto r = eval_expr(e, s, in);
    if (auto* st = std::get_if<ExprStuck>(&r)) throw StuckEx{st->reason};
    auto& v = std::get<ExprValue>(r);
    in = v.stream;
    return v.value;
  }

  std::size_t expr_node(const Expr& e, const Store& s, const InputStream& in) {
    if (!record_) return kNone;
    auto id = add_expr_tree(g_, e, s, in);
    return id ? *id : kNone;  // stuck is reported by expr()
  }

  std::size_t node(const Cmd& c, const Store& s0, const InputStream& in0, const Store& s,
                   const InputStream& in, const char* rule, std::vector<std::size_t> premises) {
    if (!record_) return kNone;
    return g_.add(BigJudgment{c, s0, in0, s, in}, rule, std::move(premises));
  }

  std::uint64_t left_;
  std::uint64_t used_ = 0;
  bool record_;
  DerivationGraph g_;
};

}  // namespace

std::optional<std::size_t> add_expr_tree(DerivationGraph& g, const Expr& e, const Store& s,
                                         const InputStream& in) {
  auto r = eval_expr(e, s, in);
  if (std::holds_alternative<ExprStuck>(r)) return std::nullopt;
  const auto& v = std::get<ExprValue>(r);
  ExprJudgment j{e, s, in, v.value, v.stream};
  switch (e.kind()) {
    case Expr::Kind::Lit:
      return g.add(std::move(j), "E-Val");
    case Expr::Kind::Var:
      return g.add(std::move(j), "E-Var");
    case Expr::Kind::Input:
      return g.add(std::move(j), "E-Input");
    case Expr::Kind::Bop: {
      auto p1 = add_expr_tree(g, e.lhs(), s, in);
      auto mid = std::get<ExprValue>(eval_expr(e.lhs(), s, in)).stream;
      auto p2 = add_expr_tree(g, e.rhs(), s, mid);
      return g.add(std::move(j), "E-Bop", {*p1, *p2});
    }
  }
  return std::nullopt;
}

BigRun run_big(const Cmd& c, const Store& s, const InputStream& in, std::uint64_t fuel,
               bool record_tree) {
  BigEval ev(fuel, record_tree);
  Store st = s;
  InputStream is = in;
  BigRun run;
  try {
    std::size_t root = ev.eval(c, st, is);
    run.result = Done{std::move(st), std::move(is)};
    if (record_tree) {
      ev.graph().system = ProofSystem::BigStep;
      ev.graph().root = root;
      run.tree = std::move(ev.graph());
    }
  } catch (const StuckEx& e) {
    run.result = StuckB{e.reason};
  } catch (const FuelEx&) {
    run.result = OutOfFuel{};
  }
  run.fuel_used = ev.used();
  return run;
}

BigResult eval_big(const Cmd& c, const Store& s, const InputStream& in, std::uint64_t fuel) {
  return run_big(c, s, in, fuel).result;
}

Verdict big_verdict(const BigResult& r, std::uint64_t fuel) {
  if (auto* d = std::get_if<Done>(&r)) return Converged{d->store};
  if (auto* st = std::get_if<StuckB>(&r)) return Stuck{st->reason};
  return Unknown{fuel};
}

}  // namespace whilesos
