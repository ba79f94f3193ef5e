#include "whilesos/flag_based.hpp"

#include "whilesos/parser.hpp"

namespace whilesos {

bool operator==(const FlagResult& a, const FlagResult& b) {
  if (!(a.status == b.status)) return false;
  switch (a.status.kind()) {
    case Status::Kind::Up:
      return true;
    case Status::Kind::Exc:
      return a.stream == b.stream;
    case Status::Kind::Down:
      return a.store == b.store && a.value == b.value && a.stream == b.stream;
  }
  return false;
}

FlagResult canonicalize(FlagResult r) {
  if (r.status.is_down()) return r;
  r.store.clear();
  if (r.value) r.value = Val::null();
  if (r.status.is_up()) r.stream = InputStream();
  return r;
}

namespace {

struct StuckEx {
  std::string reason;
};
struct FuelEx {};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct CRes {
  Store store;
  InputStream stream;
  Status status = Status::down();
  std::size_t node = kNone;
};

struct ERes {
  Val value;
  InputStream stream;
  Status status = Status::down();
  std::size_t node = kNone;
};

class FlagEval {
 public:
  FlagEval(std::uint64_t fuel, const FlagOptions& opt) : left_(fuel), opt_(opt) {}

  std::uint64_t used() const { return used_; }
  DerivationGraph& graph() { return g_; }
  std::vector<std::string>& visits() { return visits_; }

  ERes expr(const Expr& e, const Store& s, const InputStream& in, const Status& d) {
    if (opt_.record_visits) visits_.push_back("GE: " + pretty_expr(e) + " / " + pretty_status(d));
    if (d.is_up()) return eleaf(e, s, in, d, ERes{Val::null(), InputStream(), d}, "FE-Div");
    if (d.is_exc()) return eleaf(e, s, in, d, ERes{Val::null(), in, d}, "FE-Exc");
    switch (e.kind()) {
      case Expr::Kind::Lit:
        return eleaf(e, s, in, d, ERes{e.value(), in, d}, "FE-Val");
      case Expr::Kind::Var: {
        auto v = store_lookup(s, e.name());
        if (!v) throw StuckEx{"unbound variable " + e.name()};
        return eleaf(e, s, in, d, ERes{*v, in, d}, "FE-Var");
      }
      case Expr::Kind::Input: {
        auto next = in.pop();
        if (!next) throw StuckEx{"input stream exhausted"};
        return eleaf(e, s, in, d, ERes{next->first, next->second, d}, "FE-Input");
      }
      case Expr::Kind::Bop: {
        ERes r1 = expr(e.lhs(), s, in, Status::down());
        ERes r2 = expr(e.rhs(), s, r1.stream, r1.status);
        ERes out{Val::null(), r2.stream, r2.status};
        if (r2.status.is_down()) {
          if (r1.value.is_null() || r2.value.is_null())
            throw StuckEx{std::string("null operand to ") + binop_symbol(e.op())};
          out.value = Val::nat(apply_binop(e.op(), r1.value.as_nat(), r2.value.as_nat()));
        }
        return eleaf(e, s, in, d, std::move(out), "FE-Bop", {r1.node, r2.node});
      }
    }
    throw StuckEx{"bad expression"};
  }

  CRes cmd(const Cmd& c, const Store& s, const InputStream& in, const Status& d) {
    visit(c, d);
    if (d.is_up()) return cleaf(c, s, in, d, CRes{{}, InputStream(), d}, "F-Div");
    if (d.is_exc()) return cleaf(c, s, in, d, CRes{{}, in, d}, "F-Exc");
    charge();
    switch (c.kind()) {
      case Cmd::Kind::Skip:
        return cleaf(c, s, in, d, CRes{s, in, d}, "F-Skip");
      case Cmd::Kind::Alloc:
        if (s.count(c.var())) throw StuckEx{"alloc of allocated variable " + c.var()};
        return cleaf(c, s, in, d, CRes{store_update(s, c.var(), Val::null()), in, d}, "F-Alloc");
      case Cmd::Kind::Assign: {
        if (!s.count(c.var())) throw StuckEx{"assignment to unallocated " + c.var()};
        ERes e = expr(c.expr(), s, in, Status::down());
        CRes out{{}, e.stream, e.status};
        if (e.status.is_down()) out.store = store_update(s, c.var(), e.value);
        return cleaf(c, s, in, d, sentinel(std::move(out)), "F-Assign", {e.node});
      }
      case Cmd::Kind::Seq: {
        CRes r1 = cmd(c.left(), s, in, Status::down());
        CRes r2 = cmd(c.right(), r1.store, r1.stream, r1.status);
        return wrap(c, s, in, d, r2, "F-Seq", {r1.node, r2.node});
      }
      case Cmd::Kind::If: {
        ERes e = expr(c.expr(), s, in, Status::down());
        const bool zero = e.value.is_zero();
        CRes r = cmd(zero ? c.right() : c.left(), s, e.stream, e.status);
        return wrap(c, s, in, d, r, zero ? "F-IfZ" : "F-If", {e.node, r.node});
      }
      case Cmd::Kind::While:
        return loop(c, s, in);
      case Cmd::Kind::Throw:
        return cleaf(c, s, in, d, CRes{{}, in, Status::exc(c.thrown(), s)}, "F-Throw");
      case Cmd::Kind::Catch: {
        CRes r1 = cmd(c.left(), s, in, Status::down());
        if (!r1.status.is_exc()) return wrap(c, s, in, d, r1, "F-Catch", {r1.node});
        CRes r2 = cmd(c.right(), r1.status.at(), r1.stream, Status::down());
        return wrap(c, s, in, d, r2, "F-Catch-Some", {r1.node, r2.node});
      }
    }
    throw StuckEx{"bad command"};
  }

 private:
  struct Iter {
    Store s;
    InputStream in;
    std::size_t e, body;
  };

  // F-While unfoldings as a loop; the entry flag is down and fuel is charged.
  CRes loop(const Cmd& w, Store s, InputStream in) {
    std::vector<Iter> iters;
    CRes end;
    for (;;) {
      ERes e = expr(w.expr(), s, in, Status::down());
      if (e.value.is_zero() || !e.status.is_down()) {
        CRes out{s, e.stream, e.status};
        end = cleaf(w, s, in, Status::down(), sentinel(std::move(out)), "F-WhileZ", {e.node});
        break;
      }
      CRes body = cmd(w.left(), s, e.stream, e.status);
      if (opt_.record_tree) iters.push_back(Iter{s, in, e.node, body.node});
      visit(w, body.status);
      if (!body.status.is_down()) {
        const char* rule = body.status.is_up() ? "F-Div" : "F-Exc";
        CRes out{{}, body.status.is_up() ? InputStream() : body.stream, body.status};
        end = cleaf(w, body.store, body.stream, body.status, std::move(out), rule);
        break;
      }
      charge();
      s = std::move(body.store);
      in = std::move(body.stream);
    }
    for (auto it = iters.rbegin(); it != iters.rend(); ++it)
      end.node = g_.add(FlagJudgment{w, it->s, it->in, Status::down(), end.store, end.stream,
                                     end.status},
                        "F-While", {it->e, it->body, end.node});
    return end;
  }

  static CRes sentinel(CRes r) {
    if (r.status.is_down()) return r;
    r.store.clear();
    if (r.status.is_up()) r.stream = InputStream();
    return r;
  }

  void visit(const Cmd& c, const Status& d) {
    if (opt_.record_visits) visits_.push_back("G: " + pretty_cmd(c) + " / " + pretty_status(d));
  }

  void charge() {
    if (left_ == 0) throw FuelEx{};
    --left_;
    ++used_;
  }

  ERes eleaf(const Expr& e, const Store& s, const InputStream& in, const Status& d, ERes r,
             const char* rule, std::vector<std::size_t> premises = {}) {
    if (opt_.record_tree)
      r.node = g_.add(FlagExprJudgment{e, s, in, d, r.value, r.stream, r.status}, rule,
                      std::move(premises));
    return r;
  }

  CRes cleaf(const Cmd& c, const Store& s, const InputStream& in, const Status& d, CRes r,
             const char* rule, std::vector<std::size_t> premises = {}) {
    if (opt_.record_tree)
      r.node = g_.add(FlagJudgment{c, s, in, d, r.store, r.stream, r.status}, rule,
                      std::move(premises));
    return r;
  }

  CRes wrap(const Cmd& c, const Store& s, const InputStream& in, const Status& d, CRes r,
            const char* rule, std::vector<std::size_t> premises) {
    return cleaf(c, s, in, d, std::move(r), rule, std::move(premises));
  }

  std::uint64_t left_;
  std::uint64_t used_ = 0;
  FlagOptions opt_;
  DerivationGraph g_;
  std::vector<std::string> visits_;
};

}  // namespace

FlagRun run_flag(const Cmd& c, const Store& s, const Status& d, const InputStream& in,
                 std::uint64_t fuel, const FlagOptions& opt) {
  FlagEval ev(fuel, opt);
  FlagRun run;
  try {
    CRes r = ev.cmd(c, s, in, d);
    run.result = FlagResult{r.status, std::move(r.store), std::nullopt, std::move(r.stream)};
    if (opt.record_tree) {
      ev.graph().system = ProofSystem::FlagCo;
      ev.graph().root = r.node;
      run.tree = std::move(ev.graph());
    }
  } catch (const StuckEx& e) {
    run.result = StuckF{e.reason};
  } catch (const FuelEx&) {
    run.result = OutOfFuelF{};
  }
  run.fuel_used = ev.used();
  run.visits = std::move(ev.visits());
  return run;
}

FlagOutcome eval_flag(const Cmd& c, const Store& s, const Status& d, const InputStream& in,
                      std::uint64_t fuel) {
  return run_flag(c, s, d, in, fuel).result;
}

FlagOutcome eval_expr_flag(const Expr& e, const Store& s, const Status& d, const InputStream& in,
                           std::uint64_t /*fuel: expression rules are free*/) {
  FlagEval ev(0, {});
  try {
    ERes r = ev.expr(e, s, in, d);
    return FlagResult{r.status, {}, r.value, r.stream};
  } catch (const StuckEx& ex) {
    return StuckF{ex.reason};
  }
}

std::optional<std::size_t> add_flag_expr_tree(DerivationGraph& g, const Expr& e, const Store& s,
                                              const Status& d, const InputStream& in) {
  FlagOptions opt;
  opt.record_tree = true;
  FlagEval ev(0, opt);
  std::size_t root;
  try {
    root = ev.expr(e, s, in, d).node;
  } catch (const StuckEx&) {
    return std::nullopt;
  }
  const std::size_t base = g.nodes.size();
  for (auto& n : ev.graph().nodes) {
    for (auto& p : n.premises) p += base;
    g.nodes.push_back(std::move(n));
  }
  return root + base;
}

Verdict flag_verdict(const FlagOutcome& r, std::uint64_t fuel) {
  if (auto* f = std::get_if<FlagResult>(&r)) {
    if (f->status.is_down()) return Converged{f->store};
    if (f->status.is_exc()) return ExceptionV{f->status.thrown(), f->status.at()};
    return Unknown{fuel};
  }
  if (auto* st = std::get_if<StuckF>(&r)) return Stuck{st->reason};
  return Unknown{fuel};
}

}  // namespace whilesos
