#include "whilesos/pretty_big.hpp"

#include <vector>

#include "whilesos/big_step.hpp"
#include "whilesos/small_step.hpp"

namespace whilesos {

namespace {

struct StuckEx {
  std::string reason;
};
struct FuelEx {};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct Res {
  Outcome o = Outcome::div();
  InputStream out;
  std::size_t node = kNone;
};

class PrettyEval {
 public:
  PrettyEval(std::uint64_t fuel, bool record) : left_(fuel), record_(record) {}

  std::uint64_t used() const { return used_; }
  DerivationGraph& graph() { return g_; }

  Res eval(const SemCmd& C, const Store& s, const InputStream& in) {
    switch (C.kind) {
      case SemCmd::Kind::Plain:
        return plain(C, s, in);
      case SemCmd::Kind::Assign2: {
        charge();
        if (!s.count(C.var)) throw StuckEx{"assignment to unallocated " + C.var};
        return leaf(C, s, in, Outcome::conv(store_update(s, C.var, C.value)), in, "P-Assign2");
      }
      case SemCmd::Kind::Seq2: {
        charge();
        if (C.outcome.is_div()) return leaf(C, s, in, Outcome::div(), in, "P-Seq-Abort");
        Res r = eval(SemCmd::plain(C.cmd), C.outcome.store(), in);
        return wrap(C, s, in, r, "P-Seq2", {r.node});
      }
      case SemCmd::Kind::If2: {
        charge();
        const bool zero = C.value.is_zero();
        Res r = eval(SemCmd::plain(zero ? C.alt : C.cmd), s, in);
        return wrap(C, s, in, r, zero ? "P-IfZ2" : "P-If2", {r.node});
      }
      case SemCmd::Kind::While2:
      case SemCmd::Kind::While3:
        return chain(C, s, in);
    }
    throw StuckEx{"bad semantic command"};
  }

 private:
  Res plain(const SemCmd& C, const Store& s, const InputStream& in) {
    const Cmd& c = C.cmd;
    switch (c.kind()) {
      case Cmd::Kind::Skip:
        charge();
        return leaf(C, s, in, Outcome::conv(s), in, "P-Skip");
      case Cmd::Kind::Alloc:
        charge();
        if (s.count(c.var())) throw StuckEx{"alloc of allocated variable " + c.var()};
        return leaf(C, s, in, Outcome::conv(store_update(s, c.var(), Val::null())), in,
                    "P-Alloc");
      case Cmd::Kind::Assign: {
        charge();
        auto [v, in1, e] = expr(c.expr(), s, in);
        Res r = eval(SemCmd::assign2(c.var(), v), s, in1);
        return wrap(C, s, in, r, "P-Assign1", {e, r.node});
      }
      case Cmd::Kind::Seq: {
        charge();
        Res r1 = eval(SemCmd::plain(c.left()), s, in);
        Res r2 = eval(SemCmd::seq2(r1.o, c.right()), s, r1.out);
        return wrap(C, s, in, r2, "P-Seq1", {r1.node, r2.node});
      }
      case Cmd::Kind::If: {
        charge();
        auto [v, in1, e] = expr(c.expr(), s, in);
        Res r = eval(SemCmd::if2(v, c.left(), c.right()), s, in1);
        return wrap(C, s, in, r, "P-If", {e, r.node});
      }
      case Cmd::Kind::While:
        return chain(C, s, in);
      case Cmd::Kind::Throw:
      case Cmd::Kind::Catch:
        throw StuckEx{"no pretty-big-step rule for throw/catch"};
    }
    throw StuckEx{"bad command"};
  }

  struct Frame {
    SemCmd C;
    Store s;
    InputStream in;
    const char* rule;
    std::vector<std::size_t> premises;  // the chain successor is appended later
  };

  // while -> while2 -> while3 -> while ... run as a loop rather than recursion.
  Res chain(SemCmd C, Store s, InputStream in) {
    std::vector<Frame> frames;
    auto push = [&](const char* rule, std::vector<std::size_t> premises) {
      if (record_) frames.push_back(Frame{C, s, in, rule, std::move(premises)});
    };
    Res end;
    for (;;) {
      charge();
      if (C.kind == SemCmd::Kind::Plain) {
        auto [v, in1, e] = expr(C.cmd.expr(), s, in);
        push("P-While", {e});
        C = SemCmd::while2(v, C.cmd.expr(), C.cmd.left());
        in = in1;
      } else if (C.kind == SemCmd::Kind::While2) {
        if (C.value.is_zero()) {
          end = leaf(C, s, in, Outcome::conv(s), in, "P-WhileZ2");
          break;
        }
        Res body = eval(SemCmd::plain(C.cmd), s, in);
        push("P-While2", {body.node});
        C = SemCmd::while3(body.o, C.guard, C.cmd);
        in = body.out;
      } else {
        if (C.outcome.is_div()) {
          end = leaf(C, s, in, Outcome::div(), in, "P-While-Abort");
          break;
        }
        push("P-While3", {});
        Store next = C.outcome.store();
        C = SemCmd::plain(Cmd::while_(C.guard, C.cmd));
        s = std::move(next);
      }
    }
    for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
      it->premises.push_back(end.node);
      end.node = g_.add(PrettyJudgment{it->C, it->s, it->in, end.o, end.out}, it->rule,
                        std::move(it->premises));
    }
    return end;
  }

  struct ExprRes {
    Val v;
    InputStream out;
    std::size_t node;
  };

  ExprRes expr(const Expr& e, const Store& s, const InputStream& in) {
    auto r = eval_expr(e, s, in);
    if (auto* st = std::get_if<ExprStuck>(&r)) throw StuckEx{st->reason};
    auto& v = std::get<ExprValue>(r);
    std::size_t id = kNone;
    if (record_) id = *add_expr_tree(g_, e, s, in);
    return {v.value, v.stream, id};
  }

  Res leaf(const SemCmd& C, const Store& s, const InputStream& in, Outcome o,
           const InputStream& out, const char* rule) {
    Res r{std::move(o), out, kNone};
    if (record_) r.node = g_.add(PrettyJudgment{C, s, in, r.o, out}, rule);
    return r;
  }

  Res wrap(const SemCmd& C, const Store& s, const InputStream& in, Res r, const char* rule,
           std::vector<std::size_t> premises) {
    if (record_) r.node = g_.add(PrettyJudgment{C, s, in, r.o, r.out}, rule, std::move(premises));
    return r;
  }

  void charge() {
    if (left_ == 0) throw FuelEx{};
    --left_;
    ++used_;
  }

  std::uint64_t left_;
  std::uint64_t used_ = 0;
  bool record_;
  DerivationGraph g_;
};

}  // namespace

PrettyRun run_pretty(const SemCmd& c, const Store& s, const InputStream& in, std::uint64_t fuel,
                     bool record_tree) {
  PrettyEval ev(fuel, record_tree);
  PrettyRun run;
  try {
    Res r = ev.eval(c, s, in);
    run.result = DoneP{std::move(r.o), std::move(r.out)};
    if (record_tree) {
      ev.graph().system = ProofSystem::PrettyCo;
      ev.graph().root = r.node;
      run.tree = std::move(ev.graph());
    }
  } catch (const StuckEx& e) {
    run.result = StuckP{e.reason};
  } catch (const FuelEx&) {
    run.result = OutOfFuelP{};
  }
  run.fuel_used = ev.used();
  return run;
}

PrettyResult eval_pretty(const SemCmd& c, const Store& s, const InputStream& in,
                         std::uint64_t fuel) {
  return run_pretty(c, s, in, fuel).result;
}

Verdict pretty_verdict(const PrettyResult& r, std::uint64_t fuel) {
  if (auto* d = std::get_if<DoneP>(&r)) {
    if (d->outcome.is_conv()) return Converged{d->outcome.store()};
    return Unknown{fuel};  // only reachable from an injected div
  }
  if (auto* st = std::get_if<StuckP>(&r)) return Stuck{st->reason};
  return Unknown{fuel};
}

}  // namespace whilesos
