#include "whilesos/coinduction.hpp"

#include <unordered_map>

#include "whilesos/big_step.hpp"
#include "whilesos/flag_based.hpp"
#include "whilesos/parser.hpp"
#include "whilesos/pretty_big.hpp"

namespace whilesos {

// ---------------------------------------------------------------------------
// Abstraction

std::optional<std::string> abstraction_violation(const Cmd& c, const std::set<std::string>& vars) {
  if (vars.empty()) return std::nullopt;
  auto in_guard = [&](const Expr& e) -> std::optional<std::string> {
    std::set<std::string> used;
    collect_vars(e, used);
    for (const auto& x : used)
      if (vars.count(x)) return "projected variable " + x + " occurs in guard " + pretty_expr(e);
    return std::nullopt;
  };
  switch (c.kind()) {
    case Cmd::Kind::Skip:
    case Cmd::Kind::Alloc:
    case Cmd::Kind::Throw:
      return std::nullopt;
    case Cmd::Kind::Assign: {
      if (vars.count(c.var())) return std::nullopt;
      std::set<std::string> used;
      collect_vars(c.expr(), used);
      for (const auto& x : used)
        if (vars.count(x)) return "projected variable " + x + " flows into " + c.var();
      return std::nullopt;
    }
    case Cmd::Kind::Seq:
    case Cmd::Kind::Catch:
      if (auto v = abstraction_violation(c.left(), vars)) return v;
      return abstraction_violation(c.right(), vars);
    case Cmd::Kind::If:
      if (auto v = in_guard(c.expr())) return v;
      if (auto v = abstraction_violation(c.left(), vars)) return v;
      return abstraction_violation(c.right(), vars);
    case Cmd::Kind::While:
      if (auto v = in_guard(c.expr())) return v;
      return abstraction_violation(c.left(), vars);
  }
  return std::nullopt;
}

void check_abstraction(const Cmd& c, const Abstraction& a) {
  if (auto v = abstraction_violation(c, a.vars)) throw AbstractionUnsound(*v);
}

Store project(const Store& s, const std::set<std::string>& vars) {
  if (vars.empty()) return s;
  Store out = s;
  for (const auto& x : vars) {
    auto it = out.find(x);
    if (it != out.end() && it->second.is_nat()) it->second = Val::nat(0);
  }
  return out;
}

SemCmd project(const SemCmd& c, const std::set<std::string>& vars) {
  if (vars.empty() || c.outcome.is_div()) return c;
  SemCmd out = c;
  out.outcome = Outcome::conv(project(c.outcome.store(), vars));
  return out;
}

// ---------------------------------------------------------------------------
// Lassos

std::optional<Lasso> detect_lasso(const SmallConfig& cfg, std::uint64_t fuel,
                                  const Abstraction& abs) {
  check_abstraction(cfg.cmd, abs);
  std::unordered_map<SmallConfig, std::size_t> seen;
  std::vector<SmallConfig> trace;
  SmallConfig cur = cfg;
  for (std::uint64_t i = 0;; ++i) {
    SmallConfig key{cur.cmd, project(cur.store, abs.vars), cur.stream};
    auto it = seen.find(key);
    if (it != seen.end()) {
      Lasso l;
      l.abstraction = abs;
      l.prefix.assign(trace.begin(), trace.begin() + static_cast<std::ptrdiff_t>(it->second));
      l.cycle.assign(trace.begin() + static_cast<std::ptrdiff_t>(it->second), trace.end());
      return l;
    }
    if (i == fuel) return std::nullopt;
    seen.emplace(std::move(key), trace.size());
    trace.push_back(cur);
    auto r = step(cur);
    if (std::holds_alternative<NoStep>(r)) return std::nullopt;
    cur = std::move(std::get<SmallConfig>(r));
  }
}

CheckResult check_lasso(const Lasso& l) {
  auto fail = [](std::string msg) { return CheckResult{false, std::move(msg)}; };
  if (l.cycle.empty()) return fail("empty cycle");
  const SmallConfig& first = l.prefix.empty() ? l.cycle.front() : l.prefix.front();
  if (auto v = abstraction_violation(first.cmd, l.abstraction.vars)) return fail(*v);
  std::vector<const SmallConfig*> seq;
  for (const auto& c : l.prefix) seq.push_back(&c);
  for (const auto& c : l.cycle) seq.push_back(&c);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto r = step(*seq[i]);
    if (auto* ns = std::get_if<NoStep>(&r))
      return fail("configuration " + std::to_string(i) + " has no step: " + ns->reason);
    const auto& next = std::get<SmallConfig>(r);
    if (i + 1 < seq.size()) {
      if (!(next == *seq[i + 1]))
        return fail("configuration " + std::to_string(i + 1) + " is not the successor of " +
                    std::to_string(i));
    } else {
      const auto& head = l.cycle.front();
      const auto& vars = l.abstraction.vars;
      if (!(next.cmd == head.cmd && next.stream == head.stream &&
            project(next.store, vars) == project(head.store, vars)))
        return fail("cycle does not close");
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Graph checker

namespace {

struct CheckFail {
  std::string msg;
};

void need(bool cond, const std::string& msg) {
  if (!cond) throw CheckFail{msg};
}

bool is_abort(const SemCmd& c) {
  return (c.kind == SemCmd::Kind::Seq2 || c.kind == SemCmd::Kind::While3) && c.outcome.is_div();
}

class Checker {
 public:
  Checker(const DerivationGraph& g, ProofSystem sys, const CheckOptions& opt)
      : g_(g), sys_(sys), opt_(opt), abs_(g.abstraction) {}

  CheckResult run() {
    try {
      need(g_.system == sys_, std::string("graph is for ") + system_name(g_.system) + ", not " +
                                  system_name(sys_));
      need(!g_.nodes.empty(), "empty graph");
      need(g_.root < g_.nodes.size(), "root out of range");
      if (sys_ == ProofSystem::BigStep) need(!g_.has_back_edges(), "inductive tree has a cycle");
      if (!abs_.empty()) flow_check();
    } catch (const CheckFail& f) {
      return {false, f.msg};
    }
    for (std::size_t i = 0; i < g_.nodes.size(); ++i) {
      try {
        node(g_.nodes[i]);
      } catch (const CheckFail& f) {
        return {false, "node " + std::to_string(i) + " (" + g_.nodes[i].rule + "): " + f.msg};
      }
    }
    return {};
  }

 private:
  void flow_check() {
    for (const auto& n : g_.nodes) {
      const Cmd* c = nullptr;
      const Cmd* alt = nullptr;
      if (auto* j = std::get_if<BigJudgment>(&n.judgment)) c = &j->cmd;
      if (auto* j = std::get_if<DivJudgment>(&n.judgment)) c = &j->cmd;
      if (auto* j = std::get_if<FlagJudgment>(&n.judgment)) c = &j->cmd;
      if (auto* j = std::get_if<PrettyJudgment>(&n.judgment)) {
        c = &j->cmd.cmd;
        alt = &j->cmd.alt;
        if (j->cmd.kind == SemCmd::Kind::While2 || j->cmd.kind == SemCmd::Kind::While3) {
          auto w = Cmd::while_(j->cmd.guard, j->cmd.cmd);
          if (auto v = abstraction_violation(w, abs_)) throw CheckFail{*v};
        }
      }
      for (const Cmd* x : {c, alt})
        if (x)
          if (auto v = abstraction_violation(*x, abs_)) throw CheckFail{*v};
    }
  }

  bool same_store(const Store& a, const Store& b) const {
    return abs_.empty() ? a == b : project(a, abs_) == project(b, abs_);
  }

  const DerivationNode& prem(const DerivationNode& n, std::size_t i) const {
    need(i < n.premises.size(), "missing premise " + std::to_string(i + 1));
    need(n.premises[i] < g_.nodes.size(), "premise id out of range");
    return g_.nodes[n.premises[i]];
  }

  void arity(const DerivationNode& n, std::size_t k) const {
    need(n.premises.size() == k, "expected " + std::to_string(k) + " premises, found " +
                                     std::to_string(n.premises.size()));
  }

  template <class T>
  static const T& as(const DerivationNode& n) {
    auto* j = std::get_if<T>(&n.judgment);
    need(j != nullptr, "judgment has the wrong relation " + std::string(relation_symbol(n.judgment)));
    return *j;
  }

  // --- input-side matchers (stores modulo the abstraction) ---

  const ExprJudgment& in_expr(const DerivationNode& p, const Expr& e, const Store& s,
                              const InputStream& in) const {
    const auto& j = as<ExprJudgment>(p);
    need(j.expr == e && same_store(j.store, s) && j.stream == in,
         "premise does not match (" + pretty_expr(e) + ", ...)");
    return j;
  }

  const BigJudgment& in_big(const DerivationNode& p, const Cmd& c, const Store& s,
                            const InputStream& in) const {
    const auto& j = as<BigJudgment>(p);
    need(j.cmd == c && same_store(j.store, s) && j.stream == in,
         "premise does not match (" + pretty_cmd(c) + ", ...)");
    return j;
  }

  void in_div(const DerivationNode& p, const Cmd& c, const Store& s, const InputStream& in) const {
    const auto& j = as<DivJudgment>(p);
    need(j.cmd == c && same_store(j.store, s) && j.stream == in,
         "premise does not match (" + pretty_cmd(c) + ", ...)");
  }

  const PrettyJudgment& in_pretty(const DerivationNode& p, const SemCmd& c, const Store& s,
                                  const InputStream& in) const {
    const auto& j = as<PrettyJudgment>(p);
    need(project(j.cmd, abs_) == project(c, abs_) && same_store(j.store, s) &&
             (is_abort(c) || j.stream == in),
         "premise does not match (" + pretty_semcmd(c) + ", ...)");
    return j;
  }

  bool flag_in_eq(const Status& a, const Status& b) const {
    if (a.kind() != b.kind()) return false;
    return !a.is_exc() || (a.thrown() == b.thrown() && same_store(a.at(), b.at()));
  }

  bool flag_inputs(const Store& js, const InputStream& jin, const Status& jd, const Store& s,
                   const InputStream& in, const Status& d) const {
    if (!flag_in_eq(jd, d)) return false;
    if (d.is_down() && !same_store(js, s)) return false;
    return d.is_up() || jin == in;
  }

  const FlagJudgment& in_flag(const DerivationNode& p, const Cmd& c, const Store& s,
                              const InputStream& in, const Status& d) const {
    const auto& j = as<FlagJudgment>(p);
    need(j.cmd == c && flag_inputs(j.store, j.stream, j.flag, s, in, d),
         "premise does not match (" + pretty_cmd(c) + ", ..., " + pretty_status(d) + ")");
    return j;
  }

  const FlagExprJudgment& in_fexpr(const DerivationNode& p, const Expr& e, const Store& s,
                                   const InputStream& in, const Status& d) const {
    const auto& j = as<FlagExprJudgment>(p);
    need(j.expr == e && flag_inputs(j.store, j.stream, j.flag, s, in, d),
         "premise does not match (" + pretty_expr(e) + ", ..., " + pretty_status(d) + ")");
    return j;
  }

  // --- output comparisons (exact, but blind to sentinel components) ---

  static void out_big(const BigJudgment& j, const Store& s, const InputStream& in) {
    need(j.out_store == s && j.out_stream == in, "result should be " + pretty_store(s));
  }

  static void out_pretty(const PrettyJudgment& j, const Outcome& o, const InputStream& in) {
    need(j.outcome == o && (o.is_div() || j.out_stream == in),
         "outcome should be " + pretty_outcome(o));
  }

  static void out_flag(const FlagJudgment& j, const Store& s, const InputStream& in,
                       const Status& d) {
    bool ok = j.out_flag == d;
    if (ok && d.is_down()) ok = j.out_store == s && j.out_stream == in;
    if (ok && d.is_exc()) ok = j.out_stream == in;
    need(ok, "result should be " + pretty_store(s) + ", " + pretty_status(d));
  }

  static void out_fexpr(const FlagExprJudgment& j, const Val& v, const InputStream& in,
                        const Status& d) {
    bool ok = j.out_flag == d;
    if (ok && d.is_down()) ok = j.value == v && j.out_stream == in;
    if (ok && d.is_exc()) ok = j.out_stream == in;
    need(ok, "result should be " + pretty_val(v) + ", " + pretty_status(d));
  }

  Done big(const Cmd& c, const Store& s, const InputStream& in) const {
    auto r = eval_big(c, s, in, opt_.eval_fuel);
    auto* d = std::get_if<Done>(&r);
    need(d != nullptr, "side premise (" + pretty_cmd(c) + ", ...) =B=> does not converge");
    return *d;
  }

  ExprValue expr(const Expr& e, const Store& s, const InputStream& in) const {
    auto r = eval_expr(e, s, in);
    need(std::holds_alternative<ExprValue>(r), "side premise " + pretty_expr(e) + " is stuck");
    return std::get<ExprValue>(r);
  }

  // --- per-node dispatch ---

  void node(const DerivationNode& n) {
    const std::string& r = n.rule;
    switch (sys_) {
      case ProofSystem::BigStep:
        if (r.rfind("E-", 0) == 0) return expr_rule(n);
        return big_rule(n);
      case ProofSystem::DivPred:
        return div_rule(n);
      case ProofSystem::PrettyCo:
        if (r.rfind("E-", 0) == 0) return expr_rule(n);
        return pretty_rule(n);
      case ProofSystem::FlagCo:
        if (r.rfind("FE-", 0) == 0) return fexpr_rule(n);
        return flag_rule(n);
    }
  }

  void expr_rule(const DerivationNode& n) {
    const auto& j = as<ExprJudgment>(n);
    const std::string& r = n.rule;
    if (r == "E-Val") {
      arity(n, 0);
      need(j.expr.kind() == Expr::Kind::Lit, "not a literal");
      need(j.value == j.expr.value() && j.out_stream == j.stream, "wrong value");
    } else if (r == "E-Var") {
      arity(n, 0);
      need(j.expr.kind() == Expr::Kind::Var, "not a variable");
      auto v = store_lookup(j.store, j.expr.name());
      need(v.has_value(), j.expr.name() + " not in dom");
      need(j.value == *v && j.out_stream == j.stream, "wrong value");
    } else if (r == "E-Input") {
      arity(n, 0);
      need(j.expr.kind() == Expr::Kind::Input, "not input");
      auto next = j.stream.pop();
      need(next.has_value(), "stream exhausted");
      need(j.value == next->first && j.out_stream == next->second, "wrong value");
    } else if (r == "E-Bop") {
      arity(n, 2);
      need(j.expr.kind() == Expr::Kind::Bop, "not a binary operation");
      const auto& p1 = in_expr(prem(n, 0), j.expr.lhs(), j.store, j.stream);
      const auto& p2 = in_expr(prem(n, 1), j.expr.rhs(), j.store, p1.out_stream);
      need(p1.value.is_nat() && p2.value.is_nat(), "null operand");
      need(j.value == Val::nat(apply_binop(j.expr.op(), p1.value.as_nat(), p2.value.as_nat())) &&
               j.out_stream == p2.out_stream,
           "wrong value");
    } else {
      need(false, "unknown rule");
    }
  }

  void big_rule(const DerivationNode& n) {
    const auto& j = as<BigJudgment>(n);
    const Cmd& c = j.cmd;
    const std::string& r = n.rule;
    auto kind = [&](Cmd::Kind k) { need(c.kind() == k, "rule does not match " + pretty_cmd(c)); };
    if (r == "B-Skip") {
      kind(Cmd::Kind::Skip);
      arity(n, 0);
      out_big(j, j.store, j.stream);
    } else if (r == "B-Alloc") {
      kind(Cmd::Kind::Alloc);
      arity(n, 0);
      need(!j.store.count(c.var()), c.var() + " already in dom");
      out_big(j, store_update(j.store, c.var(), Val::null()), j.stream);
    } else if (r == "B-Assign") {
      kind(Cmd::Kind::Assign);
      arity(n, 1);
      need(j.store.count(c.var()), c.var() + " not in dom");
      const auto& e = in_expr(prem(n, 0), c.expr(), j.store, j.stream);
      out_big(j, store_update(j.store, c.var(), e.value), e.out_stream);
    } else if (r == "B-Seq") {
      kind(Cmd::Kind::Seq);
      arity(n, 2);
      const auto& p1 = in_big(prem(n, 0), c.left(), j.store, j.stream);
      const auto& p2 = in_big(prem(n, 1), c.right(), p1.out_store, p1.out_stream);
      out_big(j, p2.out_store, p2.out_stream);
    } else if (r == "B-If" || r == "B-IfZ") {
      kind(Cmd::Kind::If);
      arity(n, 2);
      const auto& e = in_expr(prem(n, 0), c.expr(), j.store, j.stream);
      const bool zero = r == "B-IfZ";
      need(e.value.is_zero() == zero, "guard value does not select this rule");
      const auto& p = in_big(prem(n, 1), zero ? c.right() : c.left(), j.store, e.out_stream);
      out_big(j, p.out_store, p.out_stream);
    } else if (r == "B-While") {
      kind(Cmd::Kind::While);
      arity(n, 3);
      const auto& e = in_expr(prem(n, 0), c.expr(), j.store, j.stream);
      need(!e.value.is_zero(), "guard is 0");
      const auto& body = in_big(prem(n, 1), c.left(), j.store, e.out_stream);
      const auto& rest = in_big(prem(n, 2), c, body.out_store, body.out_stream);
      out_big(j, rest.out_store, rest.out_stream);
    } else if (r == "B-WhileZ") {
      kind(Cmd::Kind::While);
      arity(n, 1);
      const auto& e = in_expr(prem(n, 0), c.expr(), j.store, j.stream);
      need(e.value.is_zero(), "guard is not 0");
      out_big(j, j.store, e.out_stream);
    } else {
      need(false, "unknown rule");
    }
  }

  void div_rule(const DerivationNode& n) {
    const auto& j = as<DivJudgment>(n);
    const Cmd& c = j.cmd;
    const std::string& r = n.rule;
    auto kind = [&](Cmd::Kind k) { need(c.kind() == k, "rule does not match " + pretty_cmd(c)); };
    arity(n, 1);
    if (r == "D-Seq1") {
      kind(Cmd::Kind::Seq);
      in_div(prem(n, 0), c.left(), j.store, j.stream);
    } else if (r == "D-Seq2") {
      kind(Cmd::Kind::Seq);
      Done d = big(c.left(), j.store, j.stream);
      in_div(prem(n, 0), c.right(), d.store, d.stream);
    } else if (r == "D-If" || r == "D-IfZ") {
      kind(Cmd::Kind::If);
      ExprValue v = expr(c.expr(), j.store, j.stream);
      const bool zero = r == "D-IfZ";
      need(v.value.is_zero() == zero, "guard value does not select this rule");
      in_div(prem(n, 0), zero ? c.right() : c.left(), j.store, v.stream);
    } else if (r == "D-WhileBody") {
      kind(Cmd::Kind::While);
      ExprValue v = expr(c.expr(), j.store, j.stream);
      need(!v.value.is_zero(), "guard is 0");
      in_div(prem(n, 0), c.left(), j.store, v.stream);
    } else if (r == "D-While") {
      kind(Cmd::Kind::While);
      ExprValue v = expr(c.expr(), j.store, j.stream);
      need(!v.value.is_zero(), "guard is 0");
      Done d = big(c.left(), j.store, v.stream);
      in_div(prem(n, 0), c, d.store, d.stream);
    } else {
      need(false, "unknown rule");
    }
  }

  void pretty_rule(const DerivationNode& n) {
    const auto& j = as<PrettyJudgment>(n);
    const SemCmd& C = j.cmd;
    const Cmd& c = C.cmd;
    const std::string& r = n.rule;
    using K = SemCmd::Kind;
    auto plain = [&](Cmd::Kind k) {
      need(C.kind == K::Plain && c.kind() == k, "rule does not match " + pretty_semcmd(C));
    };
    auto form = [&](K k) { need(C.kind == k, "rule does not match " + pretty_semcmd(C)); };
    if (r == "P-Skip") {
      plain(Cmd::Kind::Skip);
      arity(n, 0);
      out_pretty(j, Outcome::conv(j.store), j.stream);
    } else if (r == "P-Alloc") {
      plain(Cmd::Kind::Alloc);
      arity(n, 0);
      need(!j.store.count(c.var()), c.var() + " already in dom");
      out_pretty(j, Outcome::conv(store_update(j.store, c.var(), Val::null())), j.stream);
    } else if (r == "P-Assign1") {
      plain(Cmd::Kind::Assign);
      arity(n, 2);
      const auto& e = in_expr(prem(n, 0), c.expr(), j.store, j.stream);
      const auto& p = in_pretty(prem(n, 1), SemCmd::assign2(c.var(), e.value), j.store,
                                e.out_stream);
      out_pretty(j, p.outcome, p.out_stream);
    } else if (r == "P-Assign2") {
      form(K::Assign2);
      arity(n, 0);
      need(j.store.count(C.var), C.var + " not in dom");
      out_pretty(j, Outcome::conv(store_update(j.store, C.var, C.value)), j.stream);
    } else if (r == "P-Seq1") {
      plain(Cmd::Kind::Seq);
      arity(n, 2);
      const auto& p1 = in_pretty(prem(n, 0), SemCmd::plain(c.left()), j.store, j.stream);
      const auto& p2 =
          in_pretty(prem(n, 1), SemCmd::seq2(p1.outcome, c.right()), j.store, p1.out_stream);
      out_pretty(j, p2.outcome, p2.out_stream);
    } else if (r == "P-Seq2") {
      form(K::Seq2);
      need(C.outcome.is_conv(), "outcome is div");
      arity(n, 1);
      const auto& p = in_pretty(prem(n, 0), SemCmd::plain(c), C.outcome.store(), j.stream);
      out_pretty(j, p.outcome, p.out_stream);
    } else if (r == "P-Seq-Abort" || r == "P-While-Abort") {
      form(r == "P-Seq-Abort" ? K::Seq2 : K::While3);
      need(C.outcome.is_div(), "outcome is not div");
      arity(n, 0);
      out_pretty(j, Outcome::div(), j.stream);
    } else if (r == "P-If") {
      plain(Cmd::Kind::If);
      arity(n, 2);
      const auto& e = in_expr(prem(n, 0), c.expr(), j.store, j.stream);
      const auto& p = in_pretty(prem(n, 1), SemCmd::if2(e.value, c.left(), c.right()), j.store,
                                e.out_stream);
      out_pretty(j, p.outcome, p.out_stream);
    } else if (r == "P-If2" || r == "P-IfZ2") {
      form(K::If2);
      const bool zero = r == "P-IfZ2";
      need(C.value.is_zero() == zero, "value does not select this rule");
      arity(n, 1);
      const auto& p = in_pretty(prem(n, 0), SemCmd::plain(zero ? C.alt : c), j.store, j.stream);
      out_pretty(j, p.outcome, p.out_stream);
    } else if (r == "P-While") {
      plain(Cmd::Kind::While);
      arity(n, 2);
      const auto& e = in_expr(prem(n, 0), c.expr(), j.store, j.stream);
      const auto& p = in_pretty(prem(n, 1), SemCmd::while2(e.value, c.expr(), c.left()), j.store,
                                e.out_stream);
      out_pretty(j, p.outcome, p.out_stream);
    } else if (r == "P-While2") {
      form(K::While2);
      need(!C.value.is_zero(), "value is 0");
      arity(n, 2);
      const auto& body = in_pretty(prem(n, 0), SemCmd::plain(c), j.store, j.stream);
      const auto& rest = in_pretty(prem(n, 1), SemCmd::while3(body.outcome, C.guard, c), j.store,
                                   body.out_stream);
      out_pretty(j, rest.outcome, rest.out_stream);
    } else if (r == "P-WhileZ2") {
      form(K::While2);
      need(C.value.is_zero(), "value is not 0");
      arity(n, 0);
      out_pretty(j, Outcome::conv(j.store), j.stream);
    } else if (r == "P-While3") {
      form(K::While3);
      need(C.outcome.is_conv(), "outcome is div");
      arity(n, 1);
      const auto& p = in_pretty(prem(n, 0), SemCmd::plain(Cmd::while_(C.guard, c)),
                                C.outcome.store(), j.stream);
      out_pretty(j, p.outcome, p.out_stream);
    } else {
      need(false, "unknown rule");
    }
  }

  void fexpr_rule(const DerivationNode& n) {
    const auto& j = as<FlagExprJudgment>(n);
    const std::string& r = n.rule;
    if (r == "FE-Div") {
      arity(n, 0);
      need(j.flag.is_up(), "input flag is not up");
      out_fexpr(j, j.value, j.out_stream, Status::up());
      return;
    }
    if (r == "FE-Exc") {
      arity(n, 0);
      need(j.flag.is_exc(), "input flag is not exc");
      out_fexpr(j, j.value, j.stream, j.flag);
      return;
    }
    need(j.flag.is_down(), "input flag is not down");
    if (r == "FE-Val") {
      arity(n, 0);
      need(j.expr.kind() == Expr::Kind::Lit, "not a literal");
      out_fexpr(j, j.expr.value(), j.stream, Status::down());
    } else if (r == "FE-Var") {
      arity(n, 0);
      need(j.expr.kind() == Expr::Kind::Var, "not a variable");
      auto v = store_lookup(j.store, j.expr.name());
      need(v.has_value(), j.expr.name() + " not in dom");
      out_fexpr(j, *v, j.stream, Status::down());
    } else if (r == "FE-Input") {
      arity(n, 0);
      need(j.expr.kind() == Expr::Kind::Input, "not input");
      auto next = j.stream.pop();
      need(next.has_value(), "stream exhausted");
      out_fexpr(j, next->first, next->second, Status::down());
    } else if (r == "FE-Bop") {
      arity(n, 2);
      need(j.expr.kind() == Expr::Kind::Bop, "not a binary operation");
      const auto& p1 = in_fexpr(prem(n, 0), j.expr.lhs(), j.store, j.stream, Status::down());
      const auto& p2 = in_fexpr(prem(n, 1), j.expr.rhs(), j.store, p1.out_stream, p1.out_flag);
      Val v = Val::null();
      if (p2.out_flag.is_down()) {
        need(p1.value.is_nat() && p2.value.is_nat(), "null operand");
        v = Val::nat(apply_binop(j.expr.op(), p1.value.as_nat(), p2.value.as_nat()));
      }
      out_fexpr(j, v, p2.out_stream, p2.out_flag);
    } else {
      need(false, "unknown rule");
    }
  }

  void flag_rule(const DerivationNode& n) {
    const auto& j = as<FlagJudgment>(n);
    const Cmd& c = j.cmd;
    const std::string& r = n.rule;
    auto kind = [&](Cmd::Kind k) { need(c.kind() == k, "rule does not match " + pretty_cmd(c)); };
    if (r == "F-Div") {
      arity(n, 0);
      need(j.flag.is_up(), "input flag is not up");
      out_flag(j, j.out_store, j.out_stream, Status::up());
      return;
    }
    if (r == "F-Exc") {
      arity(n, 0);
      need(j.flag.is_exc(), "input flag is not exc");
      out_flag(j, j.out_store, j.stream, j.flag);
      return;
    }
    need(j.flag.is_down(), "input flag is not down");
    const Status down = Status::down();
    if (r == "F-Skip") {
      kind(Cmd::Kind::Skip);
      arity(n, 0);
      out_flag(j, j.store, j.stream, down);
    } else if (r == "F-Alloc") {
      kind(Cmd::Kind::Alloc);
      arity(n, 0);
      need(!j.store.count(c.var()), c.var() + " already in dom");
      out_flag(j, store_update(j.store, c.var(), Val::null()), j.stream, down);
    } else if (r == "F-Assign") {
      kind(Cmd::Kind::Assign);
      arity(n, 1);
      need(j.store.count(c.var()), c.var() + " not in dom");
      const auto& e = in_fexpr(prem(n, 0), c.expr(), j.store, j.stream, down);
      out_flag(j, store_update(j.store, c.var(), e.value), e.out_stream, e.out_flag);
    } else if (r == "F-Seq") {
      kind(Cmd::Kind::Seq);
      arity(n, 2);
      const auto& p1 = in_flag(prem(n, 0), c.left(), j.store, j.stream, down);
      const auto& p2 = in_flag(prem(n, 1), c.right(), p1.out_store, p1.out_stream, p1.out_flag);
      out_flag(j, p2.out_store, p2.out_stream, p2.out_flag);
    } else if (r == "F-If" || r == "F-IfZ") {
      kind(Cmd::Kind::If);
      arity(n, 2);
      const auto& e = in_fexpr(prem(n, 0), c.expr(), j.store, j.stream, down);
      const bool zero = r == "F-IfZ";
      need(e.value.is_zero() == zero, "guard value does not select this rule");
      const auto& p =
          in_flag(prem(n, 1), zero ? c.right() : c.left(), j.store, e.out_stream, e.out_flag);
      out_flag(j, p.out_store, p.out_stream, p.out_flag);
    } else if (r == "F-While") {
      kind(Cmd::Kind::While);
      arity(n, 3);
      const auto& e = in_fexpr(prem(n, 0), c.expr(), j.store, j.stream, down);
      need(!e.value.is_zero(), "guard is 0");
      const auto& body = in_flag(prem(n, 1), c.left(), j.store, e.out_stream, e.out_flag);
      const auto& rest = in_flag(prem(n, 2), c, body.out_store, body.out_stream, body.out_flag);
      out_flag(j, rest.out_store, rest.out_stream, rest.out_flag);
    } else if (r == "F-WhileZ") {
      kind(Cmd::Kind::While);
      arity(n, 1);
      const auto& e = in_fexpr(prem(n, 0), c.expr(), j.store, j.stream, down);
      need(e.value.is_zero(), "guard is not 0");
      out_flag(j, j.store, e.out_stream, e.out_flag);
    } else if (r == "F-Throw") {
      kind(Cmd::Kind::Throw);
      arity(n, 0);
      out_flag(j, j.out_store, j.stream, Status::exc(c.thrown(), j.store));
    } else if (r == "F-Catch") {
      kind(Cmd::Kind::Catch);
      arity(n, 1);
      const auto& p = in_flag(prem(n, 0), c.left(), j.store, j.stream, down);
      need(!p.out_flag.is_exc(), "body raised an exception");
      out_flag(j, p.out_store, p.out_stream, p.out_flag);
    } else if (r == "F-Catch-Some") {
      kind(Cmd::Kind::Catch);
      arity(n, 2);
      const auto& p1 = in_flag(prem(n, 0), c.left(), j.store, j.stream, down);
      need(p1.out_flag.is_exc(), "body did not raise an exception");
      const auto& p2 = in_flag(prem(n, 1), c.right(), p1.out_flag.at(), p1.out_stream, down);
      out_flag(j, p2.out_store, p2.out_stream, p2.out_flag);
    } else {
      need(false, "unknown rule");
    }
  }

  const DerivationGraph& g_;
  ProofSystem sys_;
  CheckOptions opt_;
  const std::set<std::string>& abs_;
};

}  // namespace

CheckResult check_derivation_graph(const DerivationGraph& g, ProofSystem system,
                                   const CheckOptions& opt) {
  return Checker(g, system, opt).run();
}

CheckResult check_certificate(const Certificate& c, const CheckOptions& opt) {
  if (auto* l = std::get_if<Lasso>(&c.body)) return check_lasso(*l);
  const auto& g = std::get<DerivationGraph>(c.body);
  return check_derivation_graph(g, g.system, opt);
}

// ---------------------------------------------------------------------------
// Graph construction
//
// A divergent judgment has exactly one divergent premise, so the certificate
// is a chain of divergent nodes with finite subtrees hanging off it. The chain
// is followed until its next judgment (projected) has been seen; that premise
// becomes a back edge.

namespace {

constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

template <class J>
struct Link {
  std::string rule;
  std::vector<std::size_t> premises;
  std::size_t slot = kNoSlot;  // index of the divergent premise
  std::optional<J> next;
};

template <class J, class KeyFn, class StepFn>
std::optional<DerivationGraph> build_chain(ProofSystem sys, const Abstraction& abs, J start,
                                           KeyFn key, StepFn step_fn, std::size_t budget) {
  DerivationGraph g;
  g.system = sys;
  g.abstraction = abs.vars;
  std::unordered_map<std::string, std::size_t> memo;
  std::size_t pending_node = kNoSlot, pending_slot = 0;
  auto patch = [&](std::size_t target) {
    if (pending_node != kNoSlot) g.nodes[pending_node].premises[pending_slot] = target;
  };
  J cur = std::move(start);
  for (std::size_t n = 0;; ++n) {
    std::string k = key(cur);
    if (auto it = memo.find(k); it != memo.end()) {
      patch(it->second);
      return g;
    }
    if (n >= budget) return std::nullopt;
    const std::size_t id = g.add(cur, "");
    memo.emplace(std::move(k), id);
    if (n == 0)
      g.root = id;
    else
      patch(id);
    std::optional<Link<J>> link = step_fn(g, cur);
    if (!link) return std::nullopt;
    g.nodes[id].rule = std::move(link->rule);
    g.nodes[id].premises = std::move(link->premises);
    if (!link->next) return g;
    pending_node = id;
    pending_slot = link->slot;
    cur = std::move(*link->next);
  }
}

std::string stream_key(const InputStream& in) { return pretty_stream(in); }

std::optional<DerivationGraph> build_div_pred(const Cmd& c, const Store& s, const InputStream& in,
                                              std::uint64_t fuel, const Abstraction& abs,
                                              std::size_t budget) {
  auto key = [&](const DivJudgment& j) {
    return pretty_cmd(j.cmd) + "|" + pretty_store(project(j.store, abs.vars)) + "|" +
           stream_key(j.stream);
  };
  auto step_fn = [&](DerivationGraph&, const DivJudgment& j) -> std::optional<Link<DivJudgment>> {
    const Cmd& c = j.cmd;
    Link<DivJudgment> l;
    l.premises = {0};
    l.slot = 0;
    switch (c.kind()) {
      case Cmd::Kind::Seq: {
        auto r = eval_big(c.left(), j.store, j.stream, fuel);
        if (auto* d = std::get_if<Done>(&r)) {
          l.rule = "D-Seq2";
          l.next = DivJudgment{c.right(), d->store, d->stream};
        } else if (std::holds_alternative<OutOfFuel>(r)) {
          l.rule = "D-Seq1";
          l.next = DivJudgment{c.left(), j.store, j.stream};
        } else {
          return std::nullopt;
        }
        return l;
      }
      case Cmd::Kind::If: {
        auto r = eval_expr(c.expr(), j.store, j.stream);
        auto* v = std::get_if<ExprValue>(&r);
        if (!v) return std::nullopt;
        const bool zero = v->value.is_zero();
        l.rule = zero ? "D-IfZ" : "D-If";
        l.next = DivJudgment{zero ? c.right() : c.left(), j.store, v->stream};
        return l;
      }
      case Cmd::Kind::While: {
        auto r = eval_expr(c.expr(), j.store, j.stream);
        auto* v = std::get_if<ExprValue>(&r);
        if (!v || v->value.is_zero()) return std::nullopt;
        auto b = eval_big(c.left(), j.store, v->stream, fuel);
        if (auto* d = std::get_if<Done>(&b)) {
          l.rule = "D-While";
          l.next = DivJudgment{c, d->store, d->stream};
        } else if (std::holds_alternative<OutOfFuel>(b)) {
          l.rule = "D-WhileBody";
          l.next = DivJudgment{c.left(), j.store, v->stream};
        } else {
          return std::nullopt;
        }
        return l;
      }
      default:
        return std::nullopt;
    }
  };
  return build_chain(ProofSystem::DivPred, abs, DivJudgment{c, s, in}, key, step_fn, budget);
}

PrettyJudgment pretty_div(SemCmd c, Store s, InputStream in) {
  return PrettyJudgment{std::move(c), std::move(s), std::move(in), Outcome::div(), InputStream()};
}

std::optional<DerivationGraph> build_pretty_co(const Cmd& c, const Store& s,
                                               const InputStream& in, std::uint64_t fuel,
                                               const Abstraction& abs, std::size_t budget) {
  auto key = [&](const PrettyJudgment& j) {
    return pretty_semcmd(project(j.cmd, abs.vars)) + "|" +
           pretty_store(project(j.store, abs.vars)) + "|" + stream_key(j.stream);
  };
  using L = Link<PrettyJudgment>;
  // Converging sub-derivation, or nullopt when it runs out of fuel.
  struct Sub {
    bool stuck = false;
    std::optional<DoneP> done;
    std::size_t node = 0;
  };
  auto sub = [&](DerivationGraph& g, const SemCmd& C, const Store& st,
                 const InputStream& is) -> Sub {
    PrettyRun r = run_pretty(C, st, is, fuel, true);
    Sub out;
    if (auto* d = std::get_if<DoneP>(&r.result)) {
      out.done = *d;
      out.node = g.splice(*r.tree);
    } else {
      out.stuck = std::holds_alternative<StuckP>(r.result);
    }
    return out;
  };
  auto step_fn = [&](DerivationGraph& g, const PrettyJudgment& j) -> std::optional<L> {
    const SemCmd& C = j.cmd;
    const Cmd& c = C.cmd;
    L l;
    auto guard = [&](const Expr& e) -> std::optional<std::pair<ExprValue, std::size_t>> {
      auto r = eval_expr(e, j.store, j.stream);
      auto* v = std::get_if<ExprValue>(&r);
      if (!v) return std::nullopt;
      return std::make_pair(*v, *add_expr_tree(g, e, j.store, j.stream));
    };
    switch (C.kind) {
      case SemCmd::Kind::Plain:
        switch (c.kind()) {
          case Cmd::Kind::Seq: {
            Sub p1 = sub(g, SemCmd::plain(c.left()), j.store, j.stream);
            if (p1.stuck) return std::nullopt;
            l.rule = "P-Seq1";
            if (p1.done) {
              l.premises = {p1.node, 0};
              l.slot = 1;
              l.next = pretty_div(SemCmd::seq2(p1.done->outcome, c.right()), j.store,
                                  p1.done->stream);
            } else {
              std::size_t abort = g.add(
                  pretty_div(SemCmd::seq2(Outcome::div(), c.right()), j.store, InputStream()),
                  "P-Seq-Abort");
              l.premises = {0, abort};
              l.slot = 0;
              l.next = pretty_div(SemCmd::plain(c.left()), j.store, j.stream);
            }
            return l;
          }
          case Cmd::Kind::If: {
            auto e = guard(c.expr());
            if (!e) return std::nullopt;
            l.rule = "P-If";
            l.premises = {e->second, 0};
            l.slot = 1;
            l.next = pretty_div(SemCmd::if2(e->first.value, c.left(), c.right()), j.store,
                                e->first.stream);
            return l;
          }
          case Cmd::Kind::While: {
            auto e = guard(c.expr());
            if (!e) return std::nullopt;
            l.rule = "P-While";
            l.premises = {e->second, 0};
            l.slot = 1;
            l.next = pretty_div(SemCmd::while2(e->first.value, c.expr(), c.left()), j.store,
                                e->first.stream);
            return l;
          }
          default:
            return std::nullopt;
        }
      case SemCmd::Kind::Seq2:
        if (C.outcome.is_div()) {
          l.rule = "P-Seq-Abort";
          return l;
        }
        l.rule = "P-Seq2";
        l.premises = {0};
        l.slot = 0;
        l.next = pretty_div(SemCmd::plain(c), C.outcome.store(), j.stream);
        return l;
      case SemCmd::Kind::If2: {
        const bool zero = C.value.is_zero();
        l.rule = zero ? "P-IfZ2" : "P-If2";
        l.premises = {0};
        l.slot = 0;
        l.next = pretty_div(SemCmd::plain(zero ? C.alt : c), j.store, j.stream);
        return l;
      }
      case SemCmd::Kind::While2: {
        if (C.value.is_zero()) return std::nullopt;
        Sub body = sub(g, SemCmd::plain(c), j.store, j.stream);
        if (body.stuck) return std::nullopt;
        l.rule = "P-While2";
        if (body.done) {
          l.premises = {body.node, 0};
          l.slot = 1;
          l.next = pretty_div(SemCmd::while3(body.done->outcome, C.guard, c), j.store,
                              body.done->stream);
        } else {
          std::size_t abort =
              g.add(pretty_div(SemCmd::while3(Outcome::div(), C.guard, c), j.store, InputStream()),
                    "P-While-Abort");
          l.premises = {0, abort};
          l.slot = 0;
          l.next = pretty_div(SemCmd::plain(c), j.store, j.stream);
        }
        return l;
      }
      case SemCmd::Kind::While3:
        if (C.outcome.is_div()) {
          l.rule = "P-While-Abort";
          return l;
        }
        l.rule = "P-While3";
        l.premises = {0};
        l.slot = 0;
        l.next = pretty_div(SemCmd::plain(Cmd::while_(C.guard, c)), C.outcome.store(), j.stream);
        return l;
      case SemCmd::Kind::Assign2:
        return std::nullopt;
    }
    return std::nullopt;
  };
  return build_chain(ProofSystem::PrettyCo, abs, pretty_div(SemCmd::plain(c), s, in), key, step_fn,
                     budget);
}

FlagJudgment flag_div(Cmd c, Store s, InputStream in) {
  return FlagJudgment{std::move(c), std::move(s), std::move(in), Status::down(), {},
                      InputStream(),  Status::up()};
}

FlagJudgment flag_up(Cmd c) {
  return FlagJudgment{std::move(c), {}, InputStream(), Status::up(), {}, InputStream(),
                      Status::up()};
}

std::optional<DerivationGraph> build_flag_chain(const Cmd& c, const Store& s,
                                                const InputStream& in, std::uint64_t fuel,
                                                const Abstraction& abs, std::size_t budget) {
  auto key = [&](const FlagJudgment& j) {
    return pretty_cmd(j.cmd) + "|" + pretty_store(project(j.store, abs.vars)) + "|" +
           stream_key(j.stream);
  };
  using L = Link<FlagJudgment>;
  struct Sub {
    bool fuel_out = false;
    std::optional<FlagResult> done;
    std::size_t node = 0;
  };
  auto sub = [&](DerivationGraph& g, const Cmd& c, const Store& st, const InputStream& is) {
    FlagOptions opt;
    opt.record_tree = true;
    FlagRun r = run_flag(c, st, Status::down(), is, fuel, opt);
    Sub out;
    if (auto* d = std::get_if<FlagResult>(&r.result)) {
      out.done = *d;
      out.node = g.splice(*r.tree);
    } else {
      out.fuel_out = std::holds_alternative<OutOfFuelF>(r.result);
    }
    return out;
  };
  auto step_fn = [&](DerivationGraph& g, const FlagJudgment& j) -> std::optional<L> {
    const Cmd& c = j.cmd;
    L l;
    auto guard = [&](const Expr& e) -> std::optional<std::pair<ExprValue, std::size_t>> {
      auto r = eval_expr(e, j.store, j.stream);
      auto* v = std::get_if<ExprValue>(&r);
      if (!v) return std::nullopt;
      auto id = add_flag_expr_tree(g, e, j.store, Status::down(), j.stream);
      return std::make_pair(*v, *id);
    };
    switch (c.kind()) {
      case Cmd::Kind::Seq: {
        Sub p1 = sub(g, c.left(), j.store, j.stream);
        l.rule = "F-Seq";
        if (p1.done) {
          if (!p1.done->status.is_down()) return std::nullopt;
          l.premises = {p1.node, 0};
          l.slot = 1;
          l.next = flag_div(c.right(), p1.done->store, p1.done->stream);
        } else if (p1.fuel_out) {
          std::size_t up = g.add(flag_up(c.right()), "F-Div");
          l.premises = {0, up};
          l.slot = 0;
          l.next = flag_div(c.left(), j.store, j.stream);
        } else {
          return std::nullopt;
        }
        return l;
      }
      case Cmd::Kind::If: {
        auto e = guard(c.expr());
        if (!e) return std::nullopt;
        const bool zero = e->first.value.is_zero();
        l.rule = zero ? "F-IfZ" : "F-If";
        l.premises = {e->second, 0};
        l.slot = 1;
        l.next = flag_div(zero ? c.right() : c.left(), j.store, e->first.stream);
        return l;
      }
      case Cmd::Kind::While: {
        auto e = guard(c.expr());
        if (!e || e->first.value.is_zero()) return std::nullopt;
        Sub body = sub(g, c.left(), j.store, e->first.stream);
        l.rule = "F-While";
        if (body.done) {
          if (!body.done->status.is_down()) return std::nullopt;
          l.premises = {e->second, body.node, 0};
          l.slot = 2;
          l.next = flag_div(c, body.done->store, body.done->stream);
        } else if (body.fuel_out) {
          std::size_t up = g.add(flag_up(c), "F-Div");
          l.premises = {e->second, 0, up};
          l.slot = 1;
          l.next = flag_div(c.left(), j.store, e->first.stream);
        } else {
          return std::nullopt;
        }
        return l;
      }
      case Cmd::Kind::Catch: {
        Sub body = sub(g, c.left(), j.store, j.stream);
        if (body.done) {
          if (!body.done->status.is_exc()) return std::nullopt;
          l.rule = "F-Catch-Some";
          l.premises = {body.node, 0};
          l.slot = 1;
          l.next = flag_div(c.right(), body.done->status.at(), body.done->stream);
        } else if (body.fuel_out) {
          l.rule = "F-Catch";
          l.premises = {0};
          l.slot = 0;
          l.next = flag_div(c.left(), j.store, j.stream);
        } else {
          return std::nullopt;
        }
        return l;
      }
      default:
        return std::nullopt;
    }
  };
  return build_chain(ProofSystem::FlagCo, abs, flag_div(c, s, in), key, step_fn, budget);
}

}  // namespace

std::optional<DerivationGraph> prove_divergence(const Cmd& c, const Store& s,
                                                const InputStream& in, ProofSystem system,
                                                std::uint64_t fuel, const Abstraction& abs) {
  auto lasso = detect_lasso(SmallConfig{c, s, in}, fuel, abs);
  if (!lasso) return std::nullopt;
  // A terminating sub-run visits pairwise distinct (projected) configurations,
  // so it takes fewer small steps than the lasso has configurations.
  const std::uint64_t len = lasso->prefix.size() + lasso->cycle.size();
  const std::uint64_t sub_fuel = 8 * len + 64;
  const std::size_t budget = (cmd_size(c) + 4) * (len + 2) * 4;
  switch (system) {
    case ProofSystem::DivPred:
      return build_div_pred(c, s, in, sub_fuel, abs, budget);
    case ProofSystem::PrettyCo:
      return build_pretty_co(c, s, in, 3 * sub_fuel, abs, budget);
    case ProofSystem::FlagCo:
      return build_flag_chain(c, s, in, sub_fuel, abs, budget);
    case ProofSystem::BigStep:
      break;
  }
  return std::nullopt;
}

std::optional<DerivationGraph> build_flag_co(const Cmd& c, const Store& s, const InputStream& in,
                                             std::uint64_t eval_fuel, const Abstraction& abs,
                                             std::size_t node_budget) {
  check_abstraction(c, abs);
  return build_flag_chain(c, s, in, eval_fuel, abs, node_budget);
}

Verdict classify(const Cmd& c, const Store& s, const InputStream& in, std::uint64_t fuel,
                 const Abstraction& abs) {
  check_abstraction(c, abs);
  if (uses_exceptions(c)) {
    FlagRun r = run_flag(c, s, Status::down(), in, 2 * fuel + 1);
    if (!std::holds_alternative<OutOfFuelF>(r.result)) return flag_verdict(r.result, fuel);
    auto g = build_flag_co(c, s, in, 2 * fuel + 1, abs);
    if (g && check_derivation_graph(*g, ProofSystem::FlagCo)) {
      const std::size_t n = g->nodes.size();
      auto cert = std::make_shared<Certificate>(Certificate{std::move(*g)});
      return DivergesProven{cert, "flag-co graph, nodes=" + std::to_string(n)};
    }
    return Unknown{fuel};
  }
  SmallRun run = run_star(SmallConfig{c, s, in}, fuel, false);
  if (!std::holds_alternative<Unknown>(run.verdict)) return run.verdict;
  auto lasso = detect_lasso(SmallConfig{c, s, in}, fuel, abs);
  if (!lasso) return Unknown{fuel};
  const std::size_t cycle = lasso->cycle.size();
  auto cert = std::make_shared<Certificate>(Certificate{std::move(*lasso)});
  return DivergesProven{cert, "lasso, cycle=" + std::to_string(cycle)};
}

}  // namespace whilesos
