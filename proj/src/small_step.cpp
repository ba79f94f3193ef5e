#include "whilesos/small_step.hpp"

#include <sstream>

#include "whilesos/parser.hpp"

namespace whilesos {

std::size_t SmallConfig::hash() const {
  std::size_t h = cmd.hash();
  h ^= hash_store(store) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= stream.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

ExprResult eval_expr(const Expr& e, const Store& s, const InputStream& in) {
  switch (e.kind()) {
    case Expr::Kind::Lit:
      return ExprValue{e.value(), in};
    case Expr::Kind::Var: {
      auto v = store_lookup(s, e.name());
      if (!v) return ExprStuck{"unbound variable " + e.name()};
      return ExprValue{*v, in};
    }
    case Expr::Kind::Input: {
      auto next = in.pop();
      if (!next) return ExprStuck{"input stream exhausted"};
      return ExprValue{next->first, next->second};
    }
    case Expr::Kind::Bop: {
      auto l = eval_expr(e.lhs(), s, in);
      if (auto* st = std::get_if<ExprStuck>(&l)) return *st;
      const auto& lv = std::get<ExprValue>(l);
      auto r = eval_expr(e.rhs(), s, lv.stream);
      if (auto* st = std::get_if<ExprStuck>(&r)) return *st;
      const auto& rv = std::get<ExprValue>(r);
      if (lv.value.is_null() || rv.value.is_null())
        return ExprStuck{std::string("null operand to ") + binop_symbol(e.op())};
      return ExprValue{Val::nat(apply_binop(e.op(), lv.value.as_nat(), rv.value.as_nat())),
                       rv.stream};
    }
  }
  return ExprStuck{"bad expression"};
}

StepResult step(const SmallConfig& cfg) {
  const Cmd& c = cfg.cmd;
  switch (c.kind()) {
    case Cmd::Kind::Skip:
      return NoStep{"terminal", true};
    case Cmd::Kind::Alloc:
      if (cfg.store.count(c.var())) return NoStep{"alloc of allocated variable " + c.var()};
      return SmallConfig{Cmd::skip(), store_update(cfg.store, c.var(), Val::null()), cfg.stream};
    case Cmd::Kind::Assign: {
      if (!cfg.store.count(c.var())) return NoStep{"assignment to unallocated " + c.var()};
      auto r = eval_expr(c.expr(), cfg.store, cfg.stream);
      if (auto* st = std::get_if<ExprStuck>(&r)) return NoStep{st->reason};
      auto& v = std::get<ExprValue>(r);
      return SmallConfig{Cmd::skip(), store_update(cfg.store, c.var(), v.value), v.stream};
    }
    case Cmd::Kind::Seq: {
      if (c.left().is_skip()) return SmallConfig{c.right(), cfg.store, cfg.stream};
      auto r = step(SmallConfig{c.left(), cfg.store, cfg.stream});
      if (auto* ns = std::get_if<NoStep>(&r)) return *ns;
      auto& next = std::get<SmallConfig>(r);
      return SmallConfig{Cmd::seq(next.cmd, c.right()), std::move(next.store),
                         std::move(next.stream)};
    }
    case Cmd::Kind::If: {
      auto r = eval_expr(c.expr(), cfg.store, cfg.stream);
      if (auto* st = std::get_if<ExprStuck>(&r)) return NoStep{st->reason};
      auto& v = std::get<ExprValue>(r);
      return SmallConfig{v.value.is_zero() ? c.right() : c.left(), cfg.store, v.stream};
    }
    case Cmd::Kind::While: {
      auto r = eval_expr(c.expr(), cfg.store, cfg.stream);
      if (auto* st = std::get_if<ExprStuck>(&r)) return NoStep{st->reason};
      auto& v = std::get<ExprValue>(r);
      if (v.value.is_zero()) return SmallConfig{Cmd::skip(), cfg.store, v.stream};
      return SmallConfig{Cmd::seq(c.left(), c), cfg.store, v.stream};
    }
    case Cmd::Kind::Throw:
    case Cmd::Kind::Catch:
      return NoStep{"no small-step rule for throw/catch"};
  }
  return NoStep{"bad command"};
}

SmallRun run_star(const SmallConfig& cfg, std::uint64_t fuel, bool record_trace) {
  SmallRun run;
  SmallConfig cur = cfg;
  if (record_trace) run.trace.configs.push_back(cur);
  for (;;) {
    if (cur.cmd.is_skip()) {
      run.trace.terminal = true;
      run.verdict = Converged{cur.store};
      break;
    }
    if (run.steps == fuel) {
      run.verdict = Unknown{fuel};
      break;
    }
    auto r = step(cur);
    if (auto* ns = std::get_if<NoStep>(&r)) {
      run.verdict = Stuck{ns->reason};
      break;
    }
    cur = std::move(std::get<SmallConfig>(r));
    ++run.steps;
    if (record_trace) run.trace.configs.push_back(cur);
  }
  run.final_stream = cur.stream;
  return run;
}

std::string trace_text(const Trace& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.configs.size(); ++i) {
    const auto& c = t.configs[i];
    out << i << "  " << pretty_cmd(c.cmd) << "  " << pretty_store(c.store) << "  @"
        << c.stream.cursor() << "\n";
  }
  return out.str();
}

}  // namespace whilesos
