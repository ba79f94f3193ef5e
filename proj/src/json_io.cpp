#include "whilesos/json_io.hpp"

#include "whilesos/parser.hpp"

namespace whilesos {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw FormatError(std::string("field \"") + key + "\" is not a string");
  return v.get<std::string>();
}

template <class F>
auto parsed(F&& f, const std::string& what) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw FormatError(what + ": " + e.what());
  }
}

Cmd cmd_field(const json& j, const char* key) {
  std::string s = text(j, key);
  return parsed([&] { return parse_cmd(s); }, key);
}

Expr expr_field(const json& j, const char* key) {
  std::string s = text(j, key);
  return parsed([&] { return parse_expr(s); }, key);
}

const char* form_name(SemCmd::Kind k) {
  switch (k) {
    case SemCmd::Kind::Plain: return "plain";
    case SemCmd::Kind::Assign2: return "assign2";
    case SemCmd::Kind::Seq2: return "seq2";
    case SemCmd::Kind::If2: return "if2";
    case SemCmd::Kind::While2: return "while2";
    case SemCmd::Kind::While3: return "while3";
  }
  return "?";
}

}  // namespace

json val_to_json(const Val& v) { return v.is_null() ? json(nullptr) : json(v.as_nat()); }

Val val_from_json(const json& j) {
  if (j.is_null()) return Val::null();
  if (j.is_number_unsigned()) return Val::nat(j.get<std::uint64_t>());
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return Val::nat(static_cast<std::uint64_t>(j.get<std::int64_t>()));
  throw FormatError("value must be a natural number or null, got " + j.dump());
}

json store_to_json(const Store& s) {
  json out = json::object();
  for (const auto& [x, v] : s) out[x] = val_to_json(v);
  return out;
}

Store store_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("store must be an object");
  Store s;
  for (const auto& [x, v] : j.items()) s[x] = val_from_json(v);
  return s;
}

json stream_to_json(const InputStream& in) {
  json out = json::array();
  for (const Val& v : in.remaining()) out.push_back(val_to_json(v));
  return out;
}

InputStream stream_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("stream must be an array");
  std::vector<Val> vs;
  for (const auto& v : j) vs.push_back(val_from_json(v));
  return InputStream(std::move(vs));
}

json status_to_json(const Status& s) {
  if (s.is_down()) return "down";
  if (s.is_up()) return "up";
  return {{"exc", {{"value", val_to_json(s.thrown())}, {"store", store_to_json(s.at())}}}};
}

Status status_from_json(const json& j) {
  if (j == "down") return Status::down();
  if (j == "up") return Status::up();
  const json& e = field(j, "exc");
  return Status::exc(val_from_json(field(e, "value")), store_from_json(field(e, "store")));
}

json outcome_to_json(const Outcome& o) {
  if (o.is_div()) return "div";
  return {{"conv", store_to_json(o.store())}};
}

Outcome outcome_from_json(const json& j) {
  if (j == "div") return Outcome::div();
  return Outcome::conv(store_from_json(field(j, "conv")));
}

json semcmd_to_json(const SemCmd& c) {
  json out = {{"form", form_name(c.kind)}};
  switch (c.kind) {
    case SemCmd::Kind::Plain:
      out["cmd"] = pretty_cmd(c.cmd);
      break;
    case SemCmd::Kind::Assign2:
      out["var"] = c.var;
      out["value"] = val_to_json(c.value);
      break;
    case SemCmd::Kind::Seq2:
      out["outcome"] = outcome_to_json(c.outcome);
      out["cmd"] = pretty_cmd(c.cmd);
      break;
    case SemCmd::Kind::If2:
      out["value"] = val_to_json(c.value);
      out["then"] = pretty_cmd(c.cmd);
      out["else"] = pretty_cmd(c.alt);
      break;
    case SemCmd::Kind::While2:
      out["value"] = val_to_json(c.value);
      out["guard"] = pretty_expr(c.guard);
      out["body"] = pretty_cmd(c.cmd);
      break;
    case SemCmd::Kind::While3:
      out["outcome"] = outcome_to_json(c.outcome);
      out["guard"] = pretty_expr(c.guard);
      out["body"] = pretty_cmd(c.cmd);
      break;
  }
  return out;
}

SemCmd semcmd_from_json(const json& j) {
  const std::string form = text(j, "form");
  if (form == "plain") return SemCmd::plain(cmd_field(j, "cmd"));
  if (form == "assign2") return SemCmd::assign2(text(j, "var"), val_from_json(field(j, "value")));
  if (form == "seq2") return SemCmd::seq2(outcome_from_json(field(j, "outcome")), cmd_field(j, "cmd"));
  if (form == "if2")
    return SemCmd::if2(val_from_json(field(j, "value")), cmd_field(j, "then"), cmd_field(j, "else"));
  if (form == "while2")
    return SemCmd::while2(val_from_json(field(j, "value")), expr_field(j, "guard"),
                          cmd_field(j, "body"));
  if (form == "while3")
    return SemCmd::while3(outcome_from_json(field(j, "outcome")), expr_field(j, "guard"),
                          cmd_field(j, "body"));
  throw FormatError("unknown semantic command form " + form);
}

json judgment_to_json(const Judgment& jd) {
  json out = {{"relation", relation_symbol(jd)}};
  std::visit(
      [&](const auto& j) {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, ExprJudgment>) {
          out["expr"] = pretty_expr(j.expr);
          out["store"] = store_to_json(j.store);
          out["stream"] = stream_to_json(j.stream);
          out["value"] = val_to_json(j.value);
          out["out_stream"] = stream_to_json(j.out_stream);
        } else if constexpr (std::is_same_v<T, BigJudgment>) {
          out["cmd"] = pretty_cmd(j.cmd);
          out["store"] = store_to_json(j.store);
          out["stream"] = stream_to_json(j.stream);
          out["out_store"] = store_to_json(j.out_store);
          out["out_stream"] = stream_to_json(j.out_stream);
        } else if constexpr (std::is_same_v<T, DivJudgment>) {
          out["cmd"] = pretty_cmd(j.cmd);
          out["store"] = store_to_json(j.store);
          out["stream"] = stream_to_json(j.stream);
        } else if constexpr (std::is_same_v<T, PrettyJudgment>) {
          out["cmd"] = semcmd_to_json(j.cmd);
          out["store"] = store_to_json(j.store);
          out["stream"] = stream_to_json(j.stream);
          out["outcome"] = outcome_to_json(j.outcome);
          out["out_stream"] = stream_to_json(j.out_stream);
        } else if constexpr (std::is_same_v<T, FlagExprJudgment>) {
          out["expr"] = pretty_expr(j.expr);
          out["store"] = store_to_json(j.store);
          out["stream"] = stream_to_json(j.stream);
          out["flag"] = status_to_json(j.flag);
          out["value"] = val_to_json(j.value);
          out["out_stream"] = stream_to_json(j.out_stream);
          out["out_flag"] = status_to_json(j.out_flag);
        } else {
          out["cmd"] = pretty_cmd(j.cmd);
          out["store"] = store_to_json(j.store);
          out["stream"] = stream_to_json(j.stream);
          out["flag"] = status_to_json(j.flag);
          out["out_store"] = store_to_json(j.out_store);
          out["out_stream"] = stream_to_json(j.out_stream);
          out["out_flag"] = status_to_json(j.out_flag);
        }
      },
      jd);
  return out;
}

Judgment judgment_from_json(const json& j) {
  const std::string rel = text(j, "relation");
  auto store = [&](const char* k) { return store_from_json(field(j, k)); };
  auto stream = [&](const char* k) { return stream_from_json(field(j, k)); };
  auto status = [&](const char* k) { return status_from_json(field(j, k)); };
  if (rel == "=E=>")
    return ExprJudgment{expr_field(j, "expr"), store("store"), stream("stream"),
                        val_from_json(field(j, "value")), stream("out_stream")};
  if (rel == "=B=>")
    return BigJudgment{cmd_field(j, "cmd"), store("store"), stream("stream"), store("out_store"),
                       stream("out_stream")};
  if (rel == "=inf=>") return DivJudgment{cmd_field(j, "cmd"), store("store"), stream("stream")};
  if (rel == "=v")
    return PrettyJudgment{semcmd_from_json(field(j, "cmd")), store("store"), stream("stream"),
                          outcome_from_json(field(j, "outcome")), stream("out_stream")};
  if (rel == "=GE=>")
    return FlagExprJudgment{expr_field(j, "expr"), store("store"),  stream("stream"),
                            status("flag"),        val_from_json(field(j, "value")),
                            stream("out_stream"),  status("out_flag")};
  if (rel == "=G=>")
    return FlagJudgment{cmd_field(j, "cmd"),  store("store"),      stream("stream"),
                        status("flag"),       store("out_store"),  stream("out_stream"),
                        status("out_flag")};
  throw FormatError("unknown relation " + rel);
}

json graph_to_json(const DerivationGraph& g) {
  json nodes = json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    nodes.push_back({{"id", i},
                     {"rule", n.rule},
                     {"judgment", judgment_to_json(n.judgment)},
                     {"premises", n.premises}});
  }
  return {{"kind", "derivation-graph"},
          {"system", system_name(g.system)},
          {"abstraction", g.abstraction},
          {"root", g.root},
          {"nodes", std::move(nodes)}};
}

DerivationGraph graph_from_json(const json& j) {
  if (text(j, "kind") != "derivation-graph") throw FormatError("not a derivation graph");
  DerivationGraph g;
  try {
    g.system = parse_system(text(j, "system"));
    if (j.contains("abstraction")) g.abstraction = j.at("abstraction").get<std::set<std::string>>();
    g.root = field(j, "root").get<std::size_t>();
    const json& nodes = field(j, "nodes");
    if (!nodes.is_array()) throw FormatError("nodes must be an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const json& n = nodes[i];
      if (n.contains("id") && n.at("id").get<std::size_t>() != i)
        throw FormatError("node ids must be 0..n-1 in order");
      g.add(judgment_from_json(field(n, "judgment")), text(n, "rule"),
            field(n, "premises").get<std::vector<std::size_t>>());
    }
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return g;
}

json config_to_json(const SmallConfig& c) {
  return {{"cmd", pretty_cmd(c.cmd)},
          {"store", store_to_json(c.store)},
          {"stream", stream_to_json(c.stream)}};
}

SmallConfig config_from_json(const json& j) {
  return SmallConfig{cmd_field(j, "cmd"), store_from_json(field(j, "store")),
                     stream_from_json(field(j, "stream"))};
}

json lasso_to_json(const Lasso& l) {
  json prefix = json::array(), cycle = json::array();
  for (const auto& c : l.prefix) prefix.push_back(config_to_json(c));
  for (const auto& c : l.cycle) cycle.push_back(config_to_json(c));
  return {{"kind", "lasso"},
          {"abstraction", l.abstraction.vars},
          {"prefix", std::move(prefix)},
          {"cycle", std::move(cycle)}};
}

Lasso lasso_from_json(const json& j) {
  if (text(j, "kind") != "lasso") throw FormatError("not a lasso");
  Lasso l;
  try {
    if (j.contains("abstraction")) l.abstraction.vars = j.at("abstraction").get<std::set<std::string>>();
    for (const auto& c : field(j, "prefix")) l.prefix.push_back(config_from_json(c));
    for (const auto& c : field(j, "cycle")) l.cycle.push_back(config_from_json(c));
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
  return l;
}

json certificate_to_json(const Certificate& c) {
  if (auto* l = std::get_if<Lasso>(&c.body)) return lasso_to_json(*l);
  return graph_to_json(std::get<DerivationGraph>(c.body));
}

Certificate certificate_from_json(const json& j) {
  const std::string kind = text(j, "kind");
  if (kind == "lasso") return Certificate{lasso_from_json(j)};
  if (kind == "derivation-graph") return Certificate{graph_from_json(j)};
  throw FormatError("unknown certificate kind " + kind);
}

json trace_to_json(const Trace& t) {
  json out = json::array();
  for (std::size_t i = 0; i < t.configs.size(); ++i) {
    const auto& c = t.configs[i];
    out.push_back({{"index", i},
                   {"cmd", pretty_cmd(c.cmd)},
                   {"store", store_to_json(c.store)},
                   {"stream-cursor", c.stream.cursor()}});
  }
  return out;
}

json verdict_to_json(const Verdict& v) {
  json out = {{"verdict", verdict_class(v)}};
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Converged>) {
          out["store"] = store_to_json(x.store);
        } else if constexpr (std::is_same_v<T, ExceptionV>) {
          out["value"] = val_to_json(x.value);
          out["store"] = store_to_json(x.store);
        } else if constexpr (std::is_same_v<T, Stuck>) {
          out["reason"] = x.reason;
        } else if constexpr (std::is_same_v<T, DivergesProven>) {
          out["summary"] = x.summary;
          if (x.certificate) out["certificate"] = certificate_to_json(*x.certificate);
        } else {
          out["fuel"] = x.fuel;
        }
      },
      v);
  return out;
}

}  // namespace whilesos
