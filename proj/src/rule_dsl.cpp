#include "whilesos/rule_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace whilesos {

RuleParseError::RuleParseError(const std::string& f, int l, const std::string& msg)
    : std::runtime_error(f + ":" + std::to_string(l) + ": " + msg), file(f), line(l) {}

std::size_t Rule::eval_premises() const {
  std::size_t n = 0;
  for (const auto& p : premises) n += p.is_eval();
  return n;
}

namespace {

std::optional<std::size_t> flag_pos(const std::vector<SigComponent>& cs) {
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (cs[i].highlighted) return i;
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> RelationSig::flag_in_source() const { return flag_pos(source); }
std::optional<std::size_t> RelationSig::flag_in_target() const { return flag_pos(target); }

const RelationSig* RuleSet::sig(const std::string& rel) const {
  for (const auto& s : sigs)
    if (s.name == rel) return &s;
  return nullptr;
}

bool RuleSet::has_label(const std::string& label) const {
  for (const auto& r : rules)
    if (r.label == label) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

Term tokenize(std::string_view s) {
  static const char* ops[] = {"|->", "->", ":=", ":-", "!=", "<=", ">="};
  Term out;
  bool space = false;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (ident_start(c)) {
      while (j < s.size() && ident_char(s[j])) ++j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    } else if (c == '=') {
      std::size_t k = i + 1;
      while (k < s.size() && std::isalnum(static_cast<unsigned char>(s[k]))) ++k;
      if (k + 1 < s.size() && s[k] == '=' && s[k + 1] == '>')
        j = k + 2;
      else if (i + 1 < s.size() && s[i + 1] == '>')
        j = i + 2;
    } else {
      for (const char* op : ops)
        if (s.substr(i).rfind(op, 0) == 0) {
          j = i + std::string_view(op).size();
          break;
        }
    }
    out.push_back(Token{std::string(s.substr(i, j - i)), space});
    space = false;
    i = j;
  }
  return out;
}

bool is_relation(const std::string& t) {
  return t == "->" || (t.size() >= 3 && t.front() == '=' && t.substr(t.size() - 2) == "=>");
}

struct LineError {
  std::string msg;
};

// "( t, ... )" starting at toks[i]; advances i past the closing paren.
std::vector<Term> parse_tuple(const Term& toks, std::size_t& i) {
  if (i >= toks.size() || toks[i].text != "(") throw LineError{"expected '('"};
  ++i;
  std::vector<Term> out;
  Term cur;
  int depth = 0;
  for (; i < toks.size(); ++i) {
    const std::string& t = toks[i].text;
    if (depth == 0 && (t == ")" || t == ",")) {
      if (cur.empty()) {
        if (t == ")" && out.empty()) {
          ++i;
          return out;
        }
        throw LineError{"empty component"};
      }
      out.push_back(std::move(cur));
      cur.clear();
      if (t == ")") {
        ++i;
        return out;
      }
      continue;
    }
    if (t == "(" || t == "[") ++depth;
    if (t == ")" || t == "]") --depth;
    if (depth < 0) throw LineError{"unbalanced brackets"};
    cur.push_back(toks[i]);
  }
  throw LineError{"missing ')'"};
}

Formula parse_formula(const Term& toks) {
  Formula f;
  std::size_t i = 0;
  f.source = parse_tuple(toks, i);
  if (i >= toks.size() || !is_relation(toks[i].text))
    throw LineError{"expected a relation such as =B=> after the source"};
  f.rel = toks[i++].text;
  if (i < toks.size()) f.target = parse_tuple(toks, i);
  if (i != toks.size()) throw LineError{"trailing text after formula"};
  return f;
}

std::vector<SigComponent> sig_components(const std::vector<Term>& terms) {
  std::vector<SigComponent> out;
  for (const Term& t : terms) {
    SigComponent c;
    std::size_t b = 0, e = t.size();
    if (t.front().text == "[") {
      if (t.back().text != "]") throw LineError{"unclosed '['"};
      c.highlighted = true;
      b = 1;
      e = t.size() - 1;
    }
    Term role;
    for (std::size_t k = b; k < e; ++k) {
      if (t[k].text == ":-") {
        if (!c.highlighted) throw LineError{"a default is only allowed on a highlighted flag"};
        if (k + 2 != e) throw LineError{"expected one default value after ':-'"};
        c.default_flag = t[k + 1].text;
        break;
      }
      role.push_back(t[k]);
    }
    if (role.empty()) throw LineError{"empty signature component"};
    c.role = print_term(role);
    out.push_back(std::move(c));
  }
  if (std::count_if(out.begin(), out.end(), [](const auto& c) { return c.highlighted; }) > 1)
    throw LineError{"at most one flag per side"};
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool starts_with_word(const std::string& line, const char* w) {
  std::string_view v(line), ws(w);
  return v.rfind(ws, 0) == 0 && (v.size() == ws.size() || std::isspace(static_cast<unsigned char>(v[ws.size()])));
}

void check_arity(const RuleSet& rs, const Formula& f, const Rule& r) {
  const RelationSig* s = rs.sig(f.rel);
  if (!s) throw RuleParseError(r.file, r.line, "rule " + r.label + ": undeclared relation " + f.rel);
  auto ok = [](std::size_t n, const std::vector<SigComponent>& cs, bool implicit) {
    return n + (implicit && flag_pos(cs) ? 1 : 0) == cs.size();
  };
  const bool full = f.source.size() == s->source.size();
  if (!(ok(f.source.size(), s->source, !full) && ok(f.target.size(), s->target, !full)))
    throw RuleParseError(r.file, r.line,
                         "rule " + r.label + ": wrong number of components for " + f.rel);
}

void parse_into(std::string_view text, const std::string& origin, const std::filesystem::path& dir,
                RuleSet& rs, int depth) {
  if (depth > 16) throw RuleParseError(origin, 0, "include nesting too deep");
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  std::optional<Rule> cur;
  bool concl = false;
  int rule_line = 0;
  auto fail = [&](const std::string& msg) { throw RuleParseError(origin, lineno, msg); };
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    try {
      if (!cur) {
        if (starts_with_word(line, "include")) {
          std::string name = trim(std::string_view(line).substr(7));
          if (name.size() < 2 || name.front() != '"' || name.back() != '"')
            fail("include expects a quoted file name");
          auto path = dir / name.substr(1, name.size() - 2);
          std::ifstream f(path);
          if (!f) fail("cannot open " + path.string());
          std::stringstream buf;
          buf << f.rdbuf();
          parse_into(buf.str(), path.string(), path.parent_path(), rs, depth + 1);
        } else if (starts_with_word(line, "const")) {
          for (const auto& t : tokenize(std::string_view(line).substr(5))) rs.consts.insert(t.text);
        } else if (starts_with_word(line, "sig")) {
          Formula f = parse_formula(tokenize(std::string_view(line).substr(3)));
          RelationSig s{f.rel, sig_components(f.source), sig_components(f.target)};
          if (s.flag_in_source() && !s.source[*s.flag_in_source()].default_flag)
            fail("flag of " + s.name + " needs a default");
          if (!rs.sig(s.name)) rs.sigs.push_back(std::move(s));
        } else if (starts_with_word(line, "rule")) {
          if (line.back() != ':') fail("expected 'rule LABEL:'");
          cur = Rule{};
          cur->label = trim(std::string_view(line).substr(4, line.size() - 5));
          if (cur->label.empty()) fail("missing rule label");
          cur->file = origin;
          cur->line = rule_line = lineno;
          concl = false;
        } else {
          fail("expected rule, sig, const or include");
        }
        continue;
      }
      if (concl) {
        cur->conclusion = parse_formula(tokenize(line));
        rs.rules.push_back(std::move(*cur));
        cur.reset();
      } else if (line.find_first_not_of('-') == std::string::npos && line.size() >= 3) {
        concl = true;
      } else if (starts_with_word(line, "rule")) {
        fail("rule " + cur->label + " has no '---' separator");
      } else if (starts_with_word(line, "side")) {
        Premise p;
        p.kind = Premise::Kind::Side;
        p.side = tokenize(std::string_view(line).substr(4));
        if (p.side.empty()) fail("empty side condition");
        cur->premises.push_back(std::move(p));
      } else {
        Premise p;
        p.eval = parse_formula(tokenize(line));
        cur->premises.push_back(std::move(p));
      }
    } catch (const LineError& e) {
      fail(e.msg);
    }
  }
  if (cur) {
    lineno = rule_line;
    fail(concl ? "rule " + cur->label + " has no conclusion"
               : "rule " + cur->label + " has no '---' separator");
  }
}

}  // namespace

RuleSet parse_rules(std::string_view text, const std::string& origin,
                    const std::filesystem::path& dir) {
  RuleSet rs;
  parse_into(text, origin, dir, rs, 0);
  for (const auto& r : rs.rules) {
    for (const auto& p : r.premises)
      if (p.is_eval()) check_arity(rs, p.eval, r);
    check_arity(rs, r.conclusion, r);
  }
  return rs;
}

RuleSet load_rules(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw RuleParseError(file.string(), 0, "cannot open file");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_rules(buf.str(), file.string(), file.parent_path());
}

RuleSet merge_rules(RuleSet base, const RuleSet& extra) {
  for (const auto& s : extra.sigs)
    if (!base.sig(s.name)) base.sigs.push_back(s);
  base.rules.insert(base.rules.end(), extra.rules.begin(), extra.rules.end());
  base.consts.insert(extra.consts.begin(), extra.consts.end());
  return base;
}

// ---------------------------------------------------------------------------
// Flag threading

RuleSet thread_flags(const RuleSet& rs) {
  RuleSet out = rs;
  for (auto& r : out.rules) {
    std::vector<Formula*> fs;
    for (auto& p : r.premises)
      if (p.is_eval()) fs.push_back(&p.eval);
    fs.push_back(&r.conclusion);
    std::size_t implicit = 0, explicit_ = 0;
    for (Formula* f : fs) {
      const RelationSig* s = out.sig(f->rel);
      if (!s || !s->flagged()) {
        ++explicit_;  // nothing to thread; counts against a partial threading
        continue;
      }
      (f->source.size() == s->source.size() ? explicit_ : implicit) += 1;
    }
    if (implicit == 0) continue;
    if (explicit_ > 0)
      throw MixedFlagUsage("rule " + r.label + " leaves some flags implicit but not all");

    std::set<std::string> used;
    for (Formula* f : fs)
      for (const auto* side : {&f->source, &f->target})
        for (const Term& t : *side)
          for (const Token& k : t) used.insert(k.text);
    auto fresh = [&](std::string name) {
      while (used.count(name)) name += "_";
      used.insert(name);
      return name;
    };
    auto put = [&](Formula& f, bool source, const std::string& flag) {
      const RelationSig* s = out.sig(f.rel);
      auto& comps = source ? f.source : f.target;
      const std::size_t at = *(source ? s->flag_in_source() : s->flag_in_target());
      comps.insert(comps.begin() + static_cast<std::ptrdiff_t>(at), Term{Token{flag, false}});
    };
    auto dflt = [&](const Formula& f) {
      const RelationSig* s = out.sig(f.rel);
      return *s->source[*s->flag_in_source()].default_flag;
    };

    const std::size_t n = fs.size() - 1;
    Formula& concl = r.conclusion;
    if (n == 0) {
      put(concl, true, dflt(concl));
      put(concl, false, dflt(concl));
      continue;
    }
    const std::string last = fresh("delta'");
    std::string prev = dflt(*fs[0]);
    for (std::size_t i = 0; i < n; ++i) {
      put(*fs[i], true, prev);
      std::string next = i + 1 < n ? fresh("delta" + std::to_string(i + 1)) : last;
      put(*fs[i], false, next);
      prev = next;
    }
    put(concl, true, dflt(concl));
    put(concl, false, last);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alpha-equivalence and metrics

namespace {

struct Renaming {
  const std::set<std::string>* consts;
  std::map<std::string, std::string> fwd, bwd;

  bool is_var(const std::string& t) const { return ident_start(t[0]) && !consts->count(t); }

  bool tok(const std::string& a, const std::string& b) {
    const bool va = is_var(a), vb = is_var(b);
    if (va != vb) return false;
    if (!va) return a == b;
    auto f = fwd.find(a);
    auto g = bwd.find(b);
    if (f == fwd.end() && g == bwd.end()) {
      fwd.emplace(a, b);
      bwd.emplace(b, a);
      return true;
    }
    return f != fwd.end() && g != bwd.end() && f->second == b && g->second == a;
  }

  bool term(const Term& a, const Term& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!tok(a[i].text, b[i].text)) return false;
    return true;
  }

  bool terms(const std::vector<Term>& a, const std::vector<Term>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!term(a[i], b[i])) return false;
    return true;
  }

  bool formula(const Formula& a, const Formula& b) {
    return a.rel == b.rel && terms(a.source, b.source) && terms(a.target, b.target);
  }

  // Side conditions: no new bindings, only the ones fixed by the formulae.
  bool side(const Term& a, const Term& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto f = fwd.find(a[i].text);
      if (f != fwd.end()) {
        if (f->second != b[i].text) return false;
      } else if (bwd.count(b[i].text) || a[i].text != b[i].text) {
        return false;
      }
    }
    return true;
  }
};

std::vector<const Formula*> evals(const Rule& r) {
  std::vector<const Formula*> out;
  for (const auto& p : r.premises)
    if (p.is_eval()) out.push_back(&p.eval);
  return out;
}

std::vector<const Term*> sides(const Rule& r) {
  std::vector<const Term*> out;
  for (const auto& p : r.premises)
    if (!p.is_eval()) out.push_back(&p.side);
  return out;
}

}  // namespace

bool alpha_equal(const Rule& a, const Rule& b, const std::set<std::string>& consts) {
  auto ea = evals(a), eb = evals(b);
  auto sa = sides(a), sb = sides(b);
  if (ea.size() != eb.size() || sa.size() != sb.size()) return false;
  Renaming m{&consts, {}, {}};
  for (std::size_t i = 0; i < ea.size(); ++i)
    if (!m.formula(*ea[i], *eb[i])) return false;
  if (!m.formula(a.conclusion, b.conclusion)) return false;
  std::vector<bool> taken(sb.size(), false);
  for (const Term* s : sa) {
    bool found = false;
    for (std::size_t j = 0; j < sb.size() && !found; ++j)
      if (!taken[j] && m.side(*s, *sb[j])) taken[j] = found = true;
    if (!found) return false;
  }
  return true;
}

bool alpha_equal(const RuleSet& a, const RuleSet& b) {
  if (a.rules.size() != b.rules.size()) return false;
  std::set<std::string> consts = a.consts;
  consts.insert(b.consts.begin(), b.consts.end());
  std::vector<bool> taken(b.rules.size(), false);
  for (const auto& r : a.rules) {
    bool found = false;
    for (std::size_t j = 0; j < b.rules.size() && !found; ++j)
      if (!taken[j] && alpha_equal(r, b.rules[j], consts)) taken[j] = found = true;
    if (!found) return false;
  }
  return true;
}

RuleMetrics count_metrics(const RuleSet& rs, const RuleSet* base) {
  RuleMetrics m;
  m.rules = rs.rules.size();
  for (const auto& r : rs.rules) m.premises += r.eval_premises();
  if (!base) return m;
  std::set<std::string> consts = rs.consts;
  consts.insert(base->consts.begin(), base->consts.end());
  std::size_t dups = 0;
  for (const auto& r : rs.rules) {
    if (base->has_label(r.label)) continue;
    for (const Formula* p : evals(r)) {
      bool dup = false;
      for (const auto& b : base->rules) {
        Renaming u{&consts, {}, {}};
        if (!u.terms(r.conclusion.source, b.conclusion.source)) continue;
        for (const Formula* q : evals(b)) {
          Renaming v = u;
          if (v.formula(*p, *q)) {
            dup = true;
            break;
          }
        }
        if (dup) break;
      }
      dups += dup;
    }
  }
  m.duplicates = dups;
  return m;
}

// ---------------------------------------------------------------------------
// Printing

std::string print_term(const Term& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && t[i].space) out += ' ';
    out += t[i].text;
  }
  return out;
}

namespace {

std::string tuple(const std::vector<Term>& ts) {
  std::string out = "(";
  for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? ", " : "") + print_term(ts[i]);
  return out + ")";
}

std::string sig_tuple(const std::vector<SigComponent>& cs) {
  std::string out = "(";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += ", ";
    if (!cs[i].highlighted) {
      out += cs[i].role;
      continue;
    }
    out += "[" + cs[i].role;
    if (cs[i].default_flag) out += " :- " + *cs[i].default_flag;
    out += "]";
  }
  return out + ")";
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::string out = tuple(f.source) + " " + f.rel;
  if (!f.target.empty()) out += " " + tuple(f.target);
  return out;
}

std::string print_rule(const Rule& r) {
  std::string out = "rule " + r.label + ":\n";
  for (const auto& p : r.premises)
    out += (p.is_eval() ? print_formula(p.eval) : "side " + print_term(p.side)) + "\n";
  return out + "---\n" + print_formula(r.conclusion) + "\n";
}

std::string print_rules(const RuleSet& rs) {
  std::string out;
  if (!rs.consts.empty()) {
    out += "const";
    for (const auto& c : rs.consts) out += " " + c;
    out += "\n";
  }
  for (const auto& s : rs.sigs) {
    out += "sig " + sig_tuple(s.source) + " " + s.name;
    if (!s.target.empty()) out += " " + sig_tuple(s.target);
    out += "\n";
  }
  for (const auto& r : rs.rules) out += "\n" + print_rule(r);
  return out;
}

}  // namespace whilesos
