#include "whilesos/harness.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include "whilesos/big_step.hpp"
#include "whilesos/coinduction.hpp"
#include "whilesos/flag_based.hpp"
#include "whilesos/parser.hpp"
#include "whilesos/pretty_big.hpp"
#include "whilesos/small_step.hpp"

namespace whilesos {

void validate(const GenConfig& cfg) {
  if (cfg.max_depth < 1) throw std::invalid_argument("max depth must be at least 1");
  if (cfg.var_pool < 1) throw std::invalid_argument("variable pool is empty");
  if (cfg.literals.empty()) throw std::invalid_argument("literal pool is empty");
}

GenConfig throw_corpus_config(std::uint64_t seed, int max_depth) {
  GenConfig g;
  g.seed = seed;
  g.max_depth = max_depth;
  g.exceptions = true;
  g.loops = false;
  g.input = false;
  g.body_alloc = false;
  g.null_literals = false;
  g.prelude_prob = 1.0;
  g.init_prob = 1.0;
  return g;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Gen {
 public:
  explicit Gen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    static const char* names[] = {"x", "y", "z"};
    for (int i = 0; i < cfg.var_pool; ++i)
      vars_.push_back(i < 3 ? names[i] : "v" + std::to_string(i));
  }

  Cmd program() {
    std::vector<Cmd> parts;
    if (chance(cfg_.prelude_prob))
      for (const auto& v : vars_) {
        parts.push_back(Cmd::alloc(v));
        if (chance(cfg_.init_prob)) parts.push_back(Cmd::assign(v, Expr::lit(literal(false))));
      }
    parts.push_back(cmd(cfg_.max_depth));
    Cmd out = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) out = Cmd::seq(*it, out);
    return out;
  }

 private:
  enum class K { Skip, Alloc, Assign, Throw, Seq, If, While, Catch };

  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  const std::string& var() { return vars_[pick(vars_.size())]; }

  Val literal(bool allow_null) {
    if (allow_null && cfg_.null_literals && chance(0.05)) return Val::null();
    return Val::nat(cfg_.literals[pick(cfg_.literals.size())]);
  }

  Expr expr(int depth) {
    // lit, var, input, bop
    std::array<int, 4> w = {3, 3, cfg_.input ? 2 : 0, depth > 1 ? 3 : 0};
    switch (std::discrete_distribution<int>(w.begin(), w.end())(rng_)) {
      case 0: return Expr::lit(literal(true));
      case 1: return Expr::var(var());
      case 2: return Expr::input();
      default: {
        static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul};
        BinOp op = ops[pick(3)];
        Expr l = expr(depth - 1);
        return Expr::bop(op, l, expr(depth - 1));
      }
    }
  }

  Cmd cmd(int depth) {
    const GenWeights& w = cfg_.weights;
    const bool inner = depth > 1;
    std::vector<std::pair<int, K>> table = {
        {w.skip, K::Skip},
        {cfg_.body_alloc ? w.alloc : 0, K::Alloc},
        {w.assign, K::Assign},
        {cfg_.exceptions ? w.throw_ : 0, K::Throw},
        {inner ? w.seq : 0, K::Seq},
        {inner ? w.if_ : 0, K::If},
        {inner && cfg_.loops ? w.while_ : 0, K::While},
        {inner && cfg_.exceptions ? w.catch_ : 0, K::Catch},
    };
    std::vector<int> ws;
    for (const auto& [wt, k] : table) ws.push_back(std::max(wt, 0));
    const K k = table[std::discrete_distribution<std::size_t>(ws.begin(), ws.end())(rng_)].second;
    switch (k) {
      case K::Skip: return Cmd::skip();
      case K::Alloc: return Cmd::alloc(var());
      case K::Assign: {
        const std::string& x = var();
        return Cmd::assign(x, expr(2));
      }
      case K::Throw: return Cmd::throw_(literal(false));
      case K::Seq: {
        Cmd a = cmd(depth - 1);
        return Cmd::seq(a, cmd(depth - 1));
      }
      case K::If: {
        Expr g = expr(2);
        Cmd a = cmd(depth - 1);
        return Cmd::if_(g, a, cmd(depth - 1));
      }
      case K::While: {
        Expr g = expr(2);
        return Cmd::while_(g, cmd(depth - 1));
      }
      case K::Catch: {
        Cmd a = cmd(depth - 1);
        return Cmd::catch_(a, cmd(depth - 1));
      }
    }
    return Cmd::skip();
  }

  const GenConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<std::string> vars_;
};

}  // namespace

Cmd generate_program(const GenConfig& cfg) {
  validate(cfg);
  return Gen(cfg).program();
}

Cmd generate_program(const GenConfig& cfg, std::uint64_t index) {
  GenConfig c = cfg;
  c.seed = splitmix(cfg.seed ^ splitmix(index));
  return generate_program(c);
}

std::vector<InputStream> enumerate_streams(const std::vector<std::uint64_t>& alphabet,
                                           std::size_t max_len) {
  std::vector<InputStream> out;
  std::vector<std::vector<Val>> layer = {{}};
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<std::vector<Val>> next;
    for (const auto& s : layer) {
      out.emplace_back(s);
      for (auto a : alphabet) {
        auto t = s;
        t.push_back(Val::nat(a));
        next.push_back(std::move(t));
      }
    }
    layer = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Differential runs

namespace {

bool conclusive(const Verdict& v) { return !std::holds_alternative<Unknown>(v); }

std::string classes(const StreamReport& r) {
  return std::string("small=") + verdict_class(r.small) + " big=" + verdict_class(r.big) +
         " pretty=" + verdict_class(r.pretty) + " flag=" + verdict_class(r.flag);
}

void disagree(StreamReport& r, std::string why) {
  if (!r.agree) return;
  r.agree = false;
  r.reason = std::move(why);
}

StreamReport run_exceptions(const Cmd& c, const InputStream& in, std::uint64_t fuel) {
  StreamReport r;
  r.stream = in;
  r.fuel = fuel;
  const Verdict na = Stuck{"throw/catch has no rules here"};
  r.small = r.big = r.pretty = na;
  const std::uint64_t f = 2 * fuel + 1;
  FlagOptions opt;
  opt.record_tree = true;
  FlagRun run = run_flag(c, {}, Status::down(), in, f, opt);
  r.flag = flag_verdict(run.result, f);
  if (run.tree) {
    auto ok = check_derivation_graph(*run.tree, ProofSystem::FlagCo);
    if (!ok) disagree(r, "flag-based tree rejected: " + ok.diagnostic);
  }
  if (std::holds_alternative<OutOfFuelF>(run.result)) {
    auto g = build_flag_co(c, {}, in, f);
    r.provers[2] = g && check_derivation_graph(*g, ProofSystem::FlagCo);
  }
  return r;
}

StreamReport run_one(const Cmd& c, const InputStream& in, std::uint64_t fuel) {
  StreamReport r;
  r.stream = in;
  std::uint64_t F = fuel;
  for (int round = 0;; ++round) {
    const std::uint64_t bf = 2 * F + 1;
    r.small = run_star(SmallConfig{c, {}, in}, F, false).verdict;
    r.big = big_verdict(eval_big(c, {}, in, bf), bf);
    r.pretty = pretty_verdict(eval_pretty(SemCmd::plain(c), {}, in, 3 * bf), 3 * bf);
    r.flag = flag_verdict(eval_flag(c, {}, Status::down(), in, bf), bf);
    const int n = conclusive(r.small) + conclusive(r.big) + conclusive(r.pretty) + conclusive(r.flag);
    if (n == 0 || n == 4 || round == 3) break;
    F = 8 * F + 16;
  }
  r.fuel = F;

  const std::string cls = verdict_class(r.small);
  for (const Verdict* v : {&r.big, &r.pretty, &r.flag})
    if (cls != verdict_class(*v)) disagree(r, "verdicts differ: " + classes(r));
  if (r.agree) {
    if (auto* s = std::get_if<Converged>(&r.small))
      for (const Verdict* v : {&r.big, &r.pretty, &r.flag})
        if (std::get<Converged>(*v).store != s->store)
          disagree(r, "final stores differ: small " + pretty_store(s->store) + " vs " +
                          verdict_text(*v));
  }

  r.lasso = detect_lasso(SmallConfig{c, {}, in}, F).has_value();
  if (r.lasso) {
    for (const Verdict* v : {&r.small, &r.big, &r.pretty, &r.flag})
      if (conclusive(*v)) disagree(r, "lasso found but " + classes(r));
    const ProofSystem systems[] = {ProofSystem::DivPred, ProofSystem::PrettyCo, ProofSystem::FlagCo};
    for (std::size_t i = 0; i < 3; ++i) {
      auto g = prove_divergence(c, {}, in, systems[i], F);
      r.provers[i] = g && check_derivation_graph(*g, systems[i]);
      if (!r.provers[i])
        disagree(r, std::string("lasso found but no accepted ") + system_name(systems[i]) +
                        " certificate");
    }
  }
  return r;
}

}  // namespace

CompareReport compare_all(const Cmd& c, const std::vector<InputStream>& streams,
                          std::uint64_t fuel) {
  CompareReport rep;
  rep.program = c;
  const bool exc = uses_exceptions(c);
  const std::vector<InputStream> none = {InputStream()};
  for (const auto& in : streams.empty() ? none : streams) {
    rep.runs.push_back(exc ? run_exceptions(c, in, fuel) : run_one(c, in, fuel));
    rep.agreement = rep.agreement && rep.runs.back().agree;
  }
  return rep;
}

json report_to_json(const CompareReport& r) {
  json runs = json::array();
  for (const auto& s : r.runs) {
    runs.push_back({{"stream", stream_to_json(s.stream)},
                    {"fuel", s.fuel},
                    {"small", verdict_to_json(s.small)},
                    {"big", verdict_to_json(s.big)},
                    {"pretty", verdict_to_json(s.pretty)},
                    {"flag", verdict_to_json(s.flag)},
                    {"lasso", s.lasso},
                    {"provers",
                     {{"div-pred", s.provers[0]}, {"pretty-co", s.provers[1]}, {"flag-co", s.provers[2]}}},
                    {"agree", s.agree},
                    {"reason", s.reason}});
  }
  return {{"program", pretty_cmd(r.program)}, {"agreement", r.agreement}, {"runs", std::move(runs)}};
}

std::string report_text(const CompareReport& r) {
  std::string out = "program: " + pretty_cmd(r.program) + "\n";
  for (const auto& s : r.runs) {
    out += "stream " + pretty_stream(s.stream) + "\n";
    out += "  small:  " + verdict_text(s.small) + "\n";
    out += "  big:    " + verdict_text(s.big) + "\n";
    out += "  pretty: " + verdict_text(s.pretty) + "\n";
    out += "  flag:   " + verdict_text(s.flag) + "\n";
    out += std::string("  lasso: ") + (s.lasso ? "yes" : "no") + "  provers:";
    const char* names[] = {" div-pred", " pretty-co", " flag-co"};
    bool any = false;
    for (int i = 0; i < 3; ++i)
      if (s.provers[i]) {
        out += names[i];
        any = true;
      }
    out += any ? "\n" : " none\n";
    if (!s.agree) out += "  DISAGREEMENT: " + s.reason + "\n";
  }
  out += std::string("agreement: ") + (r.agreement ? "yes" : "no") + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Campaigns

namespace {

struct ProgramResult {
  std::string program;
  bool exceptions = false;
  std::vector<StreamReport> runs;
};

ProgramResult run_program(const GenConfig& cfg, const std::vector<InputStream>& streams,
                          std::size_t i, std::uint64_t fuel) {
  Cmd c = generate_program(cfg, i);
  CompareReport rep = compare_all(c, streams, fuel);
  return ProgramResult{pretty_cmd(c), uses_exceptions(c), std::move(rep.runs)};
}

std::vector<InputStream> campaign_streams(const GenConfig& cfg) {
  if (cfg.input) return enumerate_streams({0, 1}, 3);
  return {InputStream()};
}

CampaignSummary merge(const GenConfig& cfg, std::vector<ProgramResult>& results) {
  CampaignSummary s;
  s.seed = cfg.seed;
  s.programs = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& p = results[i];
    s.with_exceptions += p.exceptions;
    for (const auto& r : p.runs) {
      ++s.runs;
      std::string cls = p.exceptions ? verdict_class(r.flag) : verdict_class(r.small);
      if (r.lasso) cls = "DivergesProven";
      if (p.exceptions && !r.lasso && r.provers[2]) cls = "DivergesProven";
      ++s.verdicts[cls];
      if (p.exceptions && std::holds_alternative<Stuck>(r.flag)) ++s.flag_stuck;
      if (!r.agree) {
        ++s.disagreements;
        s.counterexamples.push_back(
            Counterexample{i, p.program, pretty_stream(r.stream), r.fuel, r.reason});
      }
    }
  }
  return s;
}

}  // namespace

CampaignSummary fuzz_campaign(const GenConfig& cfg, std::size_t n, std::uint64_t fuel) {
  validate(cfg);
  const auto streams = campaign_streams(cfg);
  std::vector<ProgramResult> results(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i)
    results[static_cast<std::size_t>(i)] = run_program(cfg, streams, static_cast<std::size_t>(i), fuel);
  return merge(cfg, results);
}

CampaignSummary fuzz_campaign_serial(const GenConfig& cfg, std::size_t n, std::uint64_t fuel) {
  validate(cfg);
  const auto streams = campaign_streams(cfg);
  std::vector<ProgramResult> results(n);
  for (std::size_t i = 0; i < n; ++i) results[i] = run_program(cfg, streams, i, fuel);
  return merge(cfg, results);
}

json summary_to_json(const CampaignSummary& s) {
  json ces = json::array();
  for (const auto& c : s.counterexamples)
    ces.push_back({{"index", c.index},
                   {"program", c.program},
                   {"stream", c.stream},
                   {"fuel", c.fuel},
                   {"reason", c.reason}});
  return {{"seed", s.seed},
          {"programs", s.programs},
          {"runs", s.runs},
          {"disagreements", s.disagreements},
          {"with_exceptions", s.with_exceptions},
          {"flag_stuck", s.flag_stuck},
          {"verdicts", s.verdicts},
          {"counterexamples", std::move(ces)}};
}

void write_counterexamples(const CampaignSummary& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < s.counterexamples.size(); ++k) {
    const auto& c = s.counterexamples[k];
    const std::string stem = "ce_" + std::to_string(c.index) + "_" + std::to_string(k);
    std::ofstream(dir / (stem + ".whl")) << c.program << "\n";
    json meta = {{"program", stem + ".whl"},
                 {"stream", c.stream},
                 {"fuel", c.fuel},
                 {"reason", c.reason},
                 {"seed", s.seed},
                 {"index", c.index}};
    std::ofstream(dir / (stem + ".json")) << meta.dump(2) << "\n";
  }
}

}  // namespace whilesos
