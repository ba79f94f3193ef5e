// whilesos: run, trace, classify and compare While programs; fuzz campaigns;
// rule-file tools; certificate checking.
//
// Exit codes: 0 ok, 1 disagreement or invalid certificate, 2 usage or parse error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "whilesos/big_step.hpp"
#include "whilesos/coinduction.hpp"
#include "whilesos/flag_based.hpp"
#include "whilesos/harness.hpp"
#include "whilesos/json_io.hpp"
#include "whilesos/parser.hpp"
#include "whilesos/pretty_big.hpp"
#include "whilesos/rule_dsl.hpp"
#include "whilesos/small_step.hpp"

using namespace whilesos;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string program;
  std::string semantics = "small";
  std::uint64_t fuel = 10000;
  std::string input;
  std::string abstract_vars;
  std::string format = "text";
  std::string out;
  std::string system = "lasso";
  bool tree = false;
  bool all_streams = false;
  // fuzz
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  int depth = 5;
  bool with_input = false;
  bool exceptions = false;
  bool serial = false;
  std::string ce_dir;
  // rules / cert
  std::string file, other, base;
  bool thread = false;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

Cmd load_program(const std::string& path) {
  const std::string text = slurp(path);
  try {
    return parse_cmd(text);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

InputStream load_stream(const std::string& text) {
  try {
    return parse_stream(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--input: ") + e.what());
  }
}

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot write " + o.out);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Abstraction abstraction(const Options& o) {
  Abstraction a;
  std::stringstream ss(o.abstract_vars);
  std::string x;
  while (std::getline(ss, x, ','))
    if (!x.empty()) a.vars.insert(x);
  return a;
}

int cmd_run(const Options& o) {
  const Cmd c = load_program(o.program);
  const InputStream in = load_stream(o.input);
  json j = {{"semantics", o.semantics}, {"fuel", o.fuel}};
  std::string text;
  std::optional<DerivationGraph> tree;
  if (o.semantics == "small") {
    SmallRun r = run_star(SmallConfig{c, {}, in}, o.fuel, false);
    j["steps"] = r.steps;
    j["result"] = verdict_to_json(r.verdict);
    if (auto* v = std::get_if<Converged>(&r.verdict))
      text = "(skip, " + pretty_store(v->store) + ")";
    else
      text = verdict_text(r.verdict);
  } else if (o.semantics == "big") {
    BigRun r = run_big(c, {}, in, o.fuel, o.tree);
    j["fuel_used"] = r.fuel_used;
    j["result"] = verdict_to_json(big_verdict(r.result, o.fuel));
    if (auto* d = std::get_if<Done>(&r.result))
      text = pretty_store(d->store);
    else
      text = verdict_text(big_verdict(r.result, o.fuel));
    tree = std::move(r.tree);
  } else if (o.semantics == "pretty") {
    PrettyRun r = run_pretty(SemCmd::plain(c), {}, in, o.fuel, o.tree);
    j["fuel_used"] = r.fuel_used;
    j["result"] = verdict_to_json(pretty_verdict(r.result, o.fuel));
    if (auto* d = std::get_if<DoneP>(&r.result))
      text = pretty_outcome(d->outcome);
    else
      text = verdict_text(pretty_verdict(r.result, o.fuel));
    tree = std::move(r.tree);
  } else if (o.semantics == "flag") {
    FlagOptions fo;
    fo.record_tree = o.tree;
    FlagRun r = run_flag(c, {}, Status::down(), in, o.fuel, fo);
    j["fuel_used"] = r.fuel_used;
    j["result"] = verdict_to_json(flag_verdict(r.result, o.fuel));
    if (auto* f = std::get_if<FlagResult>(&r.result)) {
      j["flag"] = status_to_json(f->status);
      text = f->status.is_down() ? pretty_status(f->status) + " " + pretty_store(f->store)
                                 : pretty_status(f->status);
    } else {
      text = verdict_text(flag_verdict(r.result, o.fuel));
    }
    tree = std::move(r.tree);
  } else {
    throw UsageError("unknown semantics " + o.semantics);
  }
  if (o.format == "json") {
    if (tree) j["derivation"] = graph_to_json(*tree);
    emit(o, dump(j));
  } else {
    if (tree) text += "\n" + graph_to_json(*tree).dump(2);
    emit(o, text + "\n");
  }
  return 0;
}

int cmd_trace(const Options& o) {
  const Cmd c = load_program(o.program);
  SmallRun r = run_star(SmallConfig{c, {}, load_stream(o.input)}, o.fuel, true);
  if (o.format == "json")
    emit(o, dump({{"trace", trace_to_json(r.trace)}, {"result", verdict_to_json(r.verdict)}}));
  else
    emit(o, trace_text(r.trace) + verdict_text(r.verdict) + "\n");
  return 0;
}

int cmd_classify(const Options& o) {
  const Cmd c = load_program(o.program);
  const InputStream in = load_stream(o.input);
  const Abstraction abs = abstraction(o);
  Verdict v;
  try {
    v = classify(c, {}, in, o.fuel, abs);
    if (o.system != "lasso" && std::holds_alternative<DivergesProven>(v)) {
      const ProofSystem sys = parse_system(o.system);
      const auto& d = std::get<DivergesProven>(v);
      if (!std::holds_alternative<DerivationGraph>(d.certificate->body)) {
        auto g = prove_divergence(c, {}, in, sys, o.fuel, abs);
        if (!g) {
          v = Unknown{o.fuel};
        } else {
          const std::string summary =
              std::string(system_name(sys)) + " graph, nodes=" + std::to_string(g->nodes.size());
          v = DivergesProven{std::make_shared<Certificate>(Certificate{std::move(*g)}), summary};
        }
      }
    }
  } catch (const AbstractionUnsound& e) {
    throw UsageError(std::string("unsound abstraction: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.format == "json")
    emit(o, dump(verdict_to_json(v)));
  else if (!o.out.empty()) {
    auto* d = std::get_if<DivergesProven>(&v);
    if (d) emit(o, dump(certificate_to_json(*d->certificate)));
    std::cout << verdict_text(v) << "\n";
  } else {
    std::cout << verdict_text(v) << "\n";
  }
  return 0;
}

int cmd_compare(const Options& o) {
  const Cmd c = load_program(o.program);
  std::vector<InputStream> streams;
  if (o.all_streams)
    streams = enumerate_streams();
  else
    streams.push_back(load_stream(o.input));
  CompareReport r = compare_all(c, streams, o.fuel);
  emit(o, o.format == "json" ? dump(report_to_json(r)) : report_text(r));
  return r.agreement ? 0 : 1;
}

int cmd_fuzz(const Options& o) {
  GenConfig g = o.exceptions ? throw_corpus_config(o.seed, o.depth) : GenConfig{};
  g.seed = o.seed;
  g.max_depth = o.depth;
  g.input = o.with_input;
  try {
    validate(g);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  CampaignSummary s =
      o.serial ? fuzz_campaign_serial(g, o.count, o.fuel) : fuzz_campaign(g, o.count, o.fuel);
  if (!o.ce_dir.empty()) write_counterexamples(s, o.ce_dir);
  if (o.format == "json") {
    emit(o, dump(summary_to_json(s)));
  } else {
    std::string t = "programs=" + std::to_string(s.programs) + " runs=" + std::to_string(s.runs) +
                    " disagreements=" + std::to_string(s.disagreements) + "\n";
    for (const auto& [k, n] : s.verdicts) t += "  " + k + ": " + std::to_string(n) + "\n";
    if (s.with_exceptions) t += "  flag-based stuck on throw/catch programs: " + std::to_string(s.flag_stuck) + "\n";
    for (const auto& c : s.counterexamples)
      t += "counterexample #" + std::to_string(c.index) + " " + c.stream + ": " + c.reason + "\n  " + c.program + "\n";
    emit(o, t);
  }
  return s.disagreements == 0 && (!o.exceptions || s.flag_stuck == 0) ? 0 : 1;
}

RuleSet rules_file(const std::string& path) {
  try {
    return load_rules(path);
  } catch (const RuleParseError& e) {
    throw UsageError(e.what());
  }
}

int cmd_rules_thread(const Options& o) {
  try {
    emit(o, print_rules(thread_flags(rules_file(o.file))));
  } catch (const MixedFlagUsage& e) {
    throw UsageError(e.what());
  }
  return 0;
}

int cmd_rules_count(const Options& o) {
  RuleSet rs = rules_file(o.file);
  std::optional<RuleSet> base;
  if (!o.base.empty()) base = rules_file(o.base);
  RuleMetrics m = count_metrics(rs, base ? &*base : nullptr);
  std::string t = "rules=" + std::to_string(m.rules) + " premises=" + std::to_string(m.premises);
  if (m.duplicates) t += " duplicates=" + std::to_string(*m.duplicates);
  emit(o, t + "\n");
  return 0;
}

int cmd_rules_check(const Options& o) {
  RuleSet a = rules_file(o.file);
  if (o.other.empty()) {
    emit(o, "ok: " + std::to_string(a.rules.size()) + " rules\n");
    return 0;
  }
  RuleSet b = rules_file(o.other);
  try {
    if (o.thread) a = thread_flags(a);
  } catch (const MixedFlagUsage& e) {
    throw UsageError(e.what());
  }
  const bool eq = alpha_equal(a, b);
  emit(o, eq ? "alpha-equal\n" : "not alpha-equal\n");
  return eq ? 0 : 1;
}

int cmd_cert_check(const Options& o) {
  Certificate cert;
  try {
    cert = certificate_from_json(json::parse(slurp(o.file)));
  } catch (const json::parse_error& e) {
    throw UsageError(o.file + ": " + e.what());
  } catch (const FormatError& e) {
    throw UsageError(o.file + ": " + e.what());
  }
  CheckResult r = check_certificate(cert);
  if (r) {
    std::cout << "valid\n";
    return 0;
  }
  std::cout << "invalid: " << r.diagnostic << "\n";
  return 1;
}

void common(CLI::App* sub, Options& o, bool program = true) {
  if (program) sub->add_option("program", o.program, "program file (.whl)")->required();
  sub->add_option("--fuel", o.fuel, "fuel bound (default 10000)");
  sub->add_option("--input", o.input, "input stream, e.g. \"1,0\"");
  sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--out", o.out, "write output to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreters, divergence certificates and rule tools for the While language"};
  app.require_subcommand(1);
  Options o;
  std::function<int()> action;

  auto* run = app.add_subcommand("run", "evaluate a program under one semantics");
  common(run, o);
  run->add_option("--semantics", o.semantics, "small, big, pretty or flag")
      ->check(CLI::IsMember({"small", "big", "pretty", "flag"}));
  run->add_flag("--tree", o.tree, "also print the derivation tree (big, pretty, flag)");
  run->callback([&] { action = [&] { return cmd_run(o); }; });

  auto* trace = app.add_subcommand("trace", "small-step trace");
  common(trace, o);
  trace->callback([&] { action = [&] { return cmd_trace(o); }; });

  auto* cls = app.add_subcommand("classify", "verdict with divergence certificate search");
  common(cls, o);
  cls->add_option("--abstract-vars", o.abstract_vars, "variables compared by kind only (comma separated)");
  cls->add_option("--system", o.system, "lasso, div-pred, pretty-co or flag-co")
      ->check(CLI::IsMember({"lasso", "div-pred", "pretty-co", "flag-co"}));
  cls->callback([&] { action = [&] { return cmd_classify(o); }; });

  auto* cmp = app.add_subcommand("compare", "run every semantics and compare");
  common(cmp, o);
  cmp->add_flag("--all-streams", o.all_streams, "all streams over {0,1} up to length 3");
  cmp->callback([&] { action = [&] { return cmd_compare(o); }; });

  auto* fuzz = app.add_subcommand("fuzz", "differential campaign over generated programs");
  common(fuzz, o, false);
  fuzz->add_option("--seed", o.seed, "campaign seed");
  fuzz->add_option("--count", o.count, "number of programs");
  fuzz->add_option("--depth", o.depth, "maximum command depth");
  fuzz->add_flag("--with-input", o.with_input, "use input and enumerate streams");
  fuzz->add_flag("--exceptions", o.exceptions, "throw/catch corpus");
  fuzz->add_flag("--serial", o.serial, "single-threaded reference run");
  fuzz->add_option("--counterexamples", o.ce_dir, "directory for counterexample files");
  fuzz->callback([&] { action = [&] { return cmd_fuzz(o); }; });

  auto* rules = app.add_subcommand("rules", "rule-file tools");
  rules->require_subcommand(1);
  auto* thr = rules->add_subcommand("thread", "make implicit flags explicit");
  thr->add_option("file", o.file)->required();
  thr->add_option("--out", o.out);
  thr->callback([&] { action = [&] { return cmd_rules_thread(o); }; });
  auto* cnt = rules->add_subcommand("count", "rule and premise counts");
  cnt->add_option("file", o.file)->required();
  cnt->add_option("--base", o.base, "count duplicated premises against this rule file");
  cnt->callback([&] { action = [&] { return cmd_rules_count(o); }; });
  auto* chk = rules->add_subcommand("check", "parse a rule file, or compare two up to renaming");
  chk->add_option("file", o.file)->required();
  chk->add_option("other", o.other);
  chk->add_flag("--thread", o.thread, "thread flags of the first file before comparing");
  chk->callback([&] { action = [&] { return cmd_rules_check(o); }; });

  auto* cert = app.add_subcommand("cert", "certificate tools");
  cert->require_subcommand(1);
  auto* cc = cert->add_subcommand("check", "validate a serialized lasso or derivation graph");
  cc->add_option("file", o.file)->required();
  cc->callback([&] { action = [&] { return cmd_cert_check(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "whilesos: " << e.what() << "\n";
    return 2;
  }
}
