#pragma once

// Textual inference rules.
//
//   # comment
//   include "exprs.rules"
//   const skip while if
//   sig (c, sigma, [delta :- down]) =G=> (sigma', [delta'])
//   rule F-Seq:
//   (c1, sigma) =G=> (sigma')
//   side x in dom(sigma)
//   ---
//   (c1; c2, sigma) =G=> (sigma'')
//
// Identifiers are metavariables unless declared const; numbers and
// punctuation are always constants. Bracketed signature components are
// flags that a rule may leave implicit.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace whilesos {

struct Token {
  std::string text;
  bool space = false;  // preceded by whitespace in the source
  friend bool operator==(const Token& a, const Token& b) { return a.text == b.text; }
};
using Term = std::vector<Token>;

struct Formula {
  std::string rel;
  std::vector<Term> source;
  std::vector<Term> target;
};

struct Premise {
  enum class Kind { Eval, Side };
  Kind kind = Kind::Eval;
  Formula eval;
  Term side;  // predicate text, kept verbatim
  bool is_eval() const { return kind == Kind::Eval; }
};

struct Rule {
  std::string label;
  std::vector<Premise> premises;
  Formula conclusion;
  std::string file;
  int line = 0;
  std::size_t eval_premises() const;
};

struct SigComponent {
  std::string role;
  bool highlighted = false;
  std::optional<std::string> default_flag;
};

struct RelationSig {
  std::string name;
  std::vector<SigComponent> source;
  std::vector<SigComponent> target;
  /// Position of the highlighted component, if any.
  std::optional<std::size_t> flag_in_source() const;
  std::optional<std::size_t> flag_in_target() const;
  bool flagged() const { return flag_in_source() && flag_in_target(); }
};

struct RuleSet {
  std::vector<RelationSig> sigs;
  std::vector<Rule> rules;
  std::set<std::string> consts;
  const RelationSig* sig(const std::string& rel) const;
  bool has_label(const std::string& label) const;
};

class RuleParseError : public std::runtime_error {
 public:
  RuleParseError(const std::string& file, int line, const std::string& msg);
  std::string file;
  int line;
};

class MixedFlagUsage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `dir` resolves include directives.
RuleSet parse_rules(std::string_view text, const std::string& origin = "<input>",
                    const std::filesystem::path& dir = {});
RuleSet load_rules(const std::filesystem::path& file);

/// Rules of `extra` appended to `base`; signatures and consts are merged.
RuleSet merge_rules(RuleSet base, const RuleSet& extra);

/// Makes implicit flags explicit. Rules that already carry their flags are
/// copied unchanged.
RuleSet thread_flags(const RuleSet& rs);

/// Same rules up to rule order, labels and a consistent renaming of
/// metavariables (per rule). Side conditions are compared as a multiset.
bool alpha_equal(const RuleSet& a, const RuleSet& b);
bool alpha_equal(const Rule& a, const Rule& b, const std::set<std::string>& consts);

struct RuleMetrics {
  std::size_t rules = 0;
  std::size_t premises = 0;  // evaluation premises only
  std::optional<std::size_t> duplicates;
};

/// Duplicates are evaluation premises of rules not in `base` that also occur
/// in a base rule for the same construct (conclusion sources unified).
RuleMetrics count_metrics(const RuleSet& rs, const RuleSet* base = nullptr);

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);
std::string print_rule(const Rule& r);
/// consts, sigs and rules in the input syntax.
std::string print_rules(const RuleSet& rs);

}  // namespace whilesos
