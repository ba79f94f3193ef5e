#pragma once

// Judgments and derivation graphs shared by the inductive evaluators (which
// export finite trees) and the coinduction module (which checks graphs whose
// premise edges may point backwards).

#include <cstddef>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "whilesos/syntax.hpp"

namespace whilesos {

/// (e, sigma, iota) =E=> v, iota'
struct ExprJudgment {
  Expr expr;
  Store store;
  InputStream stream;
  Val value;
  InputStream out_stream;
};

/// (c, sigma, iota) =B=> sigma', iota'
struct BigJudgment {
  Cmd cmd;
  Store store;
  InputStream stream;
  Store out_store;
  InputStream out_stream;
};

/// (c, sigma, iota) =inf=>
struct DivJudgment {
  Cmd cmd;
  Store store;
  InputStream stream;
};

/// (C, sigma, iota) =v o, iota'
struct PrettyJudgment {
  SemCmd cmd;
  Store store;
  InputStream stream;
  Outcome outcome;
  InputStream out_stream;
};

/// (e, sigma, iota, delta) =GE=> v, iota', delta'
struct FlagExprJudgment {
  Expr expr;
  Store store;
  InputStream stream;
  Status flag;
  Val value;
  InputStream out_stream;
  Status out_flag;
};

/// (c, sigma, iota, delta) =G=> sigma', iota', delta'
struct FlagJudgment {
  Cmd cmd;
  Store store;
  InputStream stream;
  Status flag;
  Store out_store;
  InputStream out_stream;
  Status out_flag;
};

using Judgment = std::variant<ExprJudgment, BigJudgment, DivJudgment, PrettyJudgment,
                              FlagExprJudgment, FlagJudgment>;

/// Relation symbol of a judgment: "=E=>", "=B=>", "=inf=>", "=v", "=GE=>", "=G=>".
const char* relation_symbol(const Judgment& j);
std::string pretty_judgment(const Judgment& j);

struct DerivationNode {
  Judgment judgment;
  std::string rule;
  std::vector<std::size_t> premises;
};

/// Rule system a graph is built in. BigStep graphs are inductive trees only.
enum class ProofSystem { BigStep, DivPred, PrettyCo, FlagCo };

const char* system_name(ProofSystem s);
/// Parses "big-step", "div-pred", "pretty-co", "flag-co"; throws on anything else.
ProofSystem parse_system(const std::string& name);

struct DerivationGraph {
  ProofSystem system = ProofSystem::BigStep;
  std::vector<DerivationNode> nodes;
  std::size_t root = 0;
  /// Variables whose values are compared by kind only (see coinduction.hpp).
  std::set<std::string> abstraction;

  std::size_t add(Judgment j, std::string rule, std::vector<std::size_t> premises = {}) {
    nodes.push_back(DerivationNode{std::move(j), std::move(rule), std::move(premises)});
    return nodes.size() - 1;
  }
  /// Copies every node of `tree` into this graph; returns the new id of its root.
  std::size_t splice(const DerivationGraph& tree);
  bool has_back_edges() const;
};

}  // namespace whilesos
