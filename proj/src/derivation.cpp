#include "whilesos/derivation.hpp"

#include <stdexcept>

#include "whilesos/parser.hpp"

namespace whilesos {

const char* relation_symbol(const Judgment& j) {
  struct {
    const char* operator()(const ExprJudgment&) const { return "=E=>"; }
    const char* operator()(const BigJudgment&) const { return "=B=>"; }
    const char* operator()(const DivJudgment&) const { return "=inf=>"; }
    const char* operator()(const PrettyJudgment&) const { return "=v"; }
    const char* operator()(const FlagExprJudgment&) const { return "=GE=>"; }
    const char* operator()(const FlagJudgment&) const { return "=G=>"; }
  } sym;
  return std::visit(sym, j);
}

std::string pretty_judgment(const Judgment& j) {
  struct {
    std::string operator()(const ExprJudgment& x) const {
      return "(" + pretty_expr(x.expr) + ", " + pretty_store(x.store) + ", " +
             pretty_stream(x.stream) + ") =E=> " + pretty_val(x.value) + ", " +
             pretty_stream(x.out_stream);
    }
    std::string operator()(const BigJudgment& x) const {
      return "(" + pretty_cmd(x.cmd) + ", " + pretty_store(x.store) + ", " +
             pretty_stream(x.stream) + ") =B=> " + pretty_store(x.out_store) + ", " +
             pretty_stream(x.out_stream);
    }
    std::string operator()(const DivJudgment& x) const {
      return "(" + pretty_cmd(x.cmd) + ", " + pretty_store(x.store) + ", " +
             pretty_stream(x.stream) + ") =inf=>";
    }
    std::string operator()(const PrettyJudgment& x) const {
      return "(" + pretty_semcmd(x.cmd) + ", " + pretty_store(x.store) + ", " +
             pretty_stream(x.stream) + ") =v " + pretty_outcome(x.outcome) + ", " +
             pretty_stream(x.out_stream);
    }
    std::string operator()(const FlagExprJudgment& x) const {
      return "(" + pretty_expr(x.expr) + ", " + pretty_store(x.store) + ", " +
             pretty_stream(x.stream) + ", " + pretty_status(x.flag) + ") =GE=> " +
             pretty_val(x.value) + ", " + pretty_stream(x.out_stream) + ", " +
             pretty_status(x.out_flag);
    }
    std::string operator()(const FlagJudgment& x) const {
      return "(" + pretty_cmd(x.cmd) + ", " + pretty_store(x.store) + ", " +
             pretty_stream(x.stream) + ", " + pretty_status(x.flag) + ") =G=> " +
             pretty_store(x.out_store) + ", " + pretty_stream(x.out_stream) + ", " +
             pretty_status(x.out_flag);
    }
  } print;
  return std::visit(print, j);
}

const char* system_name(ProofSystem s) {
  switch (s) {
    case ProofSystem::BigStep:
      return "big-step";
    case ProofSystem::DivPred:
      return "div-pred";
    case ProofSystem::PrettyCo:
      return "pretty-co";
    case ProofSystem::FlagCo:
      return "flag-co";
  }
  return "?";
}

ProofSystem parse_system(const std::string& name) {
  for (ProofSystem s : {ProofSystem::BigStep, ProofSystem::DivPred, ProofSystem::PrettyCo,
                        ProofSystem::FlagCo})
    if (name == system_name(s)) return s;
  throw std::invalid_argument("unknown proof system '" + name + "'");
}

std::size_t DerivationGraph::splice(const DerivationGraph& tree) {
  const std::size_t base = nodes.size();
  for (const auto& n : tree.nodes) {
    DerivationNode copy = n;
    for (auto& p : copy.premises) p += base;
    nodes.push_back(std::move(copy));
  }
  return tree.root + base;
}

bool DerivationGraph::has_back_edges() const {
  // Iterative three-colour DFS over every node.
  enum : char { White, Grey, Black };
  std::vector<char> colour(nodes.size(), White);
  for (std::size_t start = 0; start < nodes.size(); ++start) {
    if (colour[start] != White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    colour[start] = Grey;
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      if (next < nodes[id].premises.size()) {
        const std::size_t child = nodes[id].premises[next++];
        if (child >= nodes.size()) continue;
        if (colour[child] == Grey) return true;
        if (colour[child] == White) {
          colour[child] = Grey;
          stack.emplace_back(child, 0);
        }
      } else {
        colour[id] = Black;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace whilesos
