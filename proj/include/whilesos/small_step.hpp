#pragma once

// Transition relation for commands, expression evaluation shared by every
// evaluator, and bounded runs of the reflexive-transitive closure.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "whilesos/syntax.hpp"

namespace whilesos {

struct SmallConfig {
  Cmd cmd;
  Store store;
  InputStream stream;

  std::size_t hash() const;
  friend bool operator==(const SmallConfig&, const SmallConfig&) = default;
};

struct ExprValue {
  Val value;
  InputStream stream;
};
struct ExprStuck {
  std::string reason;
};
using ExprResult = std::variant<ExprValue, ExprStuck>;

/// (e, sigma, iota) =E=> v, iota'. Operands are evaluated left to right.
ExprResult eval_expr(const Expr& e, const Store& s, const InputStream& in);

struct NoStep {
  std::string reason;
  bool terminal = false;  // cmd is skip
};
using StepResult = std::variant<SmallConfig, NoStep>;

StepResult step(const SmallConfig& cfg);

struct Trace {
  std::vector<SmallConfig> configs;
  bool terminal = false;
};

struct SmallRun {
  Verdict verdict;
  Trace trace;  // left empty unless requested
  std::uint64_t steps = 0;
  InputStream final_stream;
};

/// Steps until skip, stuck, or `fuel` steps have been taken.
SmallRun run_star(const SmallConfig& cfg, std::uint64_t fuel, bool record_trace = true);

/// One line per configuration: "index  cmd  store  @cursor".
std::string trace_text(const Trace& t);

}  // namespace whilesos

template <>
struct std::hash<whilesos::SmallConfig> {
  std::size_t operator()(const whilesos::SmallConfig& c) const noexcept { return c.hash(); }
};
