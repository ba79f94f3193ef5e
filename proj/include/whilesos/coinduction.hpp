#pragma once

// Finite certificates for divergence.
//
// A Lasso witnesses an infinite small-step run. A DerivationGraph witnesses
// membership in the coinductive reading of a rule system: the checker treats
// the graph as a post-fixed point, so every node must be justified by one
// rule instance whose premises are (possibly earlier) nodes.
//
// Both may be taken modulo a store projection. Projected variables keep only
// their kind (null or number). This is a bisimulation when no projected
// variable occurs in a guard and values of projected variables only flow into
// projected variables, which check_abstraction enforces.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "whilesos/derivation.hpp"
#include "whilesos/small_step.hpp"
#include "whilesos/syntax.hpp"

namespace whilesos {

struct Abstraction {
  std::set<std::string> vars;
  bool empty() const { return vars.empty(); }
};

class AbstractionUnsound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First reason the projection is unsound for c, if any.
std::optional<std::string> abstraction_violation(const Cmd& c, const std::set<std::string>& vars);
/// Throws AbstractionUnsound on a violation.
void check_abstraction(const Cmd& c, const Abstraction& a);

Store project(const Store& s, const std::set<std::string>& vars);
SemCmd project(const SemCmd& c, const std::set<std::string>& vars);

struct Lasso {
  std::vector<SmallConfig> prefix;
  std::vector<SmallConfig> cycle;
  Abstraction abstraction;
};

/// Runs at most `fuel` steps and returns the first repeated configuration
/// (stores compared modulo the abstraction) as a lasso.
std::optional<Lasso> detect_lasso(const SmallConfig& cfg, std::uint64_t fuel,
                                  const Abstraction& abs = {});

struct CheckResult {
  bool ok = true;
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

CheckResult check_lasso(const Lasso& l);

struct CheckOptions {
  /// Fuel for the inductive side premises discharged by execution.
  std::uint64_t eval_fuel = 1000000;
};

CheckResult check_derivation_graph(const DerivationGraph& g, ProofSystem system,
                                   const CheckOptions& opt = {});

struct Certificate {
  std::variant<Lasso, DerivationGraph> body;
};

CheckResult check_certificate(const Certificate& c, const CheckOptions& opt = {});

/// Finds a lasso, then builds a graph of the requested coinductive system.
/// Throws AbstractionUnsound on a bad abstraction.
std::optional<DerivationGraph> prove_divergence(const Cmd& c, const Store& s,
                                                const InputStream& in, ProofSystem system,
                                                std::uint64_t fuel, const Abstraction& abs = {});

/// Builds a flag-co graph without a lasso, deciding each sub-computation by
/// running it with `eval_fuel`. Works for throw/catch programs, which have
/// no small-step runs.
std::optional<DerivationGraph> build_flag_co(const Cmd& c, const Store& s, const InputStream& in,
                                             std::uint64_t eval_fuel, const Abstraction& abs = {},
                                             std::size_t node_budget = 100000);

/// Converged / Stuck / DivergesProven(lasso) / Unknown for input-free or
/// input programs; throw/catch programs go through the flag-based side.
Verdict classify(const Cmd& c, const Store& s, const InputStream& in, std::uint64_t fuel,
                 const Abstraction& abs = {});

}  // namespace whilesos
