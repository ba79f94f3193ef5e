#pragma once

// Inductive big-step evaluation of commands, bounded by fuel. Fuel counts
// command rule applications; expression rules are free.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "whilesos/derivation.hpp"
#include "whilesos/syntax.hpp"

namespace whilesos {

struct Done {
  Store store;
  InputStream stream;
};
struct StuckB {
  std::string reason;
};
struct OutOfFuel {};
using BigResult = std::variant<Done, StuckB, OutOfFuel>;

struct BigRun {
  BigResult result = OutOfFuel{};
  std::uint64_t fuel_used = 0;
  std::optional<DerivationGraph> tree;  // only for Done with record_tree
};

BigResult eval_big(const Cmd& c, const Store& s, const InputStream& in, std::uint64_t fuel);
BigRun run_big(const Cmd& c, const Store& s, const InputStream& in, std::uint64_t fuel,
               bool record_tree = false);

Verdict big_verdict(const BigResult& r, std::uint64_t fuel);

/// Appends the E-Val/E-Var/E-Bop/E-Input derivation of e to g and returns
/// the id of its root, or nullopt when e is stuck.
std::optional<std::size_t> add_expr_tree(DerivationGraph& g, const Expr& e, const Store& s,
                                         const InputStream& in);

}  // namespace whilesos
