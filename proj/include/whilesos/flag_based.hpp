#pragma once

// Flag-based big-step evaluation with divergence, exception and input rules.
//
// The rules leave the store (and value) of a non-down result arbitrary. We
// always pick the canonical sentinel: an empty store, null, and for up
// results also an empty stream. Comparison of results ignores those
// components.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "whilesos/derivation.hpp"
#include "whilesos/syntax.hpp"

namespace whilesos {

struct FlagResult {
  Status status = Status::down();
  Store store;
  std::optional<Val> value;  // expression judgments only
  InputStream stream;

  /// Status-aware: up results are equal regardless of the rest, exc results
  /// compare payload and stream, down results compare everything.
  friend bool operator==(const FlagResult& a, const FlagResult& b);
};

/// Replaces the irrelevant components of a non-down result by the sentinels.
FlagResult canonicalize(FlagResult r);

struct StuckF {
  std::string reason;
};
struct OutOfFuelF {};
using FlagOutcome = std::variant<FlagResult, StuckF, OutOfFuelF>;

FlagOutcome eval_expr_flag(const Expr& e, const Store& s, const Status& d, const InputStream& in,
                           std::uint64_t fuel);
FlagOutcome eval_flag(const Cmd& c, const Store& s, const Status& d, const InputStream& in,
                      std::uint64_t fuel);

struct FlagOptions {
  bool record_tree = false;
  /// Log every judgment entered, e.g. "G: skip / ⇓", "GE: x + 1 / ⇓".
  bool record_visits = false;
};

struct FlagRun {
  FlagOutcome result = OutOfFuelF{};
  std::uint64_t fuel_used = 0;
  std::optional<DerivationGraph> tree;
  std::vector<std::string> visits;
};

FlagRun run_flag(const Cmd& c, const Store& s, const Status& d, const InputStream& in,
                 std::uint64_t fuel, const FlagOptions& opt = {});

Verdict flag_verdict(const FlagOutcome& r, std::uint64_t fuel);

/// Appends the flag-based derivation of e to g; nullopt when e is stuck.
std::optional<std::size_t> add_flag_expr_tree(DerivationGraph& g, const Expr& e, const Store& s,
                                              const Status& d, const InputStream& in);

}  // namespace whilesos
