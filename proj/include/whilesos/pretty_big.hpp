#pragma once

// Pretty-big-step evaluation over semantic commands. Intermediate forms are
// accepted as inputs so abort rules can be driven directly.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "whilesos/derivation.hpp"
#include "whilesos/syntax.hpp"

namespace whilesos {

struct DoneP {
  Outcome outcome;
  InputStream stream;
};
struct StuckP {
  std::string reason;
};
struct OutOfFuelP {};
using PrettyResult = std::variant<DoneP, StuckP, OutOfFuelP>;

struct PrettyRun {
  PrettyResult result = OutOfFuelP{};
  std::uint64_t fuel_used = 0;
  std::optional<DerivationGraph> tree;
};

PrettyResult eval_pretty(const SemCmd& c, const Store& s, const InputStream& in,
                         std::uint64_t fuel);
PrettyRun run_pretty(const SemCmd& c, const Store& s, const InputStream& in, std::uint64_t fuel,
                     bool record_tree = false);

Verdict pretty_verdict(const PrettyResult& r, std::uint64_t fuel);

}  // namespace whilesos
