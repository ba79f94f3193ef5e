#pragma once

// JSON forms of stores, judgments, derivation graphs, lassos, traces and
// verdicts. Commands and expressions travel as their pretty-printed text and
// are parsed back on load.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "whilesos/coinduction.hpp"
#include "whilesos/derivation.hpp"
#include "whilesos/small_step.hpp"
#include "whilesos/syntax.hpp"

namespace whilesos {

using json = nlohmann::json;

/// Malformed or schema-violating JSON.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json val_to_json(const Val& v);
Val val_from_json(const json& j);

/// {"x": 3, "y": null}
json store_to_json(const Store& s);
Store store_from_json(const json& j);

/// Array of the values not yet read.
json stream_to_json(const InputStream& in);
InputStream stream_from_json(const json& j);

/// "down" | "up" | {"exc": {"value": v, "store": {...}}}
json status_to_json(const Status& s);
Status status_from_json(const json& j);

/// {"conv": {...}} | "div"
json outcome_to_json(const Outcome& o);
Outcome outcome_from_json(const json& j);

json semcmd_to_json(const SemCmd& c);
SemCmd semcmd_from_json(const json& j);

json judgment_to_json(const Judgment& j);
Judgment judgment_from_json(const json& j);

/// {"kind": "derivation-graph", "system", "abstraction", "root", "nodes": [...]}
json graph_to_json(const DerivationGraph& g);
DerivationGraph graph_from_json(const json& j);

/// {"kind": "lasso", "abstraction", "prefix": [...], "cycle": [...]}
json lasso_to_json(const Lasso& l);
Lasso lasso_from_json(const json& j);

json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const json& j);

json config_to_json(const SmallConfig& c);
SmallConfig config_from_json(const json& j);

/// [{"index", "cmd", "store", "stream-cursor"}, ...]
json trace_to_json(const Trace& t);

json verdict_to_json(const Verdict& v);

}  // namespace whilesos
