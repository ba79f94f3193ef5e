#pragma once

// Random programs and differential runs across all evaluators.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "whilesos/json_io.hpp"
#include "whilesos/syntax.hpp"

namespace whilesos {

struct GenWeights {
  int skip = 1, alloc = 1, assign = 4, seq = 4, if_ = 2, while_ = 2, throw_ = 1, catch_ = 1;
};

struct GenConfig {
  std::uint64_t seed = 1;
  int max_depth = 5;
  int var_pool = 3;
  std::vector<std::uint64_t> literals = {0, 1, 2};
  bool input = false;
  bool exceptions = false;
  bool loops = true;
  /// alloc statements below the prelude (alloc of an allocated var is stuck)
  bool body_alloc = true;
  bool null_literals = true;
  /// Chance that the program starts by allocating every variable in the pool.
  double prelude_prob = 0.8;
  /// Chance that each preluded variable is also initialised with a literal.
  double init_prob = 0.5;
  GenWeights weights;
};

/// Throws std::invalid_argument when depth < 1 or a pool is empty.
void validate(const GenConfig& cfg);

/// Exceptions on; no loops, no input, no null, every variable allocated and
/// initialised up front and never re-allocated.
GenConfig throw_corpus_config(std::uint64_t seed = 1, int max_depth = 5);

/// Deterministic in cfg.seed.
Cmd generate_program(const GenConfig& cfg);
/// The index-th program of a campaign seeded with cfg.seed.
Cmd generate_program(const GenConfig& cfg, std::uint64_t index);

/// Every stream over `alphabet` of length 0..max_len, shortest first.
std::vector<InputStream> enumerate_streams(const std::vector<std::uint64_t>& alphabet = {0, 1},
                                           std::size_t max_len = 3);

struct StreamReport {
  InputStream stream;
  Verdict small = Unknown{};
  Verdict big = Unknown{};
  Verdict pretty = Unknown{};
  Verdict flag = Unknown{};
  bool lasso = false;
  std::array<bool, 3> provers{};  // div-pred, pretty-co, flag-co
  std::uint64_t fuel = 0;         // small-step fuel of the deciding round
  bool agree = true;
  std::string reason;
};

struct CompareReport {
  Cmd program;
  std::vector<StreamReport> runs;
  bool agreement = true;
};

/// Inductive evaluators get small-step fuel F scaled to 2F+1 (big, flag) and
/// 3(2F+1) (pretty); if some verdicts are conclusive and others are not, all
/// are rerun with more fuel.
CompareReport compare_all(const Cmd& c, const std::vector<InputStream>& streams,
                          std::uint64_t fuel);

json report_to_json(const CompareReport& r);
std::string report_text(const CompareReport& r);

struct Counterexample {
  std::uint64_t index = 0;
  std::string program;
  std::string stream;
  std::uint64_t fuel = 0;
  std::string reason;
  friend bool operator==(const Counterexample&, const Counterexample&) = default;
};

struct CampaignSummary {
  std::uint64_t seed = 0;
  std::size_t programs = 0;
  std::size_t runs = 0;
  std::size_t disagreements = 0;
  /// Exception programs whose flag-based run got stuck.
  std::size_t flag_stuck = 0;
  std::size_t with_exceptions = 0;
  std::map<std::string, std::size_t> verdicts;
  std::vector<Counterexample> counterexamples;
  friend bool operator==(const CampaignSummary&, const CampaignSummary&) = default;
};

/// Programs are run in parallel and merged in index order.
CampaignSummary fuzz_campaign(const GenConfig& cfg, std::size_t n, std::uint64_t fuel);
/// Same result, one program at a time.
CampaignSummary fuzz_campaign_serial(const GenConfig& cfg, std::size_t n, std::uint64_t fuel);

json summary_to_json(const CampaignSummary& s);
/// One `.whl` per counterexample plus a `.json` with stream and fuel.
void write_counterexamples(const CampaignSummary& s, const std::filesystem::path& dir);

}  // namespace whilesos
