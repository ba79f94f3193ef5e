#include <doctest.h>

#include <functional>

#include "support.hpp"
#include "whilesos/flag_based.hpp"
#include "whilesos/harness.hpp"

using namespace whilesos;

namespace {

void walk(const Cmd& c, const std::function<void(const Cmd&)>& f) {
  f(c);
  switch (c.kind()) {
    case Cmd::Kind::Seq:
    case Cmd::Kind::If:
    case Cmd::Kind::Catch:
      walk(c.left(), f);
      walk(c.right(), f);
      break;
    case Cmd::Kind::While:
      walk(c.left(), f);
      break;
    default:
      break;
  }
}

int depth(const Cmd& c) {
  switch (c.kind()) {
    case Cmd::Kind::Seq:
    case Cmd::Kind::If:
    case Cmd::Kind::Catch:
      return 1 + std::max(depth(c.left()), depth(c.right()));
    case Cmd::Kind::While:
      return 1 + depth(c.left());
    default:
      return 1;
  }
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("generation is deterministic") {
  GenConfig cfg;
  cfg.max_depth = 3;
  cfg.loops = false;
  CHECK(generate_program(cfg) == generate_program(cfg));
  CHECK(generate_program(cfg, 17) == generate_program(cfg, 17));
  int differ = 0;
  for (std::uint64_t i = 0; i < 20; ++i)
    differ += !(generate_program(cfg, i) == generate_program(cfg, i + 1));
  CHECK(differ > 10);
}

TEST_CASE("bad configs") {
  GenConfig cfg;
  cfg.max_depth = 0;
  CHECK_THROWS_AS(generate_program(cfg), std::invalid_argument);
  cfg.max_depth = 2;
  cfg.literals.clear();
  CHECK_THROWS_AS(generate_program(cfg), std::invalid_argument);
}

TEST_CASE("depth 1 yields leaves only") {
  GenConfig cfg;
  cfg.max_depth = 1;
  cfg.prelude_prob = 0;
  cfg.exceptions = true;
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto k = generate_program(cfg, i).kind();
    CHECK((k == Cmd::Kind::Skip || k == Cmd::Kind::Alloc || k == Cmd::Kind::Assign ||
           k == Cmd::Kind::Throw));
  }
}

TEST_CASE("depth bound holds below the prelude") {
  GenConfig cfg;
  cfg.max_depth = 4;
  cfg.prelude_prob = 0;
  for (std::uint64_t i = 0; i < 300; ++i) CHECK(depth(generate_program(cfg, i)) <= 4);
}

TEST_CASE("exception toggle") {
  GenConfig off;
  std::size_t throws = 0, catches = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) CHECK_FALSE(uses_exceptions(generate_program(off, i)));
  GenConfig on;
  on.exceptions = true;
  for (std::uint64_t i = 0; i < 1000; ++i)
    walk(generate_program(on, i), [&](const Cmd& c) {
      throws += c.kind() == Cmd::Kind::Throw;
      catches += c.kind() == Cmd::Kind::Catch;
    });
  CHECK(throws > 100);
  CHECK(catches > 100);
}

TEST_CASE("input toggle") {
  GenConfig cfg;
  std::size_t with = 0;
  for (std::uint64_t i = 0; i < 300; ++i) CHECK_FALSE(uses_input(generate_program(cfg, i)));
  cfg.input = true;
  for (std::uint64_t i = 0; i < 300; ++i) with += uses_input(generate_program(cfg, i));
  CHECK(with > 30);
}

TEST_CASE("streams") {
  auto s = enumerate_streams();
  CHECK(s.size() == 15);
  CHECK(s.front() == InputStream());
  CHECK(s.back().values().size() == 3);
}

TEST_CASE("compare_all on factorial") {
  auto r = compare_all(fac_program(4), {InputStream()}, 10000);
  CHECK(r.agreement);
  REQUIRE(r.runs.size() == 1);
  Converged want{testing::store("{c |-> 0, r |-> 24}")};
  for (const auto* v : {&r.runs[0].small, &r.runs[0].big, &r.runs[0].pretty, &r.runs[0].flag}) {
    REQUIRE(std::holds_alternative<Converged>(*v));
    CHECK(std::get<Converged>(*v) == want);
  }
}

TEST_CASE("compare_all on while 1 skip") {
  auto r = compare_all(Cmd::while_(Expr::nat(1), Cmd::skip()), {InputStream()}, 200);
  CHECK(r.agreement);
  const auto& run = r.runs[0];
  CHECK(std::holds_alternative<Unknown>(run.small));
  CHECK(std::holds_alternative<Unknown>(run.big));
  CHECK(std::holds_alternative<Unknown>(run.pretty));
  CHECK(std::holds_alternative<Unknown>(run.flag));
  CHECK(run.lasso);
  CHECK(run.provers == std::array<bool, 3>{true, true, true});
}

TEST_CASE("compare_all on an input-dependent guard") {
  auto c = testing::program("input_guard.whl");
  auto r = compare_all(c, {testing::stream("1"), testing::stream("0")}, 500);
  CHECK(r.agreement);
  CHECK(std::holds_alternative<Stuck>(r.runs[0].small));
  CHECK(std::holds_alternative<Stuck>(r.runs[0].flag));
  CHECK(r.runs[1].lasso);
}

TEST_CASE("compare_all on exceptions") {
  auto r = compare_all(testing::program("uncaught.whl"), {InputStream()}, 500);
  CHECK(r.agreement);
  REQUIRE(std::holds_alternative<ExceptionV>(r.runs[0].flag));
  CHECK(std::get<ExceptionV>(r.runs[0].flag).value == Val::nat(3));
}

TEST_CASE("empty campaign") {
  GenConfig cfg;
  auto s = fuzz_campaign(cfg, 0, 500);
  CHECK(s.programs == 0);
  CHECK(s.runs == 0);
  CHECK(s.disagreements == 0);
  CHECK(s.verdicts.empty());
}

TEST_CASE("parallel campaign equals serial") {
  GenConfig cfg;
  cfg.seed = 99;
  CHECK(fuzz_campaign(cfg, 300, 300) == fuzz_campaign_serial(cfg, 300, 300));
  cfg.input = true;
  cfg.exceptions = true;
  CHECK(fuzz_campaign(cfg, 100, 300) == fuzz_campaign_serial(cfg, 100, 300));
}

TEST_CASE("campaign summary") {
  GenConfig cfg;
  auto s = fuzz_campaign(cfg, 200, 500);
  CHECK(s.programs == 200);
  CHECK(s.runs == 200);
  CHECK(s.disagreements == 0);
  std::size_t total = 0;
  for (const auto& [k, n] : s.verdicts) total += n;
  CHECK(total == s.runs);
  auto j = summary_to_json(s);
  CHECK(j["programs"] == 200);
}

TEST_CASE("counterexample files") {
  CampaignSummary s;
  s.counterexamples.push_back({3, "while 1 { skip }", "[0]", 500, "made up"});
  auto dir = std::filesystem::temp_directory_path() / "whilesos_ce_test";
  std::filesystem::remove_all(dir);
  write_counterexamples(s, dir);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    ++files;
    if (e.path().extension() == ".whl")
      CHECK(parse_cmd(testing::slurp(e.path())) == parse_cmd("while 1 { skip }"));
  }
  CHECK(files == 2);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
