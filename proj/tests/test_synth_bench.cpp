#include "agglo/error.hpp"
#include "agglo/semantics.hpp"
#include "agglo/synth_bench.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace agglo;

TEST_SUITE("synth_bench") {
  TEST_CASE("sampling is deterministic for a seed") {
    GeneratorConfig cfg;
    std::mt19937_64 r1(42), r2(42);
    for (int i = 0; i < 20; ++i) CHECK(sample_program(cfg, r1) == sample_program(cfg, r2));
  }

  TEST_CASE("depth one gives a single activity") {
    GeneratorConfig cfg;
    cfg.max_depth = 1;
    std::mt19937_64 rng(1);
    CHECK(sample_program(cfg, rng).is_activity());
  }

  TEST_CASE("no repeated activities when duplicates are off") {
    GeneratorConfig cfg;
    cfg.alphabet_size = 5;
    cfg.max_depth = 3;
    cfg.max_arity = 2;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      auto leaves = sample_program(cfg, rng).leaves();
      std::set<std::string> distinct(leaves.begin(), leaves.end());
      CHECK(distinct.size() == leaves.size());
      for (const auto& l : leaves) CHECK(l < "f");
    }
  }

  TEST_CASE("configuration errors") {
    GeneratorConfig cfg;
    cfg.alphabet_size = 5;
    std::mt19937_64 rng(0);
    CHECK_THROWS_AS(sample_program(cfg, rng), GenerationError);
    cfg = GeneratorConfig{};
    cfg.weights.plus = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = GeneratorConfig{};
    cfg.alphabet_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = GeneratorConfig{};
    cfg.weights = OperatorWeights{0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("sampled programs are simplified and canonical") {
    GeneratorConfig cfg;
    cfg.allow_duplicates = true;
    cfg.alphabet_size = 5;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
      auto p = sample_program(cfg, rng);
      CHECK(canonicalize(simplify(p)) == p);
    }
  }

  TEST_CASE("trace sampling") {
    std::mt19937_64 rng(5);
    auto one = sample_traces(parse_expr("(a b)"), 1, 10, 3, rng);
    REQUIRE(one);
    CHECK(*one == std::vector<Trace>{{"a", "b"}});
    CHECK_FALSE(sample_traces(parse_expr("(a b)"), 2, 50, 3, rng));
    auto two = sample_traces(parse_expr("(a (b|c))"), 2, 100, 3, rng);
    REQUIRE(two);
    CHECK(*two == std::vector<Trace>{{"a", "b"}, {"a", "c"}});
    CHECK_THROWS_AS(sample_traces(parse_expr("a"), 0, 1, 3, rng), ConfigError);
  }

  TEST_CASE("executions stay inside the language and the loop bound") {
    GeneratorConfig cfg;
    cfg.allow_duplicates = true;
    cfg.alphabet_size = 5;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
      auto p = sample_program(cfg, rng);
      auto m = compile(p);
      for (int k = 0; k < 10; ++k) CHECK(accepts(m, execute(p, 3, rng)));
    }
    auto loop = parse_expr("(a+)");
    for (int k = 0; k < 50; ++k) {
      auto t = execute(loop, 3, rng);
      CHECK(t.size() >= 1);
      CHECK(t.size() <= 3);
    }
  }

  TEST_CASE("parallel interleavings are all reachable") {
    std::mt19937_64 rng(2);
    auto got = sample_traces(parse_expr("((a b)&(c d))"), 6, 500, 3, rng);
    REQUIRE(got);
    std::set<Trace> all(got->begin(), got->end());
    CHECK(all == oracle::language(parse_expr("((a b)&(c d))"), 4));
  }

  TEST_CASE("benchmark report") {
    BenchConfig cfg;
    cfg.programs = 40;
    cfg.generator.seed = 17;
    auto r = run_benchmark(cfg);
    CHECK(r.programs == 40);
    CHECK(r.results.size() == 40);
    CHECK(r.candidates >= r.programs);
    CHECK(r.exact_match_rate >= 0.0);
    CHECK(r.exact_match_rate <= 1.0);
    CHECK(r.exact_matches == static_cast<std::size_t>(std::count_if(
                                 r.results.begin(), r.results.end(),
                                 [](const ProgramResult& p) { return p.synthesis.exact_match; })));
    for (const auto& p : r.results) CHECK(p.traces.size() == cfg.traces);
    CHECK(to_json(r).dump() == to_json(run_benchmark(cfg)).dump());
    CHECK(to_table(r).find("exact matches") != std::string::npos);
    auto lines = per_program_json_lines(r);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 40);
  }

  TEST_CASE("benchmark with nothing surviving the filter") {
    BenchConfig cfg;
    cfg.programs = 3;
    cfg.generator.max_depth = 1;
    cfg.candidate_factor = 2;
    CHECK_THROWS_AS(run_benchmark(cfg), ConfigError);
  }
}
