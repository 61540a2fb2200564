#include "agglo/error.hpp"
#include "agglo/miner.hpp"
#include "agglo/semantics.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace agglo;

namespace {

std::string mine(std::vector<Trace> traces) { return to_expr(discover(EventLog(std::move(traces))).program); }

Dfg build(std::vector<Trace> traces) { return Dfg::build(expand_sentinels(EventLog(std::move(traces)))); }

void check_accepts_log(const Program& p, const EventLog& log) {
  auto m = compile(p);
  for (const auto& t : log.traces()) CHECK(accepts(m, t));
}

}  // namespace

TEST_SUITE("miner") {
  TEST_CASE("small logs") {
    CHECK(mine({{"a", "b"}}) == "(a b)");
    CHECK(mine({{"a", "a", "b"}, {"a", "b"}}) == "((a+) b)");
    CHECK(mine({{"a", "c"}, {"a", "b", "c"}}) == "(a (b?) c)");
    CHECK(mine({{"a", "b"}, {"b", "a"}}) == "(a&b)");
    CHECK(mine({{"a"}}) == "a");
    CHECK(mine({{"a", "b", "d"}, {"a", "c", "d"}}) == "(a (b|c) d)");
  }

  TEST_CASE("empty traces make the whole program optional") {
    auto p = discover(EventLog(std::vector<Trace>{{"a", "b"}, {}}));
    CHECK(to_expr(p.program) == "((a b)?)");
    CHECK(p.trace.empty_trace_wrap);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(discover(EventLog()), EmptyLogError);
    CHECK_THROWS_AS(discover(EventLog(std::vector<Trace>{{}, {}})), InputError);
    CHECK_THROWS_AS(discover(EventLog(std::vector<Trace>{{"a", "^"}})), ValidationError);
  }

  TEST_CASE("nested loop example is recovered from its bounded language") {
    auto truth = parse_expr("(a ((b|c) d)* (e&f))");
    EventLog log;
    for (const auto& t : oracle::language(truth, 7)) log.add(t);
    auto mined = discover(log).program;
    CHECK(to_expr(mined) == to_expr(canonicalize(simplify(truth))));
    CHECK(oracle::language(mined, 8) == oracle::language(truth, 8));
  }

  TEST_CASE("rule fixtures") {
    for (const auto& fx : load_rule_fixtures(std::string(AGGLO_TEST_DATA) + "/fixtures/rules")) {
      CAPTURE(fx.rule);
      auto result = discover(fx.log);
      CHECK(to_expr(result.program) == fx.expect);
      check_accepts_log(result.program, fx.log);
      bool fired = false;
      for (const auto& s : result.trace.steps) {
        fired = fired || rule_name(s.rule) == fx.rule;
        if (s.rule != RuleId::Sequence) CHECK(rule_name(s.rule) == fx.rule);
      }
      CHECK(fired);
    }
  }

  TEST_CASE("pattern matching") {
    auto g = build({{"a", "b"}, {"a", "b", "a", "b"}});
    auto m = match_rule(g, RuleId::Iteration2);
    REQUIRE(m);
    CHECK(g.display_label(m->first) == "a");
    CHECK(g.display_label(*m->second) == "b");

    auto diamond = build({{"a"}, {"b"}});
    CHECK(match_rule(diamond, RuleId::Selection1));

    auto chain = build({{"a"}});
    for (auto r : {RuleId::Sequence, RuleId::Iteration2, RuleId::Iteration3, RuleId::Iteration4, RuleId::Iteration5,
                   RuleId::Iteration6, RuleId::Concurrence, RuleId::Selection1}) {
      CHECK_FALSE(match_rule(chain, r));
    }
  }

  TEST_CASE("sequence does not swallow a two-node cycle") {
    auto g = build({{"a", "b"}, {"a", "b", "a", "b"}});
    CHECK_FALSE(match_rule(g, RuleId::Sequence));
  }

  TEST_CASE("concurrence needs the log") {
    auto g = build({{"a", "b"}, {"b", "a"}});
    CHECK_FALSE(match_rule(g, RuleId::Concurrence));
    EventLog log({{"a", "b"}, {"b", "a"}});
    ConcurrencyOracle oracle(&log);
    CHECK(match_rule(g, RuleId::Concurrence, &oracle));
    CHECK_FALSE(match_rule(g, RuleId::Iteration6, &oracle));
  }

  TEST_CASE("flower") {
    CHECK(to_expr(flower({Program::activity("c"), Program::activity("a"), Program::activity("b")})) ==
          "((a|b|c)+)");
    CHECK(to_expr(flower({parse_expr("(a b)"), Program::activity("c")})) == "(((a b)|c)+)");
    CHECK(to_expr(flower_model({"a", "b"}, true)) == "((a|b)*)");
  }

  TEST_CASE("flower fallback fires only when needed") {
    auto condensed = discover(EventLog(std::vector<Trace>{{"a", "b"}}));
    for (const auto& s : condensed.trace.steps) CHECK(s.rule != RuleId::FlowerFallback);

    EventLog tangled(std::vector<Trace>{{"a", "b"}, {"b", "c"}, {"c", "a"}});
    auto r = discover(tangled);
    CHECK(to_expr(r.program) == "((a|b|c)+)");
    REQUIRE_FALSE(r.trace.steps.empty());
    CHECK(r.trace.steps.back().rule == RuleId::FlowerFallback);
    check_accepts_log(r.program, tangled);
  }

  TEST_CASE("rewrite count is bounded by graph size") {
    EventLog log({{"a", "b", "c", "a"}, {"c", "b"}, {"b", "b", "d"}, {"d", "a", "c"}});
    auto r = discover(log);
    CHECK(r.trace.steps.size() <= r.trace.initial_nodes + r.trace.initial_edges);
    check_accepts_log(r.program, log);
  }

  TEST_CASE("step trace serializes as JSON lines") {
    auto r = discover(EventLog(std::vector<Trace>{{"a", "c"}, {"a", "b", "c"}}));
    auto lines = r.trace.to_json_lines();
    std::size_t n = 0;
    std::istringstream in(lines);
    for (std::string l; std::getline(in, l);) {
      auto j = nlohmann::json::parse(l);
      CHECK(j.contains("rule"));
      ++n;
    }
    CHECK(n == r.trace.steps.size());
  }
}
