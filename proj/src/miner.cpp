#include "agglo/miner.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "agglo/error.hpp"

namespace agglo {

std::string_view rule_name(RuleId rule) {
  switch (rule) {
    case RuleId::Iteration1: return "iteration1";
    case RuleId::Sequence: return "sequence";
    case RuleId::Iteration2: return "iteration2";
    case RuleId::Iteration3: return "iteration3";
    case RuleId::Iteration4: return "iteration4";
    case RuleId::Iteration5: return "iteration5";
    case RuleId::Iteration6: return "iteration6";
    case RuleId::Concurrence: return "concurrence";
    case RuleId::Selection1: return "selection1";
    case RuleId::Selection2: return "selection2";
    case RuleId::FlowerFallback: return "flower";
  }
  return "?";
}

std::string MineTrace::to_json_lines() const {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    nlohmann::json j = {{"step", i + 1},
                        {"rule", std::string(rule_name(s.rule))},
                        {"nodes", s.nodes},
                        {"result", s.result},
                        {"label", s.label}};
    if (s.removed_edge) j["removed_edge"] = {s.removed_edge->first, s.removed_edge->second};
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

using Adjacency = Dfg::Adjacency;

// Neighbours excluding the node itself and one other node.
std::vector<NodeId> others(const Adjacency& adj, NodeId self, NodeId skip) {
  std::vector<NodeId> out;
  for (const auto& [n, _] : adj) {
    if (n != self && n != skip) out.push_back(n);
  }
  return out;
}

bool only(const Adjacency& adj, NodeId self, NodeId expected) {
  for (const auto& [n, _] : adj) {
    if (n != self && n != expected) return false;
  }
  return adj.count(expected) > 0;
}

bool shares_key(const Adjacency& a, const Adjacency& b, NodeId u, NodeId v) {
  for (const auto& [n, _] : a) {
    if (n != u && n != v && b.count(n)) return true;
  }
  return false;
}

bool subset_of(const std::vector<NodeId>& items, const Adjacency& adj) {
  return std::all_of(items.begin(), items.end(), [&](NodeId n) { return adj.count(n) > 0; });
}

// Two-node cycle rules: returns true when (u, v) matches `rule`.
bool cycle_matches(const Dfg& g, RuleId rule, NodeId u, NodeId v, ConcurrencyOracle* oracle) {
  const auto& in_u = g.predecessors(u);
  const auto& out_u = g.successors(u);
  const auto& in_v = g.predecessors(v);
  const auto& out_v = g.successors(v);
  switch (rule) {
    case RuleId::Iteration2:
      return only(in_v, v, u) && only(out_u, u, v);
    case RuleId::Iteration3:
      return only(in_v, v, u) && only(out_v, v, u);
    case RuleId::Iteration4:
      return only(out_u, u, v) && subset_of(others(in_u, u, v), in_v) &&
             shares_key(in_u, in_v, u, v);
    case RuleId::Iteration5:
      return only(in_v, v, u) && subset_of(others(out_v, v, u), out_u) &&
             shares_key(out_u, out_v, u, v);
    case RuleId::Iteration6:
    case RuleId::Concurrence: {
      if (!shares_key(in_u, in_v, u, v) || !shares_key(out_u, out_v, u, v)) return false;
      bool parallel = oracle != nullptr && oracle->concurrent(g, u, v);
      return rule == RuleId::Concurrence ? parallel : !parallel;
    }
    default:
      return false;
  }
}

bool symmetric(RuleId rule) { return rule == RuleId::Iteration6 || rule == RuleId::Concurrence; }

std::optional<MatchSite> match_cycle(const Dfg& g, RuleId rule, ConcurrencyOracle* oracle) {
  for (auto u : g.inner_node_ids()) {
    for (const auto& [v, _] : g.successors(u)) {
      if (v == u || g.is_sentinel(v) || !g.has_edge(v, u)) continue;
      if (symmetric(rule) && v < u) continue;
      if (cycle_matches(g, rule, u, v, oracle)) return MatchSite{rule, u, v};
    }
  }
  return std::nullopt;
}

std::optional<MatchSite> match_selection1(const Dfg& g) {
  for (auto u : g.inner_node_ids()) {
    const auto& in_u = g.predecessors(u);
    const auto& out_u = g.successors(u);
    if (in_u.empty() || out_u.empty() || in_u.count(u) || out_u.count(u)) continue;
    std::optional<NodeId> best;
    for (const auto& [p, _] : in_u) {
      for (const auto& [v, __] : g.successors(p)) {
        if (v <= u || g.is_sentinel(v) || (best && v >= *best)) continue;
        if (g.has_edge(u, v) || g.has_edge(v, u)) continue;
        const auto& in_v = g.predecessors(v);
        const auto& out_v = g.successors(v);
        if (in_v.size() != in_u.size() || out_v.size() != out_u.size()) continue;
        bool same = std::equal(in_u.begin(), in_u.end(), in_v.begin(),
                               [](const auto& a, const auto& b) { return a.first == b.first; }) &&
                    std::equal(out_u.begin(), out_u.end(), out_v.begin(),
                               [](const auto& a, const auto& b) { return a.first == b.first; });
        if (same) best = v;
      }
    }
    if (best) return MatchSite{RuleId::Selection1, u, *best};
  }
  return std::nullopt;
}

}  // namespace

bool ConcurrencyOracle::concurrent(const Dfg& g, NodeId u, NodeId v) {
  std::pair<NodeId, NodeId> key{std::min(u, v), std::max(u, v)};
  auto cached = cache_.find(key);
  if (cached != cache_.end()) return cached->second;
  bool result = false;
  if (log_ != nullptr) {
    auto leaves_u = g.label(u).leaves();
    auto leaves_v = g.label(v).leaves();
    std::unordered_set<std::string> side_u(leaves_u.begin(), leaves_u.end());
    std::unordered_set<std::string> side_v(leaves_v.begin(), leaves_v.end());
    bool touched = false;
    result = true;
    for (const auto& trace : log_->traces()) {
      int blocks_u = 0;
      int blocks_v = 0;
      int last = 0;  // 0 none, 1 u, 2 v
      for (const auto& a : trace) {
        int side = side_u.count(a) ? 1 : side_v.count(a) ? 2 : 0;
        if (side == 0 || side == last) continue;
        (side == 1 ? blocks_u : blocks_v)++;
        last = side;
      }
      if (blocks_u == 0 && blocks_v == 0) continue;
      touched = true;
      if (blocks_u != 1 || blocks_v != 1) {
        result = false;
        break;
      }
    }
    result = result && touched;
  }
  cache_.emplace(key, result);
  return result;
}

std::optional<MatchSite> match_rule(const Dfg& g, RuleId rule, ConcurrencyOracle* oracle) {
  switch (rule) {
    case RuleId::Iteration1:
      for (auto u : g.inner_node_ids()) {
        if (g.has_edge(u, u)) return MatchSite{rule, u, std::nullopt};
      }
      return std::nullopt;
    case RuleId::Sequence:
      for (auto u : g.inner_node_ids()) {
        const auto& out = g.successors(u);
        if (out.size() != 1) continue;
        auto v = out.begin()->first;
        if (v == u || g.is_sentinel(v) || g.has_edge(v, u)) continue;
        if (g.predecessors(v).size() == 1) return MatchSite{rule, u, v};
      }
      return std::nullopt;
    case RuleId::Iteration2:
    case RuleId::Iteration3:
    case RuleId::Iteration4:
    case RuleId::Iteration5:
    case RuleId::Iteration6:
    case RuleId::Concurrence:
      return match_cycle(g, rule, oracle);
    case RuleId::Selection1:
      return match_selection1(g);
    case RuleId::Selection2:
      for (auto u : g.inner_node_ids()) {
        auto in = others(g.predecessors(u), u, u);
        auto out = others(g.successors(u), u, u);
        if (in.size() != 1 || out.size() != 1 || in[0] == out[0]) continue;
        if (g.has_edge(in[0], out[0])) {
          MatchSite site{rule, u, std::nullopt};
          site.skip_from = in[0];
          site.skip_to = out[0];
          return site;
        }
      }
      return std::nullopt;
    case RuleId::FlowerFallback:
      return std::nullopt;
  }
  return std::nullopt;
}

MineStep apply_rule(Dfg& g, const MatchSite& site) {
  const auto u = site.first;
  MineStep step{site.rule, {u}, u, {}, std::nullopt};
  auto contract = [&](Program label) {
    auto v = site.second.value();
    step.nodes = {u, v};
    step.result = g.contract(u, v, simplify(label));
  };
  auto lu = [&] { return g.label(u); };
  auto lv = [&] { return g.label(site.second.value()); };
  switch (site.rule) {
    case RuleId::Iteration1:
      g.relabel(u, simplify(Program::plus(lu())));
      g.delete_edge(u, u);
      step.removed_edge = {u, u};
      break;
    case RuleId::Sequence:
      contract(Program::sequence({lu(), lv()}));
      break;
    case RuleId::Iteration2:
      contract(Program::plus(Program::sequence({lu(), lv()})));
      break;
    case RuleId::Iteration3:
      if (lu().is_activity()) {
        // duplicate the loop head: (((u v)+) u)
        contract(Program::sequence({Program::plus(Program::sequence({lu(), lv()})), lu()}));
      } else {
        contract(Program::plus(Program::sequence({lu(), Program::optional(lv())})));
      }
      break;
    case RuleId::Iteration4:
      contract(Program::plus(Program::sequence({Program::optional(lu()), lv()})));
      break;
    case RuleId::Iteration5:
      contract(Program::plus(Program::sequence({lu(), Program::optional(lv())})));
      break;
    case RuleId::Iteration6:
      contract(Program::plus(Program::choice({lu(), lv()})));
      break;
    case RuleId::Concurrence:
      contract(Program::parallel({lu(), lv()}));
      break;
    case RuleId::Selection1:
      contract(Program::choice({lu(), lv()}));
      break;
    case RuleId::Selection2:
      g.relabel(u, simplify(Program::optional(lu())));
      g.delete_edge(site.skip_from, site.skip_to);
      step.removed_edge = {site.skip_from, site.skip_to};
      break;
    case RuleId::FlowerFallback:
      throw InvariantError("flower fallback is not a matchable rule");
  }
  step.label = to_expr(g.label(step.result));
  return step;
}

Program flower(std::vector<Program> parts) {
  if (parts.empty()) throw InvariantError("flower over no fragments");
  if (parts.size() == 1) return simplify(Program::plus(std::move(parts.front())));
  std::vector<std::pair<std::string, Program>> keyed;
  for (auto& p : parts) keyed.emplace_back(to_expr(canonicalize(p)), std::move(p));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  parts.clear();
  for (auto& [_, p] : keyed) parts.push_back(std::move(p));
  return simplify(Program::plus(Program::choice(std::move(parts))));
}

Program flower_model(const std::set<Activity>& alphabet, bool allow_empty) {
  std::vector<Program> leaves;
  for (const auto& a : alphabet) leaves.push_back(Program::activity(a));
  auto f = flower(std::move(leaves));
  return allow_empty ? simplify(Program::optional(std::move(f))) : f;
}

DiscoveryResult discover(const EventLog& log) {
  if (log.empty()) throw EmptyLogError("cannot discover a model from an empty log");
  validate(log);
  if (std::all_of(log.traces().begin(), log.traces().end(), [](const Trace& t) { return t.empty(); })) {
    throw InputError("every trace in the log is empty; there is no activity to model");
  }
  auto g = Dfg::build(expand_sentinels(log));
  DiscoveryResult result{Program::activity("_"), {}};
  auto& trace = result.trace;
  trace.initial_nodes = g.node_count();
  trace.initial_edges = g.edge_count();
  // Sentinels cannot take part in Selection2, so empty traces are handled by
  // wrapping the final program instead.
  if (g.has_edge(Dfg::kBeginId, Dfg::kEndId)) {
    g.delete_edge(Dfg::kBeginId, Dfg::kEndId);
    trace.empty_trace_wrap = true;
  }

  ConcurrencyOracle oracle(&log);
  static constexpr std::array<std::initializer_list<RuleId>, 5> kPhases{{
      {RuleId::Iteration1},
      {RuleId::Sequence},
      {RuleId::Iteration2, RuleId::Iteration3, RuleId::Iteration4, RuleId::Iteration5,
       RuleId::Iteration6, RuleId::Concurrence},
      {RuleId::Selection1},
      {RuleId::Selection2},
  }};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& phase : kPhases) {
      bool fired = true;
      while (fired) {
        fired = false;
        for (auto rule : phase) {
          if (auto site = match_rule(g, rule, &oracle)) {
            trace.steps.push_back(apply_rule(g, *site));
            fired = changed = true;
            break;
          }
        }
      }
    }
  }

  auto remaining = g.inner_node_ids();
  if (remaining.empty()) throw InvariantError("discovery condensed the graph to nothing");
  if (remaining.size() > 1) {
    std::vector<Program> parts;
    for (auto id : remaining) parts.push_back(g.label(id));
    auto label = flower(std::move(parts));
    auto w = remaining.front();
    for (std::size_t i = 1; i < remaining.size(); ++i) w = g.contract(w, remaining[i], label);
    trace.steps.push_back(MineStep{RuleId::FlowerFallback, remaining, w, to_expr(label), std::nullopt});
  }
  auto program = g.label(g.inner_node_ids().front());
  if (trace.empty_trace_wrap) program = simplify(Program::optional(std::move(program)));
  result.program = std::move(program);
  return result;
}

}  // namespace agglo
