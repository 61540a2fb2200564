#include "agglo/semantics.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <queue>

#include "agglo/error.hpp"

namespace agglo {

Matcher::Symbol Matcher::symbol_of(const std::string& activity) const {
  auto it = symbol_ids_.find(activity);
  return it == symbol_ids_.end() ? kNoSymbol : it->second;
}

namespace {

using State = Matcher::State;
using Symbol = Matcher::Symbol;
using Transition = Matcher::Transition;

struct SymbolTable {
  std::vector<std::string> names;
  std::unordered_map<std::string, Symbol> ids;

  Symbol intern(const std::string& name) {
    auto [it, inserted] = ids.try_emplace(name, static_cast<Symbol>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  }
};

// Epsilon-free automaton with initial state 0.
struct Automaton {
  std::vector<std::vector<Transition>> transitions;
  std::vector<bool> accepting;
};

class ThompsonBuilder {
 public:
  ThompsonBuilder(SymbolTable& symbols, std::uint32_t& next_leaf)
      : symbols_(symbols), next_leaf_(next_leaf) {}

  Automaton run(const Program& p) {
    auto [start, end] = build(p);
    return eliminate(start, end);
  }

 private:
  struct Fragment {
    State start;
    State end;
  };

  State add_state() {
    trans_.emplace_back();
    eps_.emplace_back();
    if (trans_.size() > Matcher::kMaxStates) {
      throw CapacityError("automaton exceeds " + std::to_string(Matcher::kMaxStates) +
                          " states; consider serializing nested parallel blocks");
    }
    return static_cast<State>(trans_.size() - 1);
  }

  void eps(State from, State to) { eps_[from].push_back(to); }

  Fragment build(const Program& p) {
    switch (p.kind()) {
      case NodeKind::Activity: {
        auto s = add_state();
        auto e = add_state();
        trans_[s].push_back({symbols_.intern(p.name()), e, next_leaf_++});
        return {s, e};
      }
      case NodeKind::Sequence: {
        Fragment whole{0, 0};
        bool first = true;
        for (const auto& c : p.children()) {
          auto f = build(c);
          if (first) {
            whole = f;
            first = false;
          } else {
            eps(whole.end, f.start);
            whole.end = f.end;
          }
        }
        return whole;
      }
      case NodeKind::Choice: {
        auto s = add_state();
        auto e = add_state();
        for (const auto& c : p.children()) {
          auto f = build(c);
          eps(s, f.start);
          eps(f.end, e);
        }
        return {s, e};
      }
      case NodeKind::Optional:
      case NodeKind::Plus:
      case NodeKind::Star: {
        auto s = add_state();
        auto e = add_state();
        auto f = build(p.body());
        eps(s, f.start);
        eps(f.end, e);
        if (p.kind() != NodeKind::Plus) eps(s, e);
        if (p.kind() != NodeKind::Optional) eps(f.end, f.start);
        return {s, e};
      }
      case NodeKind::Parallel:
        return embed(shuffle(p));
    }
    throw InvariantError("unhandled node kind");
  }

  Automaton shuffle(const Program& p) {
    std::vector<Automaton> parts;
    for (const auto& c : p.children()) parts.push_back(ThompsonBuilder(symbols_, next_leaf_).run(c));
    Automaton out;
    std::map<std::vector<State>, State> index;
    std::deque<std::vector<State>> queue;
    auto intern = [&](std::vector<State> tuple) {
      auto [it, inserted] = index.try_emplace(tuple, static_cast<State>(out.transitions.size()));
      if (inserted) {
        if (out.transitions.size() >= Matcher::kMaxStates) {
          throw CapacityError("parallel composition exceeds " +
                              std::to_string(Matcher::kMaxStates) +
                              " product states; consider serializing nested parallel blocks");
        }
        bool acc = true;
        for (std::size_t i = 0; i < parts.size(); ++i) acc = acc && parts[i].accepting[tuple[i]];
        out.transitions.emplace_back();
        out.accepting.push_back(acc);
        queue.push_back(std::move(tuple));
      }
      return it->second;
    };
    intern(std::vector<State>(parts.size(), 0));
    while (!queue.empty()) {
      auto tuple = std::move(queue.front());
      queue.pop_front();
      auto from = index.at(tuple);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        for (const auto& tr : parts[i].transitions[tuple[i]]) {
          auto next = tuple;
          next[i] = tr.target;
          auto to = intern(std::move(next));
          out.transitions[from].push_back({tr.symbol, to, tr.leaf});
        }
      }
    }
    return out;
  }

  Fragment embed(const Automaton& a) {
    auto s = add_state();
    auto e = add_state();
    auto base = static_cast<State>(trans_.size());
    for (std::size_t i = 0; i < a.transitions.size(); ++i) add_state();
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
      for (auto tr : a.transitions[i]) {
        tr.target += base;
        trans_[base + i].push_back(tr);
      }
      if (a.accepting[i]) eps(base + static_cast<State>(i), e);
    }
    eps(s, base);
    return {s, e};
  }

  Automaton eliminate(State start, State final_state) {
    const auto n = trans_.size();
    std::vector<std::vector<Transition>> closed(n);
    std::vector<bool> acc(n, false);
    std::vector<std::uint32_t> mark(n, 0);
    std::vector<State> stack;
    for (State s = 0; s < n; ++s) {
      // iterative DFS over epsilon edges
      stack.assign(1, s);
      mark[s] = s + 1;
      while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        if (q == final_state) acc[s] = true;
        closed[s].insert(closed[s].end(), trans_[q].begin(), trans_[q].end());
        for (auto r : eps_[q]) {
          if (mark[r] != s + 1) {
            mark[r] = s + 1;
            stack.push_back(r);
          }
        }
      }
    }
    // keep only states reachable from start, renumbered with start = 0
    std::vector<State> remap(n, std::numeric_limits<State>::max());
    std::vector<State> order{start};
    remap[start] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (const auto& tr : closed[order[i]]) {
        if (remap[tr.target] == std::numeric_limits<State>::max()) {
          remap[tr.target] = static_cast<State>(order.size());
          order.push_back(tr.target);
        }
      }
    }
    Automaton out;
    out.transitions.resize(order.size());
    out.accepting.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto& dst = out.transitions[i];
      for (auto tr : closed[order[i]]) {
        tr.target = remap[tr.target];
        dst.push_back(tr);
      }
      std::sort(dst.begin(), dst.end(), [](const Transition& a, const Transition& b) {
        return std::tie(a.symbol, a.target, a.leaf) < std::tie(b.symbol, b.target, b.leaf);
      });
      dst.erase(std::unique(dst.begin(), dst.end(),
                            [](const Transition& a, const Transition& b) {
                              return a.symbol == b.symbol && a.target == b.target && a.leaf == b.leaf;
                            }),
                dst.end());
      out.accepting[i] = acc[order[i]];
    }
    return out;
  }

  SymbolTable& symbols_;
  std::uint32_t& next_leaf_;
  std::vector<std::vector<Transition>> trans_;
  std::vector<std::vector<State>> eps_;
};

}  // namespace

Matcher compile(const Program& p) {
  SymbolTable symbols;
  std::uint32_t next_leaf = 0;
  auto a = ThompsonBuilder(symbols, next_leaf).run(p);
  Matcher m;
  m.transitions_ = std::move(a.transitions);
  m.accepting_ = std::move(a.accepting);
  m.symbols_ = std::move(symbols.names);
  m.symbol_ids_ = std::move(symbols.ids);
  m.leaf_count_ = next_leaf;

  std::vector<std::size_t> dist(m.state_count(), std::numeric_limits<std::size_t>::max());
  std::deque<State> queue{0};
  dist[0] = 0;
  m.min_len_ = std::numeric_limits<std::size_t>::max();
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    if (m.accepting_[s]) {
      m.min_len_ = dist[s];
      break;
    }
    for (const auto& tr : m.transitions_[s]) {
      if (dist[tr.target] == std::numeric_limits<std::size_t>::max()) {
        dist[tr.target] = dist[s] + 1;
        queue.push_back(tr.target);
      }
    }
  }
  if (m.min_len_ == std::numeric_limits<std::size_t>::max()) {
    throw InvariantError("compiled program accepts nothing");
  }
  return m;
}

bool accepts(const Matcher& m, const Trace& t) {
  std::vector<State> current{m.initial()};
  std::vector<char> seen(m.state_count(), 0);
  for (const auto& activity : t) {
    auto sym = m.symbol_of(activity);
    if (sym == Matcher::kNoSymbol) return false;
    std::vector<State> next;
    for (auto s : current) {
      for (const auto& tr : m.transitions(s)) {
        if (tr.symbol == sym && !seen[tr.target]) {
          seen[tr.target] = 1;
          next.push_back(tr.target);
        }
      }
    }
    for (auto s : next) seen[s] = 0;
    if (next.empty()) return false;
    current = std::move(next);
  }
  return std::any_of(current.begin(), current.end(), [&](State s) { return m.accepting(s); });
}

std::set<Trace> enumerate_language(const Matcher& m, std::size_t max_len) {
  if (max_len > kMaxEnumerationLength) {
    throw CapacityError("enumeration bound " + std::to_string(max_len) + " exceeds the limit of " +
                        std::to_string(kMaxEnumerationLength));
  }
  // distance from each state to acceptance, for pruning
  const auto inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<State>> reverse(m.state_count());
  for (State s = 0; s < m.state_count(); ++s) {
    for (const auto& tr : m.transitions(s)) reverse[tr.target].push_back(s);
  }
  std::vector<std::size_t> to_accept(m.state_count(), inf);
  std::deque<State> queue;
  for (State s = 0; s < m.state_count(); ++s) {
    if (m.accepting(s)) {
      to_accept[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    for (auto r : reverse[s]) {
      if (to_accept[r] == inf) {
        to_accept[r] = to_accept[s] + 1;
        queue.push_back(r);
      }
    }
  }

  SubsetView dfa(m);
  std::vector<std::size_t> set_dist;
  auto dist_of = [&](SubsetView::Id id) {
    while (set_dist.size() <= id) {
      std::size_t d = inf;
      for (auto s : dfa.states(static_cast<SubsetView::Id>(set_dist.size()))) d = std::min(d, to_accept[s]);
      set_dist.push_back(d);
    }
    return set_dist[id];
  };

  std::set<Trace> out;
  Trace prefix;
  // explicit DFS stack of (subset, next enabled-symbol index)
  struct Frame {
    SubsetView::Id id;
    std::size_t next;
  };
  std::vector<Frame> stack{{dfa.initial(), 0}};
  if (dfa.accepting(dfa.initial())) out.insert(prefix);
  while (!stack.empty()) {
    auto& top = stack.back();
    const auto& enabled = dfa.enabled(top.id);
    if (top.next >= enabled.size() || prefix.size() >= max_len) {
      stack.pop_back();
      if (!prefix.empty() && !stack.empty()) prefix.pop_back();
      continue;
    }
    auto sym = enabled[top.next++];
    SubsetView::Id to = 0;
    dfa.step(top.id, sym, to);
    if (dist_of(to) == inf || prefix.size() + 1 + dist_of(to) > max_len) continue;
    prefix.push_back(m.symbol_name(sym));
    if (dfa.accepting(to)) {
      out.insert(prefix);
      if (out.size() > kMaxEnumeratedTraces) {
        throw CapacityError("language enumeration exceeds " + std::to_string(kMaxEnumeratedTraces) +
                            " traces");
      }
    }
    stack.push_back({to, 0});
  }
  return out;
}

Alignment align(const Matcher& m, const Trace& t) {
  const std::size_t n = t.size();
  const std::size_t states = m.state_count();
  const auto inf = std::numeric_limits<std::size_t>::max();
  struct Back {
    std::uint32_t layer = 0;
    State state = 0;
    Symbol symbol = Matcher::kNoSymbol;  // model move emitted, if any
    std::uint32_t leaf = 0;
  };
  std::vector<std::vector<std::size_t>> cost(n + 1, std::vector<std::size_t>(states, inf));
  std::vector<std::vector<Back>> back(n + 1, std::vector<Back>(states));

  // model-only moves inside one layer, unit cost
  auto relax = [&](std::size_t layer) {
    auto& c = cost[layer];
    using Item = std::pair<std::size_t, State>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (State s = 0; s < states; ++s) {
      if (c[s] != inf) pq.push({c[s], s});
    }
    while (!pq.empty()) {
      auto [d, s] = pq.top();
      pq.pop();
      if (d != c[s]) continue;
      for (const auto& tr : m.transitions(s)) {
        if (d + 1 < c[tr.target]) {
          c[tr.target] = d + 1;
          back[layer][tr.target] = {static_cast<std::uint32_t>(layer), s, tr.symbol, tr.leaf};
          pq.push({d + 1, tr.target});
        }
      }
    }
  };

  cost[0][m.initial()] = 0;
  relax(0);
  for (std::size_t i = 0; i < n; ++i) {
    auto sym = m.symbol_of(t[i]);
    auto& next = cost[i + 1];
    for (State s = 0; s < states; ++s) {
      auto c = cost[i][s];
      if (c == inf) continue;
      if (c + 1 < next[s]) {  // drop the log event
        next[s] = c + 1;
        back[i + 1][s] = {static_cast<std::uint32_t>(i), s, Matcher::kNoSymbol, 0};
      }
      for (const auto& tr : m.transitions(s)) {
        auto step = c + (tr.symbol == sym ? 0 : 1);
        if (step < next[tr.target]) {
          next[tr.target] = step;
          back[i + 1][tr.target] = {static_cast<std::uint32_t>(i), s, tr.symbol, tr.leaf};
        }
      }
    }
    relax(i + 1);
  }

  Alignment out;
  out.min_model_len = m.min_accepted_length();
  State best = 0;
  out.cost = inf;
  for (State s = 0; s < states; ++s) {
    if (m.accepting(s) && cost[n][s] < out.cost) {
      out.cost = cost[n][s];
      best = s;
    }
  }
  if (out.cost == inf) throw InvariantError("alignment found no accepting state");

  std::size_t layer = n;
  State s = best;
  // the initial state is never a transition target, so (0, initial) is the
  // only origin of the back-pointer chain
  while (layer != 0 || s != m.initial()) {
    const auto& b = back[layer][s];
    if (b.symbol != Matcher::kNoSymbol) {
      out.repaired.push_back(m.symbol_name(b.symbol));
      out.leaves.push_back(b.leaf);
    }
    layer = b.layer;
    s = b.state;
  }
  std::reverse(out.repaired.begin(), out.repaired.end());
  std::reverse(out.leaves.begin(), out.leaves.end());
  return out;
}

SubsetView::SubsetView(const Matcher& m) : m_(m) { intern({m.initial()}); }

SubsetView::Id SubsetView::intern(StateSet set) {
  auto [it, inserted] = index_.try_emplace(set, static_cast<Id>(sets_.size()));
  if (inserted) {
    bool acc = std::any_of(set.begin(), set.end(), [&](Matcher::State s) { return m_.accepting(s); });
    sets_.push_back(std::move(set));
    accepting_.push_back(acc);
    next_.emplace_back();
    enabled_.emplace_back();
    enabled_ready_.push_back(false);
  }
  return it->second;
}

bool SubsetView::step(Id from, Matcher::Symbol symbol, Id& to) {
  auto cached = next_[from].find(symbol);
  if (cached != next_[from].end()) {
    to = cached->second;
    return true;
  }
  StateSet targets;
  for (auto s : sets_[from]) {
    for (const auto& tr : m_.transitions(s)) {
      if (tr.symbol == symbol) targets.push_back(tr.target);
    }
  }
  if (targets.empty()) return false;
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  to = intern(std::move(targets));
  next_[from][symbol] = to;
  return true;
}

const std::vector<Matcher::Symbol>& SubsetView::enabled(Id id) {
  if (!enabled_ready_[id]) {
    std::vector<Matcher::Symbol> syms;
    for (auto s : sets_[id]) {
      for (const auto& tr : m_.transitions(s)) syms.push_back(tr.symbol);
    }
    std::sort(syms.begin(), syms.end());
    syms.erase(std::unique(syms.begin(), syms.end()), syms.end());
    enabled_[id] = std::move(syms);
    enabled_ready_[id] = true;
  }
  return enabled_[id];
}

}  // namespace agglo
