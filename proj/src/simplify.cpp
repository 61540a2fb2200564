// Simplification and canonical ordering of structured programs.
//
// The rewrite table (all rules preserve the trace language):
//   ((S?)?) => (S?)    ((S+)?) => (S*)    ((S*)?) => (S*)
//   ((S+)+) => (S+)    ((S?)+) => (S*)    ((S*)+) => (S*)
//   ((S?)*) => (S*)    ((S+)*) => (S*)    ((S*)*) => (S*)
//   nested sequence / choice / parallel nodes are flattened
//   ((S1?)|S2) and (S1|(S2?)) => ((S1|S2)?)
//   a loop over a choice absorbs + and * from its branches, turning into *
//     when a * branch was absorbed
//   a loop over a sequence of ?/* parts => ((S1|S2|...)*)
//   a loop over a sequence with one + part and ? parts drops that +
// The table's two-operand rows are applied in their n-ary form.

#include <algorithm>
#include <optional>

#include "agglo/program.hpp"

namespace agglo {

namespace {

bool is_loop(NodeKind k) { return k == NodeKind::Plus || k == NodeKind::Star; }

std::optional<Program> rewrite_unary(const Program& p) {
  const auto outer = p.kind();
  const auto& inner = p.body();
  if (!inner.is_unary()) return std::nullopt;
  const auto ik = inner.kind();
  if (outer == NodeKind::Optional && ik == NodeKind::Optional) return Program::optional(inner.body());
  if (outer == NodeKind::Plus && ik == NodeKind::Plus) return Program::plus(inner.body());
  // every other pairing of ?, +, * collapses to *
  return Program::star(inner.body());
}

std::optional<Program> flatten(const Program& p) {
  const auto k = p.kind();
  if (k != NodeKind::Sequence && k != NodeKind::Choice && k != NodeKind::Parallel) return std::nullopt;
  auto children = p.children();
  if (std::none_of(children.begin(), children.end(), [k](const Program& c) { return c.kind() == k; })) {
    return std::nullopt;
  }
  std::vector<Program> out;
  for (const auto& c : children) {
    if (c.kind() == k) {
      out.insert(out.end(), c.children().begin(), c.children().end());
    } else {
      out.push_back(c);
    }
  }
  return Program::make(k, std::move(out));
}

std::optional<Program> hoist_choice_optional(const Program& p) {
  if (p.kind() != NodeKind::Choice) return std::nullopt;
  auto branches = p.children();
  if (std::none_of(branches.begin(), branches.end(),
                   [](const Program& b) { return b.kind() == NodeKind::Optional; })) {
    return std::nullopt;
  }
  std::vector<Program> out;
  for (const auto& b : branches) out.push_back(b.kind() == NodeKind::Optional ? b.body() : b);
  return Program::optional(Program::choice(std::move(out)));
}

std::optional<Program> loop_over_choice(const Program& p) {
  if (!is_loop(p.kind()) || p.body().kind() != NodeKind::Choice) return std::nullopt;
  auto branches = p.body().children();
  bool changed = false;
  bool saw_star = false;
  std::vector<Program> out;
  for (const auto& b : branches) {
    if (is_loop(b.kind())) {
      changed = true;
      saw_star |= b.kind() == NodeKind::Star;
      out.push_back(b.body());
    } else {
      out.push_back(b);
    }
  }
  if (!changed) return std::nullopt;
  auto choice = Program::choice(std::move(out));
  if (p.kind() == NodeKind::Star || saw_star) return Program::star(std::move(choice));
  return Program::plus(std::move(choice));
}

std::optional<Program> loop_over_sequence(const Program& p) {
  if (!is_loop(p.kind()) || p.body().kind() != NodeKind::Sequence) return std::nullopt;
  auto parts = p.body().children();
  auto skippable = [](const Program& c) {
    return c.kind() == NodeKind::Optional || c.kind() == NodeKind::Star;
  };
  if (std::all_of(parts.begin(), parts.end(), skippable)) {
    std::vector<Program> out;
    for (const auto& c : parts) out.push_back(c.body());
    return Program::star(Program::choice(std::move(out)));
  }
  auto plus_count = std::count_if(parts.begin(), parts.end(),
                                   [](const Program& c) { return c.kind() == NodeKind::Plus; });
  auto opt_count = std::count_if(parts.begin(), parts.end(),
                                 [](const Program& c) { return c.kind() == NodeKind::Optional; });
  if (plus_count == 1 && plus_count + opt_count == static_cast<long>(parts.size())) {
    std::vector<Program> out;
    for (const auto& c : parts) out.push_back(c.kind() == NodeKind::Plus ? c.body() : c);
    return Program::make(p.kind(), {Program::sequence(std::move(out))});
  }
  return std::nullopt;
}

std::optional<Program> rewrite_local(const Program& p) {
  if (p.is_unary()) {
    if (auto r = rewrite_unary(p)) return r;
    if (auto r = loop_over_choice(p)) return r;
    if (auto r = loop_over_sequence(p)) return r;
    return std::nullopt;
  }
  if (auto r = flatten(p)) return r;
  if (auto r = hoist_choice_optional(p)) return r;
  return std::nullopt;
}

// Orders programs by their token text, kind as a tiebreaker.
bool token_less(const TokenStream& a, const TokenStream& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Token& x, const Token& y) {
                                        if (x.text != y.text) return x.text < y.text;
                                        return x.kind < y.kind;
                                      });
}

}  // namespace

Program simplify(const Program& p) {
  if (p.is_activity()) return p;
  std::vector<Program> children;
  children.reserve(p.children().size());
  for (const auto& c : p.children()) children.push_back(simplify(c));
  auto node = Program::make(p.kind(), std::move(children));
  // A rewrite may expose new redexes below the root, so the result is
  // simplified again; every rewrite shrinks the tree or pushes an operator
  // outward, so this terminates.
  if (auto r = rewrite_local(node)) return simplify(*r);
  return node;
}

Program canonicalize(const Program& p) {
  if (p.is_activity()) return p;
  std::vector<Program> children;
  children.reserve(p.children().size());
  for (const auto& c : p.children()) children.push_back(canonicalize(c));
  if (p.kind() == NodeKind::Choice || p.kind() == NodeKind::Parallel) {
    std::vector<std::pair<TokenStream, Program>> keyed;
    keyed.reserve(children.size());
    for (auto& c : children) keyed.emplace_back(tokenize(c), std::move(c));
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return token_less(a.first, b.first); });
    children.clear();
    for (auto& [_, c] : keyed) children.push_back(std::move(c));
  }
  return Program::make(p.kind(), std::move(children));
}

}  // namespace agglo
