#include "agglo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "agglo/error.hpp"

namespace agglo {

double f1_score(double fitness, double precision) {
  if (fitness + precision <= 0.0) return 0.0;
  return 2.0 * fitness * precision / (fitness + precision);
}

namespace {

std::map<Trace, std::size_t> count_traces(const EventLog& log) {
  if (log.empty()) throw EmptyLogError("metrics need a non-empty log");
  std::map<Trace, std::size_t> counts;
  for (const auto& t : log.traces()) ++counts[t];
  return counts;
}

struct Replay {
  double fitness = 0.0;
  double precision = 0.0;
  double generalization = 0.0;
};

Replay replay(const EventLog& log, const Program& p) {
  auto counts = count_traces(log);
  auto m = compile(p);
  SubsetView dfa(m);
  // visits and observed continuations per subset; kNoSymbol stands for
  // "trace ends here"
  std::map<SubsetView::Id, std::size_t> visits;
  std::map<SubsetView::Id, std::set<Matcher::Symbol>> observed;
  std::vector<std::size_t> uses(m.leaf_count(), 0);
  double fitness_sum = 0.0;

  for (const auto& [trace, n] : counts) {
    auto a = align(m, trace);
    auto denom = std::max(trace.size(), a.min_model_len);
    fitness_sum += static_cast<double>(n) *
                   (denom == 0 ? 1.0 : 1.0 - static_cast<double>(a.cost) / static_cast<double>(denom));
    for (auto leaf : a.leaves) uses[leaf] += n;
    SubsetView::Id at = dfa.initial();
    for (const auto& activity : a.repaired) {
      auto sym = m.symbol_of(activity);
      visits[at] += n;
      observed[at].insert(sym);
      SubsetView::Id next = 0;
      if (!dfa.step(at, sym, next)) throw InvariantError("repaired trace left the model");
      at = next;
    }
    if (!dfa.accepting(at)) throw InvariantError("repaired trace is not accepted");
    visits[at] += n;
    observed[at].insert(Matcher::kNoSymbol);
  }

  Replay r;
  r.fitness = fitness_sum / static_cast<double>(log.size());

  double seen = 0.0;
  double allowed = 0.0;
  for (const auto& [id, n] : visits) {
    auto enabled = dfa.enabled(id).size() + (dfa.accepting(id) ? 1 : 0);
    seen += static_cast<double>(n) * static_cast<double>(observed[id].size());
    allowed += static_cast<double>(n) * static_cast<double>(enabled);
  }
  r.precision = allowed > 0.0 ? seen / allowed : 1.0;

  double penalty = 0.0;
  for (auto u : uses) penalty += 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(u, 1)));
  r.generalization = uses.empty() ? 0.0 : 1.0 - penalty / static_cast<double>(uses.size());
  return r;
}

}  // namespace

double fitness(const EventLog& log, const Program& p) { return replay(log, p).fitness; }
double precision(const EventLog& log, const Program& p) { return replay(log, p).precision; }
double generalization(const EventLog& log, const Program& p) { return replay(log, p).generalization; }

double simplicity(const Program& p, const EventLog& log) {
  auto leaves = p.leaves();
  std::set<std::string> distinct(leaves.begin(), leaves.end());
  std::size_t duplicates = leaves.size() - distinct.size();
  std::size_t missing = 0;
  for (const auto& a : log.alphabet()) missing += distinct.count(a) ? 0 : 1;
  return 1.0 / (1.0 + static_cast<double>(duplicates + missing));
}

MetricsReport evaluate(const EventLog& log, const Program& p) {
  auto r = replay(log, p);
  MetricsReport out;
  out.fitness = r.fitness;
  out.precision = r.precision;
  out.f1 = f1_score(r.fitness, r.precision);
  out.generalization = r.generalization;
  out.simplicity = simplicity(p, log);
  return out;
}

bool exact_match(const Program& p, const Program& truth) {
  return canonicalize(simplify(p)) == canonicalize(simplify(truth));
}

std::size_t levenshtein(const TokenStream& a, const TokenStream& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t edit_distance(const Program& p, const Program& truth) {
  return levenshtein(tokenize(canonicalize(simplify(p))), tokenize(canonicalize(simplify(truth))));
}

SynthesisReport compare_programs(const Program& p, const Program& truth) {
  return {exact_match(p, truth), edit_distance(p, truth)};
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"fitness", r.fitness},
          {"precision", r.precision},
          {"f1", r.f1},
          {"generalization", r.generalization},
          {"simplicity", r.simplicity}};
}

nlohmann::json to_json(const SynthesisReport& r) {
  return {{"exact_match", r.exact_match}, {"edit_distance", r.edit_distance}};
}

std::string to_table(const MetricsReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(16) << "fitness" << std::right << std::setw(10) << r.fitness << '\n';
  out << std::left << std::setw(16) << "precision" << std::right << std::setw(10) << r.precision << '\n';
  out << std::left << std::setw(16) << "f1" << std::right << std::setw(10) << r.f1 << '\n';
  out << std::left << std::setw(16) << "generalization" << std::right << std::setw(10) << r.generalization
      << '\n';
  out << std::left << std::setw(16) << "simplicity" << std::right << std::setw(10) << r.simplicity << '\n';
  return out.str();
}

std::string to_table(const SynthesisReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "exact_match" << std::right << std::setw(10)
      << (r.exact_match ? "true" : "false") << '\n';
  out << std::left << std::setw(16) << "edit_distance" << std::right << std::setw(10) << r.edit_distance
      << '\n';
  return out.str();
}

}  // namespace agglo
