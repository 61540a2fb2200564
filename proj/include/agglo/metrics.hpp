#pragma once

#include <string>
#include <vector>

#include "agglo/event_log.hpp"
#include "agglo/program.hpp"
#include "agglo/semantics.hpp"
#include "json.hpp"

namespace agglo {

// Automaton-based conformance scores. These are self-contained analogues of
// the usual Petri-net measures, comparable across miners within this tool
// but not numerically identical to other implementations.
struct MetricsReport {
  double fitness = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double generalization = 0.0;
  double simplicity = 0.0;
};

struct SynthesisReport {
  bool exact_match = false;
  std::size_t edit_distance = 0;
};

double f1_score(double fitness, double precision);

// Mean over traces of 1 - cost / max(|t|, shortest model trace).
double fitness(const EventLog& log, const Program& p);

// Escaping-edges precision over the subset construction of the model,
// replaying each trace's aligned repair.
double precision(const EventLog& log, const Program& p);

// 1 - mean over program leaves of 1/sqrt(times the leaf was used in replay).
double generalization(const EventLog& log, const Program& p);

// 1 / (1 + duplicate leaves + log activities missing from the program).
double simplicity(const Program& p, const EventLog& log);

// All five measures with a single replay of the log.
MetricsReport evaluate(const EventLog& log, const Program& p);

bool exact_match(const Program& p, const Program& truth);
std::size_t edit_distance(const Program& p, const Program& truth);
SynthesisReport compare_programs(const Program& p, const Program& truth);

// Token-level Levenshtein distance.
std::size_t levenshtein(const TokenStream& a, const TokenStream& b);

nlohmann::json to_json(const MetricsReport& r);
nlohmann::json to_json(const SynthesisReport& r);
std::string to_table(const MetricsReport& r);
std::string to_table(const SynthesisReport& r);

}  // namespace agglo
