#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "agglo/event_log.hpp"
#include "agglo/program.hpp"

namespace agglo {

// Epsilon-free NFA for the trace language of a Program. Every transition
// remembers the preorder index of the program leaf that produced it, which
// lets replay attribute moves to leaves.
class Matcher {
 public:
  using State = std::uint32_t;
  using Symbol = std::uint32_t;
  static constexpr Symbol kNoSymbol = ~Symbol{0};
  static constexpr std::size_t kMaxStates = 1'000'000;

  struct Transition {
    Symbol symbol;
    State target;
    std::uint32_t leaf;
  };

  std::size_t state_count() const { return transitions_.size(); }
  State initial() const { return 0; }
  bool accepting(State s) const { return accepting_[s]; }
  std::span<const Transition> transitions(State s) const { return transitions_[s]; }

  std::size_t symbol_count() const { return symbols_.size(); }
  const std::string& symbol_name(Symbol s) const { return symbols_[s]; }
  // kNoSymbol when the activity does not occur in the program.
  Symbol symbol_of(const std::string& activity) const;
  std::size_t leaf_count() const { return leaf_count_; }

  // Length of the shortest accepted trace.
  std::size_t min_accepted_length() const { return min_len_; }

 private:
  friend Matcher compile(const Program& p);

  std::vector<std::vector<Transition>> transitions_;
  std::vector<bool> accepting_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> symbol_ids_;
  std::size_t leaf_count_ = 0;
  std::size_t min_len_ = 0;
};

// Thompson-style construction, epsilon-eliminated and trimmed. Parallel
// composition is the shuffle product of the parts' automata; more than
// Matcher::kMaxStates product states raises CapacityError.
Matcher compile(const Program& p);

bool accepts(const Matcher& m, const Trace& t);

inline constexpr std::size_t kMaxEnumerationLength = 16;
inline constexpr std::size_t kMaxEnumeratedTraces = 2'000'000;

// All accepted traces of length <= max_len.
std::set<Trace> enumerate_language(const Matcher& m, std::size_t max_len);

struct Alignment {
  // Minimum insert/delete/substitute edits turning the trace into an
  // accepted one.
  std::size_t cost = 0;
  std::size_t min_model_len = 0;
  // The accepted trace the optimal edit script ends in, and the program leaf
  // behind each of its steps.
  Trace repaired;
  std::vector<std::uint32_t> leaves;
};

Alignment align(const Matcher& m, const Trace& t);

// Deterministic view of a Matcher built lazily by subset construction.
class SubsetView {
 public:
  using StateSet = std::vector<Matcher::State>;
  using Id = std::uint32_t;

  explicit SubsetView(const Matcher& m);

  Id initial() const { return 0; }
  // Returns false when no transition on `symbol` exists.
  bool step(Id from, Matcher::Symbol symbol, Id& to);
  bool accepting(Id id) const { return accepting_[id]; }
  // Symbols enabled in the given subset, ascending.
  const std::vector<Matcher::Symbol>& enabled(Id id);
  const StateSet& states(Id id) const { return sets_[id]; }
  std::size_t size() const { return sets_.size(); }

 private:
  Id intern(StateSet set);

  const Matcher& m_;
  std::vector<StateSet> sets_;
  std::vector<bool> accepting_;
  std::vector<std::unordered_map<Matcher::Symbol, Id>> next_;
  std::vector<std::vector<Matcher::Symbol>> enabled_;
  std::vector<bool> enabled_ready_;
  std::map<StateSet, Id> index_;
};

}  // namespace agglo
