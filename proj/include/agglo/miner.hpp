#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "agglo/dfg.hpp"
#include "agglo/event_log.hpp"
#include "agglo/program.hpp"
#include "json.hpp"

namespace agglo {

// Graph rewriting rules in the order the discovery phases apply them.
enum class RuleId : std::uint8_t {
  Iteration1,
  Sequence,
  Iteration2,
  Iteration3,
  Iteration4,
  Iteration5,
  Iteration6,
  Concurrence,
  Selection1,
  Selection2,
  FlowerFallback,
};

std::string_view rule_name(RuleId rule);

struct MineStep {
  RuleId rule;
  std::vector<NodeId> nodes;  // nodes the rule consumed or rewrote
  NodeId result;              // node holding the new label
  std::string label;          // expr form of the new label
  std::optional<std::pair<NodeId, NodeId>> removed_edge;

  friend bool operator==(const MineStep&, const MineStep&) = default;
};

struct MineTrace {
  std::vector<MineStep> steps;
  std::size_t initial_nodes = 0;
  std::size_t initial_edges = 0;
  bool empty_trace_wrap = false;

  // One JSON object per line.
  std::string to_json_lines() const;
  friend bool operator==(const MineTrace&, const MineTrace&) = default;
};

struct DiscoveryResult {
  Program program;
  MineTrace trace;
};

// Where a rule fires. For single-node rules `second` is unset; for
// Selection2 `skip_from`/`skip_to` name the bypass edge to delete.
struct MatchSite {
  RuleId rule;
  NodeId first;
  std::optional<NodeId> second;
  NodeId skip_from = 0;
  NodeId skip_to = 0;

  friend bool operator==(const MatchSite&, const MatchSite&) = default;
};

// Decides whether two nodes run concurrently by looking at the log: in
// every trace that touches either side, each side's activities must form
// exactly one contiguous block. Answers are cached per node pair.
class ConcurrencyOracle {
 public:
  explicit ConcurrencyOracle(const EventLog* log) : log_(log) {}
  bool concurrent(const Dfg& g, NodeId u, NodeId v);

 private:
  const EventLog* log_;
  std::map<std::pair<NodeId, NodeId>, bool> cache_;
};

// First match of `rule` scanning nodes in ascending id order. Without an
// oracle, Concurrence never matches and Iteration6 ignores the log.
std::optional<MatchSite> match_rule(const Dfg& g, RuleId rule, ConcurrencyOracle* oracle = nullptr);

// Performs the rewrite described by `site`, returning the step record.
MineStep apply_rule(Dfg& g, const MatchSite& site);

// ((S1|...|Sk)+) over the given fragments, in canonical order.
Program flower(std::vector<Program> parts);
// Flower model over an alphabet; wrapped in (...?) when `allow_empty`.
Program flower_model(const std::set<Activity>& alphabet, bool allow_empty);

// Agglomerative discovery. Throws EmptyLogError on an empty log and
// InputError when every trace is empty.
DiscoveryResult discover(const EventLog& log);

}  // namespace agglo
