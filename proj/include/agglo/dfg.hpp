#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agglo/event_log.hpp"
#include "agglo/program.hpp"
#include "json.hpp"

namespace agglo {

using NodeId = std::uint32_t;

// Directly-follows graph whose nodes carry program fragments. Node ids are
// stable and strictly increasing in creation order: Begin is 0, End is 1,
// activities follow in sorted name order, contracted nodes get fresh ids.
//
// Adjacency is kept forward and reverse; each edge carries the number of
// times the pair was observed (summed when nodes are contracted).
class Dfg {
 public:
  using Adjacency = std::map<NodeId, std::uint64_t>;

  static constexpr NodeId kBeginId = 0;
  static constexpr NodeId kEndId = 1;

  // `expanded` must be sentinel-expanded.
  static Dfg build(const EventLog& expanded);

  NodeId begin_node() const { return kBeginId; }
  NodeId end_node() const { return kEndId; }

  bool contains(NodeId id) const { return id < nodes_.size() && nodes_[id].alive; }
  bool is_sentinel(NodeId id) const { return id == kBeginId || id == kEndId; }
  const Program& label(NodeId id) const;
  // The sentinels have no program label; this gives "^" / "$" / the expr.
  std::string display_label(NodeId id) const;

  const Adjacency& successors(NodeId id) const { return node(id).out; }
  const Adjacency& predecessors(NodeId id) const { return node(id).in; }
  bool has_edge(NodeId from, NodeId to) const;
  std::uint64_t frequency(NodeId from, NodeId to) const;

  // Live ids, ascending.
  std::vector<NodeId> node_ids() const;
  // Live non-sentinel ids, ascending.
  std::vector<NodeId> inner_node_ids() const;
  std::size_t node_count() const { return live_nodes_; }
  std::size_t edge_count() const { return live_edges_; }

  // Merges u and v into a fresh node labelled `label`. Edges between u and v
  // (and self-loops) disappear; all other edges are redirected, frequencies
  // summed. Returns the new id.
  NodeId contract(NodeId u, NodeId v, Program label);
  void relabel(NodeId u, Program label);
  void delete_edge(NodeId from, NodeId to);

  std::string to_dot() const;
  nlohmann::json to_json() const;

  // Throws InvariantError if sentinel degree or adjacency symmetry is broken.
  void check_invariants() const;

 private:
  struct Node {
    bool alive = false;
    std::optional<Program> label;
    Adjacency out;
    Adjacency in;
  };

  const Node& node(NodeId id) const;
  Node& node(NodeId id);
  NodeId add_node(std::optional<Program> label);
  void add_edge(NodeId from, NodeId to, std::uint64_t count);

  std::vector<Node> nodes_;
  std::size_t live_nodes_ = 0;
  std::size_t live_edges_ = 0;
};

}  // namespace agglo
