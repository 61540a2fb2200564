#include "agglo/dfg.hpp"

#include <sstream>
#include <unordered_map>

#include "agglo/error.hpp"

namespace agglo {

Dfg Dfg::build(const EventLog& expanded) {
  Dfg g;
  g.add_node(std::nullopt);  // Begin
  g.add_node(std::nullopt);  // End
  std::set<Activity> alphabet;
  for (const auto& trace : expanded.traces()) {
    if (trace.size() < 2 || trace.front() != kBegin || trace.back() != kEnd) {
      throw InvariantError("Dfg::build needs a sentinel-expanded log");
    }
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
      if (is_reserved(trace[i])) throw InvariantError("sentinel inside a trace");
      alphabet.insert(trace[i]);
    }
  }
  std::unordered_map<std::string, NodeId> ids{{std::string(kBegin), kBeginId},
                                              {std::string(kEnd), kEndId}};
  for (const auto& a : alphabet) ids.emplace(a, g.add_node(Program::activity(a)));
  for (const auto& trace : expanded.traces()) {
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
      g.add_edge(ids.at(trace[i]), ids.at(trace[i + 1]), 1);
    }
  }
  return g;
}

const Dfg::Node& Dfg::node(NodeId id) const {
  if (!contains(id)) throw InvariantError("no node with id " + std::to_string(id));
  return nodes_[id];
}

Dfg::Node& Dfg::node(NodeId id) {
  if (!contains(id)) throw InvariantError("no node with id " + std::to_string(id));
  return nodes_[id];
}

const Program& Dfg::label(NodeId id) const {
  const auto& n = node(id);
  if (!n.label) throw InvariantError("sentinel nodes carry no program");
  return *n.label;
}

std::string Dfg::display_label(NodeId id) const {
  if (id == kBeginId) return std::string(kBegin);
  if (id == kEndId) return std::string(kEnd);
  return to_expr(label(id));
}

bool Dfg::has_edge(NodeId from, NodeId to) const {
  return contains(from) && nodes_[from].out.count(to) > 0;
}

std::uint64_t Dfg::frequency(NodeId from, NodeId to) const {
  const auto& out = node(from).out;
  auto it = out.find(to);
  return it == out.end() ? 0 : it->second;
}

std::vector<NodeId> Dfg::node_ids() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].alive) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> Dfg::inner_node_ids() const {
  std::vector<NodeId> out;
  for (NodeId i = 2; i < nodes_.size(); ++i) {
    if (nodes_[i].alive) out.push_back(i);
  }
  return out;
}

NodeId Dfg::add_node(std::optional<Program> label) {
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{true, std::move(label), {}, {}});
  ++live_nodes_;
  return id;
}

void Dfg::add_edge(NodeId from, NodeId to, std::uint64_t count) {
  if (to == kBeginId || from == kEndId) throw InvariantError("edge into Begin or out of End");
  auto [it, inserted] = nodes_[from].out.try_emplace(to, 0);
  it->second += count;
  nodes_[to].in[from] += count;
  if (inserted) ++live_edges_;
}

NodeId Dfg::contract(NodeId u, NodeId v, Program label) {
  if (u == v) throw InvariantError("cannot contract a node with itself");
  if (is_sentinel(u) || is_sentinel(v)) throw InvariantError("cannot contract a sentinel node");
  Node nu = std::move(node(u));
  Node nv = std::move(node(v));
  // unlink both nodes
  for (const Node* n : {&nu, &nv}) {
    for (const auto& [to, _] : n->out) {
      if (to != u && to != v) nodes_[to].in.erase(n == &nu ? u : v);
    }
    for (const auto& [from, _] : n->in) {
      if (from != u && from != v) nodes_[from].out.erase(n == &nu ? u : v);
    }
    live_edges_ -= n->out.size();
  }
  // edges from u/v to one another were counted once each in `out`; edges
  // from outside into u/v were not yet subtracted
  live_edges_ -= (nu.in.size() - nu.in.count(u) - nu.in.count(v)) +
                 (nv.in.size() - nv.in.count(u) - nv.in.count(v));
  nodes_[u] = Node{};
  nodes_[v] = Node{};
  live_nodes_ -= 2;

  auto w = add_node(std::move(label));
  for (const Node* n : {&nu, &nv}) {
    for (const auto& [to, count] : n->out) {
      if (to != u && to != v) add_edge(w, to, count);
    }
    for (const auto& [from, count] : n->in) {
      if (from != u && from != v) add_edge(from, w, count);
    }
  }
  return w;
}

void Dfg::relabel(NodeId u, Program label) {
  if (is_sentinel(u)) throw InvariantError("cannot relabel a sentinel node");
  node(u).label = std::move(label);
}

void Dfg::delete_edge(NodeId from, NodeId to) {
  if (!has_edge(from, to)) {
    throw InvariantError("no edge " + std::to_string(from) + " -> " + std::to_string(to));
  }
  nodes_[from].out.erase(to);
  nodes_[to].in.erase(from);
  --live_edges_;
}

void Dfg::check_invariants() const {
  std::size_t edges = 0;
  std::size_t live = 0;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!n.alive) continue;
    ++live;
    if (is_sentinel(i) == n.label.has_value()) throw InvariantError("sentinel/label mismatch");
    for (const auto& [to, count] : n.out) {
      if (!contains(to)) throw InvariantError("edge to a dead node");
      auto it = nodes_[to].in.find(i);
      if (it == nodes_[to].in.end() || it->second != count) {
        throw InvariantError("forward and reverse adjacency disagree");
      }
      ++edges;
    }
    for (const auto& [from, _] : n.in) {
      if (!contains(from) || !nodes_[from].out.count(i)) {
        throw InvariantError("reverse edge without forward edge");
      }
    }
  }
  if (!nodes_[kBeginId].in.empty()) throw InvariantError("Begin has incoming edges");
  if (!nodes_[kEndId].out.empty()) throw InvariantError("End has outgoing edges");
  if (edges != live_edges_ || live != live_nodes_) throw InvariantError("stale node/edge counts");
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string Dfg::to_dot() const {
  std::ostringstream out;
  out << "digraph dfg {\n";
  out << "  rankdir=LR;\n";
  for (auto id : node_ids()) {
    out << "  n" << id << " [label=\"" << dot_escape(display_label(id)) << "\"";
    if (is_sentinel(id)) {
      out << ", shape=circle, style=filled, fillcolor=lightgray";
    } else {
      out << ", shape=box";
    }
    out << "];\n";
  }
  for (auto id : node_ids()) {
    for (const auto& [to, count] : nodes_[id].out) {
      out << "  n" << id << " -> n" << to << " [label=\"" << count << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

nlohmann::json Dfg::to_json() const {
  auto nodes = nlohmann::json::array();
  auto edges = nlohmann::json::array();
  for (auto id : node_ids()) {
    nodes.push_back({{"id", id}, {"label", display_label(id)}, {"sentinel", is_sentinel(id)}});
    for (const auto& [to, count] : nodes_[id].out) {
      edges.push_back({{"from", id}, {"to", to}, {"frequency", count}});
    }
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

}  // namespace agglo
