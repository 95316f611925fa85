#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace infocalc {

using NodeSet = std::set<std::string>;

struct Edge {
  std::string tail;
  std::string head;

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

std::string to_string(const Edge& e);

enum class Relation { parents, children, ancestors, descendants };

// Immutable directed acyclic graph over named nodes. Nodes are kept in sorted
// order and every node has a stable index into that order; all adjacency lists
// are sorted by index so iteration is deterministic.
class Dag {
 public:
  Dag() = default;

  // Validates and builds. Throws duplicate_node, unknown_node or cycle.
  static Dag build(std::vector<std::string> nodes, const std::vector<Edge>& edges,
                   const std::vector<std::string>& latent = {});

  std::span<const std::string> nodes() const { return names_; }
  const std::set<Edge>& edges() const { return edges_; }
  const NodeSet& latent() const { return latent_; }
  NodeSet node_set() const { return NodeSet(names_.begin(), names_.end()); }
  NodeSet observed() const;

  std::size_t size() const { return names_.size(); }
  bool contains(const std::string& name) const;
  bool is_latent(const std::string& name) const { return latent_.count(name) > 0; }
  bool has_edge(const std::string& tail, const std::string& head) const {
    return edges_.count(Edge{tail, head}) > 0;
  }

  // Throws unknown_node.
  std::size_t index_of(const std::string& name) const;
  const std::string& name(std::size_t index) const { return names_[index]; }

  const std::vector<std::size_t>& parent_indices(std::size_t index) const { return parents_[index]; }
  const std::vector<std::size_t>& child_indices(std::size_t index) const { return children_[index]; }

  // Kahn's algorithm taking the lexicographically smallest ready node first.
  const std::vector<std::size_t>& topological_indices() const { return topo_; }
  std::vector<std::string> topological_order() const;

  NodeSet parents(const std::string& name) const;
  NodeSet children(const std::string& name) const;

  // Same node set and latent marking with a subset of the current edges.
  Dag with_edges(const std::set<Edge>& subset) const;

  void require_nodes(const NodeSet& set) const;

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.names_ == b.names_ && a.edges_ == b.edges_ && a.latent_ == b.latent_;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::set<Edge> edges_;
  NodeSet latent_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

NodeSet relatives(const Dag& dag, const NodeSet& seed, Relation kind);

// True iff every path between b and c is blocked by d. Empty b or c is
// trivially separated. Throws overlapping_sets / unknown_node.
bool d_separated(const Dag& dag, const NodeSet& b, const NodeSet& c, const NodeSet& d);

// A d-connecting trail from some node of b to some node of c given d, if one
// exists. Used to explain failed criteria.
std::optional<std::vector<std::string>> active_path(const Dag& dag, const NodeSet& b,
                                                    const NodeSet& c, const NodeSet& d);

bool has_directed_path(const Dag& dag, const NodeSet& from, const NodeSet& to);

Dag remove_incoming(const Dag& dag, const NodeSet& targets);
Dag remove_outgoing(const Dag& dag, const NodeSet& sources);

// Information node splice: every base edge i->j becomes i->N__i__j->j.
struct AugmentedDag {
  Dag base;
  std::map<Edge, std::string> info_nodes;
  Dag graph;

  const std::string& info_node(const Edge& e) const;
};

std::string info_node_name(const Edge& e);

AugmentedDag augment(const Dag& dag);

// augment(dag) with i->N_ij deleted for every (i,j) in `functions` whose flag
// is true (a constant information function). Throws unknown_edge.
AugmentedDag intervention_augmented(const Dag& dag, const std::map<Edge, bool>& constant_flags);

}  // namespace infocalc
