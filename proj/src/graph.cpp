#include "infocalc/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>

#include "infocalc/errors.hpp"

namespace infocalc {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::cycle: return "CycleError";
    case ErrorCode::unknown_node: return "UnknownNode";
    case ErrorCode::duplicate_node: return "DuplicateNode";
    case ErrorCode::unknown_edge: return "UnknownEdge";
    case ErrorCode::overlapping_sets: return "OverlappingSets";
    case ErrorCode::name_collision: return "NameCollision";
    case ErrorCode::partial_assignment: return "PartialAssignment";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::zero_probability_evidence: return "ZeroProbabilityEvidence";
    case ErrorCode::duplicate_edge_function: return "DuplicateEdgeFunction";
    case ErrorCode::latent_queried: return "LatentQueried";
    case ErrorCode::latent_intervention: return "LatentIntervention";
    case ErrorCode::non_markovian: return "NonMarkovian";
    case ErrorCode::size_error: return "SizeError";
    case ErrorCode::criterion_fails: return "CriterionFails";
    case ErrorCode::overlapping_info_nodes: return "OverlappingInfoNodes";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::unknown_theorem: return "UnknownTheorem";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::model_error: return "ModelError";
  }
  return "Error";
}

std::string to_string(const Edge& e) { return e.tail + "->" + e.head; }

namespace {

// Walks parent pointers of a DFS to report one cycle, tail first.
std::vector<std::string> find_cycle(const std::vector<std::string>& names,
                                    const std::vector<std::vector<std::size_t>>& children) {
  const std::size_t n = names.size();
  std::vector<int> color(n, 0);
  std::vector<std::size_t> parent(n, n);
  std::vector<std::string> cycle;
  std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
    color[v] = 1;
    for (std::size_t w : children[v]) {
      if (color[w] == 1) {
        cycle.push_back(names[w]);
        for (std::size_t x = v; x != w; x = parent[x]) cycle.push_back(names[x]);
        cycle.push_back(names[w]);
        std::reverse(cycle.begin(), cycle.end());
        return true;
      }
      if (color[w] == 0) {
        parent[w] = v;
        if (dfs(w)) return true;
      }
    }
    color[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (color[v] == 0 && dfs(v)) break;
  return cycle;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void require_disjoint(const NodeSet& a, const NodeSet& b, const char* what) {
  for (const auto& x : a)
    if (b.count(x)) throw Error(ErrorCode::overlapping_sets, std::string(what) + " share node " + x);
}

std::vector<char> mask_of(const Dag& dag, const NodeSet& set) {
  std::vector<char> mask(dag.size(), 0);
  for (const auto& name : set) mask[dag.index_of(name)] = 1;
  return mask;
}

}  // namespace

Dag Dag::build(std::vector<std::string> nodes, const std::vector<Edge>& edges,
               const std::vector<std::string>& latent) {
  Dag g;
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i] == nodes[i - 1]) throw Error(ErrorCode::duplicate_node, nodes[i]);
  g.names_ = std::move(nodes);
  for (std::size_t i = 0; i < g.names_.size(); ++i) g.index_.emplace(g.names_[i], i);
  for (const auto& e : edges) {
    if (!g.contains(e.tail)) throw Error(ErrorCode::unknown_node, e.tail + " in edge " + to_string(e));
    if (!g.contains(e.head)) throw Error(ErrorCode::unknown_node, e.head + " in edge " + to_string(e));
    g.edges_.insert(e);
  }
  for (const auto& l : latent) {
    if (!g.contains(l)) throw Error(ErrorCode::unknown_node, l + " marked latent");
    g.latent_.insert(l);
  }

  const std::size_t n = g.names_.size();
  g.parents_.assign(n, {});
  g.children_.assign(n, {});
  for (const auto& e : g.edges_) {
    const std::size_t t = g.index_.find(e.tail)->second;
    const std::size_t h = g.index_.find(e.head)->second;
    g.parents_[h].push_back(t);
    g.children_[t].push_back(h);
  }
  for (auto& v : g.parents_) std::sort(v.begin(), v.end());
  for (auto& v : g.children_) std::sort(v.begin(), v.end());

  std::vector<std::size_t> indegree(n);
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    indegree[v] = g.parents_[v].size();
    if (indegree[v] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    g.topo_.push_back(v);
    for (std::size_t w : g.children_[v])
      if (--indegree[w] == 0) ready.push(w);
  }
  if (g.topo_.size() != n)
    throw Error(ErrorCode::cycle, join(find_cycle(g.names_, g.children_), " -> "));
  return g;
}

NodeSet Dag::observed() const {
  NodeSet out;
  for (const auto& n : names_)
    if (!latent_.count(n)) out.insert(n);
  return out;
}

bool Dag::contains(const std::string& name) const { return index_.find(name) != index_.end(); }

std::size_t Dag::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::unknown_node, name);
  return it->second;
}

std::vector<std::string> Dag::topological_order() const {
  std::vector<std::string> out;
  out.reserve(topo_.size());
  for (std::size_t v : topo_) out.push_back(names_[v]);
  return out;
}

NodeSet Dag::parents(const std::string& name) const {
  NodeSet out;
  for (std::size_t p : parents_[index_of(name)]) out.insert(names_[p]);
  return out;
}

NodeSet Dag::children(const std::string& name) const {
  NodeSet out;
  for (std::size_t c : children_[index_of(name)]) out.insert(names_[c]);
  return out;
}

Dag Dag::with_edges(const std::set<Edge>& subset) const {
  // A subgraph of a DAG is acyclic, so the rebuild cannot fail on cycles.
  return build(names_, std::vector<Edge>(subset.begin(), subset.end()),
               std::vector<std::string>(latent_.begin(), latent_.end()));
}

void Dag::require_nodes(const NodeSet& set) const {
  for (const auto& n : set)
    if (!contains(n)) throw Error(ErrorCode::unknown_node, n);
}

NodeSet relatives(const Dag& dag, const NodeSet& seed, Relation kind) {
  dag.require_nodes(seed);
  NodeSet out;
  const bool upward = kind == Relation::parents || kind == Relation::ancestors;
  const bool transitive = kind == Relation::ancestors || kind == Relation::descendants;
  std::vector<char> seen(dag.size(), 0);
  std::deque<std::size_t> frontier;
  for (const auto& s : seed) frontier.push_back(dag.index_of(s));
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop_front();
    const auto& next = upward ? dag.parent_indices(v) : dag.child_indices(v);
    for (std::size_t w : next) {
      if (seen[w]) continue;
      seen[w] = 1;
      out.insert(dag.name(w));
      if (transitive) frontier.push_back(w);
    }
  }
  return out;
}

namespace {

enum Direction : int { up = 0, down = 1 };  // up: arrived from a child

struct TrailSearch {
  std::vector<std::size_t> pred;  // predecessor state, or npos
  std::vector<char> visited;
  std::size_t hit = static_cast<std::size_t>(-1);
};

// Reachability over (node, direction) states following the active-trail rules:
// chains and forks pass through unobserved nodes, colliders pass only when the
// collider is in d or has a descendant in d.
TrailSearch search_trails(const Dag& dag, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
  dag.require_nodes(b);
  dag.require_nodes(c);
  dag.require_nodes(d);
  require_disjoint(b, c, "separated sets");
  require_disjoint(b, d, "source and conditioning sets");
  require_disjoint(c, d, "target and conditioning sets");

  const std::size_t n = dag.size();
  const auto in_d = mask_of(dag, d);
  const auto in_c = mask_of(dag, c);
  std::vector<char> opens_collider = in_d;
  {
    std::deque<std::size_t> q;
    for (std::size_t v = 0; v < n; ++v)
      if (in_d[v]) q.push_back(v);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      for (std::size_t p : dag.parent_indices(v))
        if (!opens_collider[p]) {
          opens_collider[p] = 1;
          q.push_back(p);
        }
    }
  }

  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  TrailSearch s;
  s.pred.assign(2 * n, npos);
  s.visited.assign(2 * n, 0);
  std::deque<std::size_t> q;
  for (const auto& name : b) {
    const std::size_t state = 2 * dag.index_of(name) + up;
    s.visited[state] = 1;
    q.push_back(state);
  }
  auto push = [&](std::size_t from, std::size_t node, Direction dir) {
    const std::size_t state = 2 * node + dir;
    if (s.visited[state]) return;
    s.visited[state] = 1;
    s.pred[state] = from;
    q.push_back(state);
  };
  while (!q.empty()) {
    const std::size_t state = q.front();
    q.pop_front();
    const std::size_t v = state / 2;
    const auto dir = static_cast<Direction>(state % 2);
    if (in_c[v]) {
      s.hit = state;
      return s;
    }
    if (dir == up && !in_d[v]) {
      for (std::size_t p : dag.parent_indices(v)) push(state, p, up);
      for (std::size_t ch : dag.child_indices(v)) push(state, ch, down);
    } else if (dir == down) {
      if (!in_d[v])
        for (std::size_t ch : dag.child_indices(v)) push(state, ch, down);
      if (opens_collider[v])
        for (std::size_t p : dag.parent_indices(v)) push(state, p, up);
    }
  }
  return s;
}

}  // namespace

bool d_separated(const Dag& dag, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
  const auto s = search_trails(dag, b, c, d);
  return s.hit == static_cast<std::size_t>(-1);
}

std::optional<std::vector<std::string>> active_path(const Dag& dag, const NodeSet& b,
                                                    const NodeSet& c, const NodeSet& d) {
  const auto s = search_trails(dag, b, c, d);
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  if (s.hit == npos) return std::nullopt;
  std::vector<std::string> trail;
  for (std::size_t state = s.hit; state != npos; state = s.pred[state])
    trail.push_back(dag.name(state / 2));
  std::reverse(trail.begin(), trail.end());
  return trail;
}

bool has_directed_path(const Dag& dag, const NodeSet& from, const NodeSet& to) {
  dag.require_nodes(to);
  const NodeSet reach = relatives(dag, from, Relation::descendants);
  for (const auto& t : to)
    if (reach.count(t)) return true;
  return false;
}

Dag remove_incoming(const Dag& dag, const NodeSet& targets) {
  dag.require_nodes(targets);
  std::set<Edge> kept;
  for (const auto& e : dag.edges())
    if (!targets.count(e.head)) kept.insert(e);
  return dag.with_edges(kept);
}

Dag remove_outgoing(const Dag& dag, const NodeSet& sources) {
  dag.require_nodes(sources);
  std::set<Edge> kept;
  for (const auto& e : dag.edges())
    if (!sources.count(e.tail)) kept.insert(e);
  return dag.with_edges(kept);
}

std::string info_node_name(const Edge& e) { return "N__" + e.tail + "__" + e.head; }

const std::string& AugmentedDag::info_node(const Edge& e) const {
  auto it = info_nodes.find(e);
  if (it == info_nodes.end()) throw Error(ErrorCode::unknown_edge, to_string(e));
  return it->second;
}

AugmentedDag augment(const Dag& dag) { return intervention_augmented(dag, {}); }

AugmentedDag intervention_augmented(const Dag& dag, const std::map<Edge, bool>& constant_flags) {
  for (const auto& [e, constant] : constant_flags)
    if (!dag.edges().count(e)) throw Error(ErrorCode::unknown_edge, to_string(e));

  AugmentedDag out;
  out.base = dag;
  std::vector<std::string> nodes(dag.nodes().begin(), dag.nodes().end());
  std::vector<std::string> latent(dag.latent().begin(), dag.latent().end());
  std::vector<Edge> edges;
  for (const auto& e : dag.edges()) {
    std::string info = info_node_name(e);
    if (dag.contains(info))
      throw Error(ErrorCode::name_collision, "base node already named " + info);
    auto flag = constant_flags.find(e);
    const bool cut = flag != constant_flags.end() && flag->second;
    if (!cut) edges.push_back({e.tail, info});
    edges.push_back({info, e.head});
    // Information about an unobserved tail is itself unobserved.
    if (dag.is_latent(e.tail)) latent.push_back(info);
    nodes.push_back(info);
    out.info_nodes.emplace(e, std::move(info));
  }
  out.graph = Dag::build(std::move(nodes), edges, latent);
  return out;
}

}  // namespace infocalc
