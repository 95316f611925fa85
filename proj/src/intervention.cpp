#include "infocalc/intervention.hpp"

#include <algorithm>
#include <optional>

#include "infocalc/errors.hpp"

namespace infocalc {

bool InfoFunction::is_constant() const {
  std::set<std::string> images;
  for (const auto& [in, out] : map) images.insert(out);
  return images.size() == 1;
}

const std::string& InfoFunction::apply(const std::string& value) const {
  auto it = map.find(value);
  if (it == map.end())
    throw Error(ErrorCode::domain_error, "information function on " + to_string(edge) + " has no image for " + value);
  return it->second;
}

InfoFunction InfoFunction::constant(Edge edge, const std::vector<std::string>& domain, const std::string& value) {
  InfoFunction f{std::move(edge), {}, {}};
  for (const auto& v : domain) f.map[v] = value;
  return f;
}

InfoFunction InfoFunction::identity(Edge edge, const std::vector<std::string>& domain) {
  InfoFunction f{std::move(edge), {}, {}};
  for (const auto& v : domain) f.map[v] = v;
  return f;
}

void validate(const InfoFunction& f, const std::vector<std::string>& domain) {
  const std::set<std::string> allowed(domain.begin(), domain.end());
  for (const auto& v : domain)
    if (!f.map.count(v))
      throw Error(ErrorCode::domain_error, "information function on " + to_string(f.edge) + " is not total: missing " + v);
  for (const auto& [in, out] : f.map) {
    if (!allowed.count(in))
      throw Error(ErrorCode::domain_error, "information function on " + to_string(f.edge) + " maps unknown value " + in);
    if (!allowed.count(out))
      throw Error(ErrorCode::domain_error,
                  "information function on " + to_string(f.edge) + " sends " + in + " outside the domain: " + out);
  }
}

InterventionSpec InterventionSpec::do_(Assignment assignment) {
  InterventionSpec s;
  s.kind_ = Kind::do_;
  s.assignment_ = std::move(assignment);
  return s;
}

InterventionSpec InterventionSpec::info(Assignment assignment) {
  InterventionSpec s;
  s.kind_ = Kind::info;
  s.assignment_ = std::move(assignment);
  return s;
}

InterventionSpec InterventionSpec::generalized(std::vector<InfoFunction> functions) {
  InterventionSpec s;
  s.kind_ = Kind::generalized_info;
  std::sort(functions.begin(), functions.end(),
            [](const InfoFunction& a, const InfoFunction& b) { return a.edge < b.edge; });
  s.functions_ = std::move(functions);
  return s;
}

NodeSet InterventionSpec::sources() const {
  NodeSet out;
  if (kind_ == Kind::generalized_info) {
    for (const auto& f : functions_) out.insert(f.edge.tail);
  } else {
    for (const auto& [node, value] : assignment_) out.insert(node);
  }
  return out;
}

InterventionSpec InterventionSpec::as_generalized(const Dag& dag, const Domains& domains) const {
  if (kind_ == Kind::generalized_info) return *this;
  if (kind_ == Kind::do_) throw Error(ErrorCode::model_error, "a do intervention has no information-function form");
  std::vector<InfoFunction> fs;
  for (const auto& [node, value] : assignment_) {
    auto dom = domains.find(node);
    if (dom == domains.end()) throw Error(ErrorCode::unknown_node, node);
    for (const auto& child : dag.children(node)) fs.push_back(InfoFunction::constant({node, child}, dom->second, value));
  }
  return generalized(std::move(fs));
}

void validate(const InterventionSpec& spec, const Dag& dag, const Domains* domains) {
  if (spec.kind() == InterventionSpec::Kind::generalized_info) {
    std::set<Edge> seen;
    for (const auto& f : spec.functions()) {
      if (!dag.contains(f.edge.tail)) throw Error(ErrorCode::unknown_node, f.edge.tail);
      if (!dag.contains(f.edge.head)) throw Error(ErrorCode::unknown_node, f.edge.head);
      if (!dag.has_edge(f.edge.tail, f.edge.head)) throw Error(ErrorCode::unknown_edge, to_string(f.edge));
      if (!seen.insert(f.edge).second) throw Error(ErrorCode::duplicate_edge_function, to_string(f.edge));
      if (dag.is_latent(f.edge.tail))
        throw Error(ErrorCode::latent_intervention, "information function on edge out of latent " + f.edge.tail);
      if (domains) validate(f, domains->at(f.edge.tail));
    }
    return;
  }
  for (const auto& [node, value] : spec.assignment()) {
    if (!dag.contains(node)) throw Error(ErrorCode::unknown_node, node);
    if (dag.is_latent(node)) throw Error(ErrorCode::latent_intervention, node);
    if (domains) {
      const auto& dom = domains->at(node);
      if (std::find(dom.begin(), dom.end(), value) == dom.end())
        throw Error(ErrorCode::domain_error, value + " is not in the domain of " + node);
    }
  }
}

namespace {

// How each parent slot of each node is fed. Indexed [node][slot]: nullopt reads
// the parent's own value, otherwise a value-index remap of the parent's value.
using SlotMaps = std::vector<std::vector<std::optional<std::vector<std::size_t>>>>;

SlotMaps plain_slots(const Dag& g) {
  SlotMaps out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out[k].resize(g.parent_indices(k).size());
  return out;
}

SlotMaps sent_slots(const FactoredDistribution& fd, const Assignment& sent) {
  const Dag& g = fd.dag();
  SlotMaps out = plain_slots(g);
  for (const auto& [node, value] : sent) {
    const std::size_t j = g.index_of(node);
    const std::size_t v = fd.value_index(j, value);
    for (std::size_t k : g.child_indices(j)) {
      const auto& ps = g.parent_indices(k);
      const std::size_t slot = std::find(ps.begin(), ps.end(), j) - ps.begin();
      out[k][slot] = std::vector<std::size_t>(fd.domain(j).size(), v);
    }
  }
  return out;
}

SlotMaps function_slots(const FactoredDistribution& fd, const std::vector<InfoFunction>& functions) {
  const Dag& g = fd.dag();
  validate(InterventionSpec::generalized(functions), g, nullptr);
  SlotMaps out = plain_slots(g);
  for (const auto& f : functions) {
    const std::size_t j = g.index_of(f.edge.tail);
    const std::size_t k = g.index_of(f.edge.head);
    validate(f, fd.domain(j));
    std::vector<std::size_t> remap;
    for (const auto& v : fd.domain(j)) remap.push_back(fd.value_index(j, f.apply(v)));
    const auto& ps = g.parent_indices(k);
    out[k][std::find(ps.begin(), ps.end(), j) - ps.begin()] = std::move(remap);
  }
  return out;
}

// Graph-order product of factors. `forced[k]` replaces factor k by an indicator.
double product(const FactoredDistribution& fd, const SlotMaps& slots,
               const std::vector<std::optional<std::size_t>>& forced, const std::vector<std::size_t>& state) {
  const Dag& g = fd.dag();
  double p = 1.0;
  std::vector<std::size_t> pv;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (forced[k]) {
      p *= state[k] == *forced[k] ? 1.0 : 0.0;
      continue;
    }
    pv.clear();
    const auto& ps = g.parent_indices(k);
    for (std::size_t s = 0; s < ps.size(); ++s) {
      const std::size_t x = state[ps[s]];
      pv.push_back(slots[k][s] ? (*slots[k][s])[x] : x);
    }
    p *= fd.factor(k, state[k], pv);
  }
  return p;
}

ProbTable tabulate(const FactoredDistribution& fd, const SlotMaps& slots,
                   const std::vector<std::optional<std::size_t>>& forced) {
  std::vector<double> probs;
  for_each_state(domain_sizes(fd), [&](const std::vector<std::size_t>& s) { probs.push_back(product(fd, slots, forced, s)); });
  const auto nodes = fd.dag().nodes();
  std::vector<std::vector<std::string>> doms;
  for (std::size_t v = 0; v < fd.dag().size(); ++v) doms.push_back(fd.domain(v));
  return ProbTable(std::vector<std::string>(nodes.begin(), nodes.end()), std::move(doms), std::move(probs));
}

std::vector<std::optional<std::size_t>> no_forcing(const Dag& g) { return std::vector<std::optional<std::size_t>>(g.size()); }

void check_assignment(const FactoredDistribution& fd, const Assignment& a) {
  for (const auto& [node, value] : a) fd.value_index(fd.dag().index_of(node), value);
}

}  // namespace

ProbTable do_distribution(const FactoredDistribution& fd, const Assignment& forced) {
  check_assignment(fd, forced);
  auto f = no_forcing(fd.dag());
  for (const auto& [node, value] : forced) {
    const std::size_t j = fd.dag().index_of(node);
    f[j] = fd.value_index(j, value);
  }
  return tabulate(fd, plain_slots(fd.dag()), f);
}

ProbTable info_distribution(const FactoredDistribution& fd, const Assignment& sent) {
  check_assignment(fd, sent);
  return tabulate(fd, sent_slots(fd, sent), no_forcing(fd.dag()));
}

ProbTable generalized_info_distribution(const FactoredDistribution& fd, const std::vector<InfoFunction>& functions) {
  return tabulate(fd, function_slots(fd, functions), no_forcing(fd.dag()));
}

ProbTable intervention_distribution(const FactoredDistribution& fd, const InterventionSpec& spec) {
  switch (spec.kind()) {
    case InterventionSpec::Kind::do_:
      return do_distribution(fd, spec.assignment());
    case InterventionSpec::Kind::info:
      return info_distribution(fd, spec.assignment());
    case InterventionSpec::Kind::generalized_info:
      return generalized_info_distribution(fd, spec.functions());
  }
  throw Error(ErrorCode::model_error, "unknown intervention kind");
}

double info_probability(const FactoredDistribution& fd, const Assignment& sent, const std::vector<std::size_t>& x) {
  check_assignment(fd, sent);
  if (x.size() != fd.dag().size()) throw Error(ErrorCode::partial_assignment, "state size mismatch");
  return product(fd, sent_slots(fd, sent), no_forcing(fd.dag()), x);
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ",";
    out += p;
  }
  return out;
}

}  // namespace

InterventionGraph intervention_graph(const Dag& dag, const InterventionSpec& spec) {
  validate(spec, dag, nullptr);
  InterventionGraph out;
  switch (spec.kind()) {
    case InterventionSpec::Kind::do_:
      out.dag = remove_incoming(dag, spec.sources());
      out.forced = spec.assignment();
      break;
    case InterventionSpec::Kind::info: {
      out.dag = remove_outgoing(dag, spec.sources());
      for (const auto& node : relatives(dag, spec.sources(), Relation::descendants)) {
        std::vector<std::string> parts;
        for (const auto& [a, value] : spec.assignment())
          if (a != node && relatives(dag, {a}, Relation::descendants).count(node)) parts.push_back(a + "=" + value);
        out.counterfactual_labels[node] = "X_" + node + "^{sigma(" + join(parts) + ")}";
      }
      break;
    }
    case InterventionSpec::Kind::generalized_info: {
      std::set<Edge> kept = dag.edges();
      for (const auto& f : spec.functions()) {
        if (f.is_constant()) {
          kept.erase(f.edge);
        } else {
          out.info_edges.insert(f.edge);
          out.info_edge_labels[f.edge] = "sigma_" + f.edge.tail + f.edge.head;
        }
      }
      out.dag = dag.with_edges(kept);
      for (const auto& node : dag.nodes()) {
        std::vector<std::string> parts;
        for (const auto& f : spec.functions())
          if (node == f.edge.head || relatives(dag, {f.edge.head}, Relation::descendants).count(node))
            parts.push_back(f.edge.tail + "->" + f.edge.head);
        if (!parts.empty()) out.counterfactual_labels[node] = "X_" + node + "^{sigma(" + join(parts) + ")}";
      }
      break;
    }
  }
  return out;
}

ProbTable intervention_query(const FactoredDistribution& fd, const InterventionSpec& spec, const NodeSet& target,
                             const Assignment& given) {
  const Dag& g = fd.dag();
  g.require_nodes(target);
  for (const auto& [node, value] : given) g.index_of(node);
  for (const auto& node : target)
    if (g.is_latent(node)) throw Error(ErrorCode::latent_queried, node);
  for (const auto& [node, value] : given)
    if (g.is_latent(node)) throw Error(ErrorCode::latent_queried, node);
  const Domains doms = fd.domains();
  validate(spec, g, &doms);
  return intervention_distribution(fd, spec).conditional(target, given);
}

}  // namespace infocalc
