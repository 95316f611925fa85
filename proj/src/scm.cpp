#include "infocalc/scm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infocalc/errors.hpp"

namespace infocalc {

namespace {

std::size_t position(const std::vector<std::string>& values, const std::string& v) {
  auto it = std::find(values.begin(), values.end(), v);
  return it == values.end() ? values.size() : static_cast<std::size_t>(it - values.begin());
}

void for_each_tuple(const std::vector<const std::vector<std::string>*>& doms,
                    const std::function<void(const std::vector<std::string>&)>& visit) {
  std::vector<std::size_t> radix;
  for (const auto* d : doms) radix.push_back(d->size());
  std::vector<std::string> tuple(doms.size());
  for_each_state(radix, [&](const std::vector<std::size_t>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) tuple[i] = (*doms[i])[s[i]];
    visit(tuple);
  });
}

// Builds a table over `nodes` (in order) with the given domains.
struct TableBuilder {
  std::vector<std::string> nodes;
  std::vector<std::vector<std::string>> domains;
  std::vector<double> probs;

  TableBuilder(const Scm& scm, const NodeSet& keep) {
    std::size_t n = 1;
    for (const auto& v : keep) {
      nodes.push_back(v);
      domains.push_back(scm.domain(v));
      n *= domains.back().size();
    }
    probs.assign(n, 0.0);
  }

  void add(const Assignment& x, double p) {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) flat = flat * domains[i].size() + position(domains[i], x.at(nodes[i]));
    probs[flat] += p;
  }

  ProbTable finish() { return ProbTable(nodes, domains, std::move(probs)); }
};

}  // namespace

Scm Scm::build(Dag graph, const Domains& domains, const std::map<std::string, std::vector<double>>& exogenous,
               const std::vector<StructuralEquation>& equations, double tolerance) {
  Scm m;
  for (const auto& node : graph.nodes()) {
    auto it = domains.find(node);
    if (it == domains.end() || it->second.empty()) throw Error(ErrorCode::domain_error, "no domain for " + node);
    std::set<std::string> uniq(it->second.begin(), it->second.end());
    if (uniq.size() != it->second.size()) throw Error(ErrorCode::domain_error, "repeated value in domain of " + node);
    m.domains_[node] = it->second;
  }
  for (const auto& [node, d] : domains)
    if (!graph.contains(node)) throw Error(ErrorCode::unknown_node, node);

  for (const auto& [u, probs] : exogenous) {
    if (!graph.contains(u)) throw Error(ErrorCode::unknown_node, u);
    if (!graph.parents(u).empty()) throw Error(ErrorCode::model_error, "exogenous node " + u + " has parents");
    if (probs.size() != m.domains_[u].size())
      throw Error(ErrorCode::domain_error, "noise distribution of " + u + " does not match its domain");
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw Error(ErrorCode::domain_error, "negative noise probability for " + u);
      total += p;
    }
    if (std::abs(total - 1.0) > tolerance) throw Error(ErrorCode::domain_error, "noise distribution of " + u + " does not sum to 1");
    m.exogenous_.insert(u);
    m.noise_[u] = probs;
  }
  for (const auto& node : graph.nodes())
    if (!m.exogenous_.count(node)) m.endogenous_.insert(node);

  for (const auto& eq : equations) {
    if (!m.endogenous_.count(eq.node)) {
      if (!graph.contains(eq.node)) throw Error(ErrorCode::unknown_node, eq.node);
      throw Error(ErrorCode::model_error, "equation given for exogenous node " + eq.node);
    }
    if (m.equations_.count(eq.node)) throw Error(ErrorCode::model_error, "two equations for " + eq.node);
    NodeSet inputs(eq.inputs.begin(), eq.inputs.end());
    if (inputs.size() != eq.inputs.size() || inputs != graph.parents(eq.node))
      throw Error(ErrorCode::model_error, "inputs of " + eq.node + " differ from its parents in the graph");
    m.equations_[eq.node] = eq;
  }
  for (const auto& v : m.endogenous_)
    if (!m.equations_.count(v)) throw Error(ErrorCode::model_error, "no equation for " + v);

  m.graph_ = std::move(graph);
  for (const auto& eq : equations) m = m.with_table(eq.node, eq.table);
  for (const auto& v : m.graph_.topological_order())
    if (m.endogenous_.count(v)) m.order_.push_back(v);
  return m;
}

const std::vector<std::string>& Scm::domain(const std::string& node) const {
  auto it = domains_.find(node);
  if (it == domains_.end()) throw Error(ErrorCode::unknown_node, node);
  return it->second;
}

Dag Scm::endogenous_graph() const {
  std::vector<std::string> nodes(endogenous_.begin(), endogenous_.end());
  std::vector<Edge> edges;
  std::vector<std::string> latent;
  for (const auto& e : graph_.edges())
    if (endogenous_.count(e.tail)) edges.push_back(e);
  for (const auto& v : graph_.latent())
    if (endogenous_.count(v)) latent.push_back(v);
  return Dag::build(nodes, edges, latent);
}

Scm Scm::with_table(const std::string& node, std::map<std::vector<std::string>, std::string> table) const {
  auto it = equations_.find(node);
  if (it == equations_.end()) throw Error(ErrorCode::unknown_node, node);
  const auto& out_domain = domain(node);
  std::vector<const std::vector<std::string>*> doms;
  for (const auto& in : it->second.inputs) doms.push_back(&domain(in));
  std::size_t rows = 0;
  for_each_tuple(doms, [&](const std::vector<std::string>& t) {
    auto row = table.find(t);
    if (row == table.end()) throw Error(ErrorCode::domain_error, "equation of " + node + " has a missing row");
    if (position(out_domain, row->second) == out_domain.size())
      throw Error(ErrorCode::domain_error, "equation of " + node + " outputs " + row->second + " outside its domain");
    ++rows;
  });
  if (rows != table.size()) throw Error(ErrorCode::domain_error, "equation of " + node + " has rows outside the input domains");
  Scm copy = *this;
  copy.equations_[node].table = std::move(table);
  return copy;
}

namespace {

void require_total_noise(const Scm& scm, const Assignment& u) {
  for (const auto& x : scm.exogenous()) {
    auto it = u.find(x);
    if (it == u.end()) throw Error(ErrorCode::partial_assignment, "missing exogenous " + x);
    const auto& d = scm.domain(x);
    if (position(d, it->second) == d.size()) throw Error(ErrorCode::domain_error, it->second + " is not in the domain of " + x);
  }
}

// Solves the equations; `feed(input, consumer, value)` gives the value the
// consumer sees on that slot, `forced` overrides whole equations.
Assignment solve(const Scm& scm, const Assignment& u, const Assignment& forced,
                 const std::function<std::string(const std::string&, const std::string&, const std::string&)>& feed) {
  require_total_noise(scm, u);
  Assignment x = u;
  std::vector<std::string> key;
  for (const auto& v : scm.solve_order()) {
    if (auto f = forced.find(v); f != forced.end()) {
      x[v] = f->second;
      continue;
    }
    const auto& eq = scm.equation(v);
    key.clear();
    for (const auto& in : eq.inputs) key.push_back(feed ? feed(in, v, x.at(in)) : x.at(in));
    x[v] = eq.table.at(key);
  }
  Assignment out;
  for (const auto& v : scm.endogenous()) out[v] = x[v];
  return out;
}

void check_endogenous(const Scm& scm, const Assignment& a) {
  for (const auto& [node, value] : a) {
    if (!scm.endogenous().count(node)) throw Error(ErrorCode::unknown_node, node + " is not endogenous");
    const auto& d = scm.domain(node);
    if (position(d, value) == d.size()) throw Error(ErrorCode::domain_error, value + " is not in the domain of " + node);
  }
}

std::map<Edge, const InfoFunction*> index_functions(const Scm& scm, const std::vector<InfoFunction>& functions) {
  validate(InterventionSpec::generalized(functions), scm.graph(), &scm.domains());
  std::map<Edge, const InfoFunction*> out;
  for (const auto& f : functions) {
    if (!scm.endogenous().count(f.edge.tail))
      throw Error(ErrorCode::unknown_edge, to_string(f.edge) + " leaves an exogenous node");
    out[f.edge] = &f;
  }
  return out;
}

}  // namespace

Assignment evaluate(const Scm& scm, const Assignment& u) { return solve(scm, u, {}, nullptr); }

Assignment do_evaluate(const Scm& scm, const Assignment& u, const Assignment& forced) {
  check_endogenous(scm, forced);
  return solve(scm, u, forced, nullptr);
}

Assignment info_evaluate(const Scm& scm, const Assignment& u, const Assignment& sent) {
  check_endogenous(scm, sent);
  return solve(scm, u, {}, [&](const std::string& in, const std::string&, const std::string& value) {
    auto it = sent.find(in);
    return it == sent.end() ? value : it->second;
  });
}

Assignment generalized_info_evaluate(const Scm& scm, const Assignment& u, const std::vector<InfoFunction>& functions) {
  const auto fs = index_functions(scm, functions);
  return solve(scm, u, {}, [&](const std::string& in, const std::string& consumer, const std::string& value) {
    auto it = fs.find(Edge{in, consumer});
    return it == fs.end() ? value : it->second->apply(value);
  });
}

Assignment evaluate(const Scm& scm, const Assignment& u, const InterventionSpec& spec) {
  switch (spec.kind()) {
    case InterventionSpec::Kind::do_:
      return do_evaluate(scm, u, spec.assignment());
    case InterventionSpec::Kind::info:
      return info_evaluate(scm, u, spec.assignment());
    case InterventionSpec::Kind::generalized_info:
      return generalized_info_evaluate(scm, u, spec.functions());
  }
  throw Error(ErrorCode::model_error, "unknown intervention kind");
}

namespace {

// Rewrites every equation fed by a slot whose edge `remap` handles.
Scm rewrite_slots(const Scm& scm,
                  const std::function<const std::string*(const Edge&, const std::string&)>& remap) {
  Scm out = scm;
  for (const auto& v : scm.endogenous()) {
    const auto& eq = scm.equation(v);
    bool touched = false;
    for (const auto& in : eq.inputs)
      if (remap(Edge{in, v}, scm.domain(in).front())) touched = true;
    if (!touched) continue;
    std::map<std::vector<std::string>, std::string> table;
    for (const auto& [key, value] : eq.table) {
      std::vector<std::string> seen = key;
      for (std::size_t s = 0; s < key.size(); ++s)
        if (const std::string* r = remap(Edge{eq.inputs[s], v}, key[s])) seen[s] = *r;
      table[key] = eq.table.at(seen);
    }
    out = out.with_table(v, std::move(table));
  }
  return out;
}

}  // namespace

Scm info_intervened(const Scm& scm, const Assignment& sent) {
  check_endogenous(scm, sent);
  return rewrite_slots(scm, [&](const Edge& e, const std::string&) -> const std::string* {
    auto it = sent.find(e.tail);
    return it == sent.end() ? nullptr : &it->second;
  });
}

Scm generalized_intervened(const Scm& scm, const std::vector<InfoFunction>& functions) {
  const auto fs = index_functions(scm, functions);
  return rewrite_slots(scm, [&](const Edge& e, const std::string& value) -> const std::string* {
    auto it = fs.find(e);
    return it == fs.end() ? nullptr : &it->second->apply(value);
  });
}

Scm do_intervened(const Scm& scm, const Assignment& forced) {
  check_endogenous(scm, forced);
  Scm out = scm;
  for (const auto& [v, value] : forced) {
    auto table = scm.equation(v).table;
    for (auto& [key, out_value] : table) out_value = value;
    out = out.with_table(v, std::move(table));
  }
  return out;
}

void for_each_noise(const Scm& scm, const std::function<void(const Assignment&, double)>& visit) {
  std::vector<std::string> us(scm.exogenous().begin(), scm.exogenous().end());
  std::vector<std::size_t> radix;
  std::size_t states = 1;
  for (const auto& u : us) {
    radix.push_back(scm.domain(u).size());
    states *= radix.back();
    if (states > kMaxExogenousStates)
      throw Error(ErrorCode::size_error, "exogenous space exceeds " + std::to_string(kMaxExogenousStates) + " states");
  }
  Assignment a;
  for_each_state(radix, [&](const std::vector<std::size_t>& s) {
    double p = 1.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
      a[us[i]] = scm.domain(us[i])[s[i]];
      p *= scm.noise(us[i])[s[i]];
    }
    visit(a, p);
  });
}

FactoredDistribution induced_distribution(const Scm& scm) {
  const Dag& g = scm.graph();
  for (const auto& u : scm.exogenous())
    if (g.children(u).size() > 1) throw Error(ErrorCode::non_markovian, u + " feeds several endogenous nodes");

  Dag v_graph = scm.endogenous_graph();
  Domains doms;
  for (const auto& v : scm.endogenous()) doms[v] = scm.domain(v);
  std::vector<Cpt> cpts;
  for (const auto& v : scm.endogenous()) {
    const auto& eq = scm.equation(v);
    Cpt cpt{v, {}, {}};
    std::vector<std::string> noise_inputs;
    for (const auto& in : eq.inputs)
      (scm.exogenous().count(in) ? noise_inputs : cpt.parents).push_back(in);
    std::vector<const std::vector<std::string>*> pdoms, udoms;
    for (const auto& p : cpt.parents) pdoms.push_back(&scm.domain(p));
    for (const auto& u : noise_inputs) udoms.push_back(&scm.domain(u));
    const auto& out_domain = scm.domain(v);
    for_each_tuple(pdoms, [&](const std::vector<std::string>& pv) {
      std::vector<double> row(out_domain.size(), 0.0);
      for_each_tuple(udoms, [&](const std::vector<std::string>& uv) {
        double p = 1.0;
        Assignment slot;
        for (std::size_t i = 0; i < pv.size(); ++i) slot[cpt.parents[i]] = pv[i];
        for (std::size_t i = 0; i < uv.size(); ++i) {
          slot[noise_inputs[i]] = uv[i];
          p *= scm.noise(noise_inputs[i])[position(scm.domain(noise_inputs[i]), uv[i])];
        }
        std::vector<std::string> key;
        for (const auto& in : eq.inputs) key.push_back(slot.at(in));
        row[position(out_domain, eq.table.at(key))] += p;
      });
      cpt.rows[pv] = std::move(row);
    });
    cpts.push_back(std::move(cpt));
  }
  return FactoredDistribution::build(std::move(v_graph), doms, cpts, 1e-6);
}

ProbTable pushforward(const Scm& scm, const InterventionSpec& spec) {
  TableBuilder tb(scm, scm.endogenous());
  for_each_noise(scm, [&](const Assignment& u, double p) { tb.add(evaluate(scm, u, spec), p); });
  return tb.finish();
}

ProbTable pushforward(const Scm& scm) { return pushforward(scm, InterventionSpec::info({})); }

ProbTable counterfactual_query(const Scm& scm, const Assignment& evidence, const InterventionSpec& spec,
                               const NodeSet& target) {
  check_endogenous(scm, evidence);
  for (const auto& t : target)
    if (!scm.endogenous().count(t)) throw Error(ErrorCode::unknown_node, t + " is not endogenous");
  TableBuilder tb(scm, target);
  double mass = 0.0;
  for_each_noise(scm, [&](const Assignment& u, double p) {
    if (p == 0.0) return;
    const Assignment factual = evaluate(scm, u);
    for (const auto& [node, value] : evidence)
      if (factual.at(node) != value) return;
    mass += p;
    tb.add(evaluate(scm, u, spec), p);
  });
  if (mass < kZeroEvidence) throw Error(ErrorCode::zero_probability_evidence, "evidence " + to_string(evidence));
  for (double& p : tb.probs) p /= mass;
  return tb.finish();
}

}  // namespace infocalc
