#include "infocalc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "infocalc/calculus.hpp"
#include "infocalc/errors.hpp"
#include "infocalc/expression.hpp"
#include "infocalc/intervention.hpp"

namespace infocalc {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::config_error, "empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do x = engine_();
  while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate(const InstanceConfig& cfg) {
  if (cfg.n_nodes < 1 || cfg.n_nodes > 8) throw Error(ErrorCode::config_error, "n_nodes must be in 1..8");
  if (cfg.max_domain < 1 || cfg.max_domain > 4) throw Error(ErrorCode::config_error, "max_domain must be in 1..4");
  if (!(cfg.edge_prob >= 0.0 && cfg.edge_prob <= 1.0)) throw Error(ErrorCode::config_error, "edge_prob must be in [0,1]");
  if (!(cfg.latent_prob >= 0.0 && cfg.latent_prob <= 1.0))
    throw Error(ErrorCode::config_error, "latent_prob must be in [0,1]");
}

namespace {

std::vector<std::string> values(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(std::to_string(i));
  return out;
}

std::size_t domain_size(std::size_t max_domain, Rng& rng) {
  return max_domain < 2 ? max_domain : 2 + rng.below(max_domain - 1);
}

std::vector<double> random_row(std::size_t k, Rng& rng) {
  std::vector<double> row(k);
  double total = 0.0;
  for (auto& p : row) {
    p = 1.0 - rng.uniform();
    total += p;
  }
  for (auto& p : row) p /= total;
  return row;
}

Dag random_dag(const InstanceConfig& cfg, Rng& rng, const std::string& prefix) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) names.push_back(prefix + std::to_string(i));
  std::vector<std::size_t> order(cfg.n_nodes);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (rng.bernoulli(cfg.edge_prob)) edges.push_back({names[order[i]], names[order[j]]});
  std::vector<std::string> latent;
  for (const auto& n : names)
    if (rng.bernoulli(cfg.latent_prob)) latent.push_back(n);
  return Dag::build(names, edges, latent);
}

std::vector<std::vector<std::string>> tuples(const std::vector<const std::vector<std::string>*>& doms) {
  std::vector<std::size_t> radix;
  for (const auto* d : doms) radix.push_back(d->size());
  std::vector<std::vector<std::string>> out;
  for_each_state(radix, [&](const std::vector<std::size_t>& s) {
    std::vector<std::string> t;
    for (std::size_t i = 0; i < s.size(); ++i) t.push_back((*doms[i])[s[i]]);
    out.push_back(std::move(t));
  });
  return out;
}

}  // namespace

Domains random_domains(const Dag& dag, std::size_t max_domain, Rng& rng) {
  Domains out;
  for (const auto& n : dag.nodes()) out[n] = values(domain_size(max_domain, rng));
  return out;
}

FactoredDistribution random_parameters(const Dag& dag, const Domains& domains, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Cpt> cpts;
  for (const auto& n : dag.nodes()) {
    Cpt cpt{n, {}, {}};
    std::vector<const std::vector<std::string>*> pdoms;
    for (const auto& p : dag.parents(n)) {
      cpt.parents.push_back(p);
      pdoms.push_back(&domains.at(p));
    }
    for (auto& t : tuples(pdoms)) cpt.rows[t] = random_row(domains.at(n).size(), rng);
    cpts.push_back(std::move(cpt));
  }
  return FactoredDistribution::build(dag, domains, cpts);
}

FactoredDistribution random_instance(const InstanceConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  Dag dag = random_dag(cfg, rng, "X");
  Domains domains = random_domains(dag, cfg.max_domain, rng);
  return random_parameters(dag, domains, rng.next());
}

Scm random_scm(const InstanceConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  InstanceConfig plain = cfg;
  plain.latent_prob = 0.0;
  const Dag v = random_dag(plain, rng, "X");
  std::vector<std::string> nodes(v.nodes().begin(), v.nodes().end());
  std::vector<Edge> edges(v.edges().begin(), v.edges().end());
  Domains domains;
  std::map<std::string, std::vector<double>> noise;
  for (const auto& x : v.nodes()) {
    const std::string u = "U_" + x;
    nodes.push_back(u);
    edges.push_back({u, x});
    domains[x] = values(domain_size(cfg.max_domain, rng));
    domains[u] = values(domain_size(cfg.max_domain, rng));
    noise[u] = random_row(domains[u].size(), rng);
  }
  std::vector<std::string> latent;
  for (const auto& x : v.nodes())
    if (rng.bernoulli(cfg.latent_prob)) latent.push_back(x);
  Dag g = Dag::build(nodes, edges, latent);
  std::vector<StructuralEquation> eqs;
  for (const auto& x : v.nodes()) {
    StructuralEquation eq{x, {}, {}};
    std::vector<const std::vector<std::string>*> doms;
    for (const auto& p : g.parents(x)) {
      eq.inputs.push_back(p);
      doms.push_back(&domains.at(p));
    }
    const auto& out = domains.at(x);
    for (auto& t : tuples(doms)) eq.table[t] = out[rng.below(out.size())];
    eqs.push_back(std::move(eq));
  }
  return Scm::build(std::move(g), domains, noise, eqs);
}

namespace {

double max_diff(const ProbTable& a, const ProbTable& b) {
  if (a.nodes() != b.nodes() || a.size() != b.size()) throw Error(ErrorCode::model_error, "table shapes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.at_index(i) - b.at_index(i)));
  return d;
}

std::vector<Assignment> all_assignments(const Domains& domains, const NodeSet& nodes) {
  std::vector<std::string> ns(nodes.begin(), nodes.end());
  std::vector<const std::vector<std::string>*> doms;
  for (const auto& n : ns) doms.push_back(&domains.at(n));
  std::vector<Assignment> out;
  for (const auto& t : tuples(doms)) {
    Assignment a;
    for (std::size_t i = 0; i < ns.size(); ++i) a[ns[i]] = t[i];
    out.push_back(std::move(a));
  }
  return out;
}

Assignment random_values(const Domains& domains, const NodeSet& nodes, Rng& rng) {
  Assignment a;
  for (const auto& n : nodes) {
    const auto& d = domains.at(n);
    a[n] = d[rng.below(d.size())];
  }
  return a;
}

Assignment merge(Assignment a, const Assignment& b) {
  a.insert(b.begin(), b.end());
  return a;
}

// Disjoint random sets from `pool`; the first `required` sets are nonempty.
// Returns false if the pool is too small.
bool sample_sets(const NodeSet& pool, std::size_t count, std::size_t required, Rng& rng, std::vector<NodeSet>& out) {
  std::vector<std::string> nodes(pool.begin(), pool.end());
  if (nodes.size() < required) return false;
  for (std::size_t i = nodes.size(); i > 1; --i) std::swap(nodes[i - 1], nodes[rng.below(i)]);
  out.assign(count, {});
  std::size_t next = 0;
  for (; next < required; ++next) out[next].insert(nodes[next]);
  for (; next < nodes.size(); ++next) {
    const std::size_t role = rng.below(count + 1);
    if (role < count) out[role].insert(nodes[next]);
  }
  return true;
}

TrialRecord skipped(const std::string& why) { return {0, false, 0.0, why}; }

using Suite = std::function<TrialRecord(const InstanceConfig&)>;

TrialRecord do_info_equivalence(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().observed(), 3, 2, rng, s)) return skipped("too few observed nodes");
  const Domains doms = fd.domains();
  const Assignment a = random_values(doms, s[0], rng);
  const Assignment c = random_values(doms, s[2], rng);
  const auto p_do = intervention_query(fd, InterventionSpec::do_(a), s[1], c);
  const auto p_info = intervention_query(fd, InterventionSpec::info(a), s[1], c);
  return {0, true, max_diff(p_do, p_info), {}};
}

TrialRecord factual_joint(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().node_set(), 1, 1, rng, s)) return skipped("empty graph");
  double dev = 0.0;
  const auto nodes = fd.dag().nodes();
  for_each_state(domain_sizes(fd), [&](const std::vector<std::size_t>& x) {
    Assignment total, sent;
    for (std::size_t i = 0; i < x.size(); ++i) total[nodes[i]] = fd.domain(i)[x[i]];
    for (const auto& a : s[0]) sent[a] = total[a];
    dev = std::max(dev, std::abs(info_probability(fd, sent, x) - joint(fd, total)));
  });
  return {0, true, dev, {}};
}

TrialRecord factual_marginal(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().node_set(), 2, 1, rng, s)) return skipped("empty graph");
  const Domains doms = fd.domains();
  const ProbTable obs = joint_table(fd);
  double dev = 0.0;
  for (const auto& xa : all_assignments(doms, s[0])) {
    const ProbTable info = info_distribution(fd, xa);
    for (const auto& xb : all_assignments(doms, s[1])) {
      const Assignment ab = merge(xa, xb);
      dev = std::max(dev, std::abs(info.probability(ab) - obs.probability(ab)));
    }
  }
  return {0, true, dev, {}};
}

TrialRecord factual_conditional(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().node_set(), 2, 2, rng, s)) return skipped("too few nodes");
  double dev = 0.0;
  for (const auto& xa : all_assignments(fd.domains(), s[0])) {
    const ProbTable info = info_distribution(fd, xa).conditional(s[1], xa);
    dev = std::max(dev, max_diff(info, conditional(fd, s[1], xa)));
  }
  return {0, true, dev, {}};
}

TrialRecord factual_stacked(const InstanceConfig& cfg, bool conditional_form) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().node_set(), 3, 3, rng, s)) return skipped("too few nodes");
  const Domains doms = fd.domains();
  const Assignment xc = random_values(doms, s[2], rng);
  const ProbTable only_c = info_distribution(fd, xc);
  double dev = 0.0;
  for (const auto& xa : all_assignments(doms, s[0])) {
    const ProbTable both = info_distribution(fd, merge(xa, xc));
    if (conditional_form) {
      dev = std::max(dev, max_diff(both.conditional(s[1], xa), only_c.conditional(s[1], xa)));
    } else {
      for (const auto& xb : all_assignments(doms, s[1])) {
        const Assignment ab = merge(xa, xb);
        dev = std::max(dev, std::abs(both.probability(ab) - only_c.probability(ab)));
      }
    }
  }
  return {0, true, dev, {}};
}

Dag backdoor_topology() { return Dag::build({"A", "B", "C"}, {{"C", "A"}, {"C", "B"}, {"A", "B"}}); }
Dag frontdoor_topology() {
  return Dag::build({"A", "B", "C", "D"}, {{"D", "A"}, {"D", "B"}, {"A", "C"}, {"C", "B"}}, {"D"});
}

TrialRecord backdoor_suite(const InstanceConfig& cfg) {
  Rng rng(cfg.seed);
  const Dag g = backdoor_topology();
  const Domains doms = random_domains(g, cfg.max_domain, rng);
  const auto fd = random_parameters(g, doms, rng.next());
  const Assignment a = random_values(doms, {"A"}, rng);
  Evaluator ev(fd);
  const ProbTable expr = ev.tabulate(backdoor_adjust(g, a, {"B"}, {"C"}));
  return {0, true, max_diff(expr, intervention_query(fd, InterventionSpec::info(a), {"B"}, {})), {}};
}

TrialRecord frontdoor_suite(const InstanceConfig& cfg) {
  Rng rng(cfg.seed);
  const Dag g = frontdoor_topology();
  const Domains doms = random_domains(g, cfg.max_domain, rng);
  const auto fd = random_parameters(g, doms, rng.next());
  const Assignment a = random_values(doms, {"A"}, rng);
  Evaluator ev(fd);
  const ProbTable expr = ev.tabulate(frontdoor_adjust(g, a, {"B"}, {"C"}));
  return {0, true, max_diff(expr, intervention_query(fd, InterventionSpec::info(a), {"B"}, {})), {}};
}

// Compares two query families over every evidence assignment of `vary`.
template <typename Lhs, typename Rhs>
double sweep(const Domains& doms, const NodeSet& vary, Lhs lhs, Rhs rhs) {
  double dev = 0.0;
  for (const auto& v : all_assignments(doms, vary)) dev = std::max(dev, max_diff(lhs(v), rhs(v)));
  return dev;
}

Assignment restrict(const Assignment& a, const NodeSet& keep) {
  Assignment out;
  for (const auto& [k, v] : a)
    if (keep.count(k)) out[k] = v;
  return out;
}

TrialRecord rule_suite(const InstanceConfig& cfg, Rule rule) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().observed(), 4, 3, rng, s)) return skipped("too few observed nodes");
  const NodeSet &b = s[0], &a = s[1], &c = s[2], &d = s[3];
  if (!check_rule(fd.dag(), rule, a, b, c, d)) return skipped("condition fails");
  const Domains doms = fd.domains();
  const Assignment xa = random_values(doms, a, rng);
  NodeSet cd = c;
  cd.insert(d.begin(), d.end());
  double dev = 0.0;
  switch (rule) {
    case Rule::observation:
      dev = sweep(doms, cd,
                  [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(xa), b, v); },
                  [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(xa), b, restrict(v, d)); });
      break;
    case Rule::exchange:
      dev = sweep(
          doms, cd,
          [&](const Assignment& v) {
            return intervention_query(fd, InterventionSpec::info(merge(xa, restrict(v, c))), b, restrict(v, d));
          },
          [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(xa), b, v); });
      break;
    case Rule::action:
      dev = sweep(
          doms, cd,
          [&](const Assignment& v) {
            return intervention_query(fd, InterventionSpec::info(merge(xa, restrict(v, c))), b, restrict(v, d));
          },
          [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(xa), b, restrict(v, d)); });
      break;
  }
  return {0, true, dev, {}};
}

TrialRecord simple_exchange(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().observed(), 3, 2, rng, s)) return skipped("too few observed nodes");
  const NodeSet &b = s[0], &a = s[1], &c = s[2];
  if (!check_rule_simple(fd.dag(), Rule::exchange, a, b, c)) return skipped("condition fails");
  const Domains doms = fd.domains();
  NodeSet ac = a;
  ac.insert(c.begin(), c.end());
  const double dev = sweep(
      doms, ac,
      [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(restrict(v, a)), b, restrict(v, c)); },
      [&](const Assignment& v) { return conditional(fd, b, v); });
  return {0, true, dev, {}};
}

TrialRecord simple_no_causal_path(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().observed(), 2, 2, rng, s)) return skipped("too few observed nodes");
  const NodeSet &b = s[0], &a = s[1];
  if (!check_rule_simple(fd.dag(), Rule::action, a, b, {})) return skipped("condition fails");
  const ProbTable obs = marginal(fd, b);
  const double dev =
      sweep(fd.domains(), a, [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(v), b, {}); },
            [&](const Assignment&) { return obs; });
  return {0, true, dev, {}};
}

TrialRecord stacked_deletion(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().observed(), 4, 3, rng, s)) return skipped("too few observed nodes");
  const NodeSet &b = s[0], &c1 = s[1], &c2 = s[2], &d = s[3];
  if (!check_stacked_deletion(fd.dag(), b, c1, c2, d)) return skipped("condition fails");
  const Domains doms = fd.domains();
  const Assignment x2 = random_values(doms, c2, rng);
  NodeSet vary = c1;
  vary.insert(d.begin(), d.end());
  const double dev = sweep(
      doms, vary,
      [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(merge(x2, restrict(v, c1))), b, restrict(v, d)); },
      [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(x2), b, restrict(v, d)); });
  return {0, true, dev, {}};
}

TrialRecord no_causal_path(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().observed(), 3, 2, rng, s)) return skipped("too few observed nodes");
  const NodeSet &b = s[0], &c = s[1], &d = s[2];
  if (!check_no_causal_path(fd.dag(), b, c, d)) return skipped("condition fails");
  NodeSet vary = c;
  vary.insert(d.begin(), d.end());
  const double dev = sweep(
      fd.domains(), vary,
      [&](const Assignment& v) { return intervention_query(fd, InterventionSpec::info(restrict(v, c)), b, restrict(v, d)); },
      [&](const Assignment& v) { return conditional(fd, b, restrict(v, d)); });
  return {0, true, dev, {}};
}

TrialRecord condition_equivalence(const InstanceConfig& cfg) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(fd.dag().node_set(), 4, 0, rng, s)) return skipped("empty graph");
  double dev = 0.0;
  std::string detail;
  for (Rule r : {Rule::observation, Rule::exchange, Rule::action}) {
    const auto [l, rr] = check_equivalence(fd.dag(), r, s[0], s[1], s[2], s[3]);
    if (l != rr) {
      dev = 1.0;
      detail = "rule " + std::to_string(static_cast<int>(r)) + " disagrees";
    }
  }
  return {0, true, dev, detail};
}

InfoFunction random_function(const Edge& e, const std::vector<std::string>& dom, Rng& rng) {
  if (rng.bernoulli(0.5)) return InfoFunction::constant(e, dom, dom[rng.below(dom.size())]);
  InfoFunction f{e, {}, {}};
  for (const auto& v : dom) f.map[v] = dom[rng.below(dom.size())];
  return f;
}

// Splits observed-tail edges into two disjoint random function sets.
void random_function_sets(const FactoredDistribution& fd, Rng& rng, std::vector<InfoFunction>& f1,
                          std::vector<InfoFunction>& f2) {
  for (const auto& e : fd.dag().edges()) {
    if (fd.dag().is_latent(e.tail)) continue;
    const std::size_t role = rng.below(3);
    if (role == 0) f1.push_back(random_function(e, fd.domain(e.tail), rng));
    if (role == 1) f2.push_back(random_function(e, fd.domain(e.tail), rng));
  }
}

std::vector<InfoFunction> join(std::vector<InfoFunction> a, const std::vector<InfoFunction>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TrialRecord augmented_suite(const InstanceConfig& cfg, Rule rule) {
  const auto fd = random_instance(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<InfoFunction> f1, f2;
  random_function_sets(fd, rng, f1, f2);
  if (rule == Rule::observation) f2.clear();
  if (rule == Rule::action && f2.empty()) return skipped("no second function set");
  std::vector<NodeSet> s;
  const std::size_t required = rule == Rule::observation ? 2 : 1;
  if (!sample_sets(fd.dag().observed(), 3, required, rng, s)) return skipped("too few observed nodes");
  const NodeSet &b = s[0], &c = s[1], &d = s[2];
  const NodeSet cc = rule == Rule::observation ? c : NodeSet{};
  if (!check_generalized_rule(fd.dag(), rule, f1, f2, b, cc, d)) return skipped("condition fails");
  const auto spec1 = InterventionSpec::generalized(f1);
  double dev = 0.0;
  if (rule == Rule::observation) {
    NodeSet vary = c;
    vary.insert(d.begin(), d.end());
    dev = sweep(fd.domains(), vary, [&](const Assignment& v) { return intervention_query(fd, spec1, b, v); },
                [&](const Assignment& v) { return intervention_query(fd, spec1, b, restrict(v, d)); });
  } else {
    const auto spec12 = InterventionSpec::generalized(join(f1, f2));
    dev = sweep(fd.domains(), d, [&](const Assignment& v) { return intervention_query(fd, spec12, b, v); },
                [&](const Assignment& v) { return intervention_query(fd, spec1, b, v); });
  }
  return {0, true, dev, {}};
}

TrialRecord info_edge_frontdoor_suite(const InstanceConfig& cfg) {
  Rng rng(cfg.seed);
  const Dag g = frontdoor_topology();
  const Domains doms = random_domains(g, cfg.max_domain, rng);
  const auto fd = random_parameters(g, doms, rng.next());
  const InfoFunction f = random_function({"A", "C"}, doms.at("A"), rng);
  if (!check_generalized_rule(g, Rule::action, {}, {f}, {"B"}, {}, {"A", "C"}))
    return {0, true, 1.0, "deletion condition unexpectedly fails"};
  const ProbTable closed = info_edge_frontdoor(fd, f, "B");
  const ProbTable enumerated = intervention_query(fd, InterventionSpec::generalized({f}), {"B"}, {});
  return {0, true, max_diff(closed, enumerated), {}};
}

double mismatch(const Assignment& a, const Assignment& b) { return a == b ? 0.0 : 1.0; }

NodeSet intervenable(const Scm& m) {
  NodeSet out;
  for (const auto& x : m.endogenous())
    if (!m.graph().is_latent(x)) out.insert(x);
  return out;
}

TrialRecord scm_commutativity(const InstanceConfig& cfg) {
  const Scm m = random_scm(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(intervenable(m), 2, 2, rng, s)) return skipped("too few nodes");
  const Assignment xa = random_values(m.domains(), s[0], rng);
  const Assignment xb = random_values(m.domains(), s[1], rng);
  const Scm ab = info_intervened(info_intervened(m, xa), xb);
  const Scm ba = info_intervened(info_intervened(m, xb), xa);

  std::vector<InfoFunction> f1, f2;
  for (const auto& e : m.graph().edges()) {
    if (!m.endogenous().count(e.tail) || m.graph().is_latent(e.tail)) continue;
    const std::size_t role = rng.below(3);
    if (role == 0) f1.push_back(random_function(e, m.domain(e.tail), rng));
    if (role == 1) f2.push_back(random_function(e, m.domain(e.tail), rng));
  }
  const Scm g12 = generalized_intervened(generalized_intervened(m, f1), f2);
  const Scm g21 = generalized_intervened(generalized_intervened(m, f2), f1);
  const auto f12 = join(f1, f2);

  double dev = 0.0;
  for_each_noise(m, [&](const Assignment& u, double) {
    const Assignment direct = info_evaluate(m, u, merge(xa, xb));
    dev = std::max({dev, mismatch(evaluate(ab, u), evaluate(ba, u)), mismatch(evaluate(ab, u), direct)});
    const Assignment gdirect = generalized_info_evaluate(m, u, f12);
    dev = std::max({dev, mismatch(evaluate(g12, u), evaluate(g21, u)), mismatch(evaluate(g12, u), gdirect)});
  });
  return {0, true, dev, {}};
}

TrialRecord scm_pushforward(const InstanceConfig& cfg) {
  const Scm m = random_scm(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(intervenable(m), 1, 1, rng, s)) return skipped("no nodes");
  const Assignment xa = random_values(m.domains(), s[0], rng);
  const FactoredDistribution fd = induced_distribution(m);
  const double dev = std::max(max_diff(pushforward(m, InterventionSpec::info(xa)), info_distribution(fd, xa)),
                              max_diff(pushforward(m), joint_table(fd)));
  return {0, true, dev, {}};
}

TrialRecord scm_factual(const InstanceConfig& cfg) {
  const Scm m = random_scm(cfg);
  Rng rng(mix_seed(cfg.seed, 7));
  std::vector<NodeSet> s;
  if (!sample_sets(intervenable(m), 2, 2, rng, s)) return skipped("too few nodes");
  Assignment u;
  for (const auto& x : m.exogenous()) u[x] = m.domain(x)[rng.below(m.domain(x).size())];
  const Assignment world = evaluate(m, u);
  const Assignment xa = restrict(world, s[0]);
  const Assignment xb = restrict(world, s[1]);
  const ProbTable cf = counterfactual_query(m, merge(xa, xb), InterventionSpec::info(xa), s[1]);
  return {0, true, std::abs(1.0 - cf.at(xb)), {}};
}

TrialRecord scm_ignorability(const InstanceConfig& cfg) {
  Rng rng(cfg.seed);
  const Dag g = Dag::build({"T", "U_T", "U_Y", "U_Z", "Y", "Z"},
                           {{"Z", "T"}, {"Z", "Y"}, {"T", "Y"}, {"U_Z", "Z"}, {"U_T", "T"}, {"U_Y", "Y"}});
  Domains doms;
  std::map<std::string, std::vector<double>> noise;
  for (const auto& n : g.nodes()) doms[n] = values(domain_size(std::max<std::size_t>(cfg.max_domain, 2), rng));
  for (const std::string u : {"U_T", "U_Y", "U_Z"}) noise[u] = random_row(doms[u].size(), rng);
  std::vector<StructuralEquation> eqs;
  for (const std::string x : {"T", "Y", "Z"}) {
    StructuralEquation eq{x, {}, {}};
    std::vector<const std::vector<std::string>*> in;
    for (const auto& p : g.parents(x)) {
      eq.inputs.push_back(p);
      in.push_back(&doms.at(p));
    }
    for (auto& t : tuples(in)) eq.table[t] = doms[x][rng.below(doms[x].size())];
    eqs.push_back(std::move(eq));
  }
  const Scm m = Scm::build(g, doms, noise, eqs);
  const Assignment t = random_values(doms, {"T"}, rng);
  const ProbTable p = pushforward(m, InterventionSpec::info(t));
  const ProbTable yz = p.marginal({"Y", "Z"});
  const ProbTable tz = p.marginal({"T", "Z"});
  const ProbTable z = p.marginal({"Z"});
  double dev = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Assignment x = p.assignment(i);
    const double pz = z.at(x);
    if (pz <= kZeroEvidence) continue;
    dev = std::max(dev, std::abs(p.at(x) / pz - (yz.at(x) / pz) * (tz.at(x) / pz)));
  }
  return {0, true, dev, {}};
}

const std::map<std::string, Suite>& registry() {
  static const std::map<std::string, Suite> suites = {
      {"do-info-equivalence", do_info_equivalence},
      {"factual-joint", factual_joint},
      {"factual-marginal", factual_marginal},
      {"factual-conditional", factual_conditional},
      {"factual-stacked-marginal", [](const InstanceConfig& c) { return factual_stacked(c, false); }},
      {"factual-stacked-conditional", [](const InstanceConfig& c) { return factual_stacked(c, true); }},
      {"backdoor", backdoor_suite},
      {"frontdoor", frontdoor_suite},
      {"rule-observation", [](const InstanceConfig& c) { return rule_suite(c, Rule::observation); }},
      {"rule-exchange", [](const InstanceConfig& c) { return rule_suite(c, Rule::exchange); }},
      {"rule-action", [](const InstanceConfig& c) { return rule_suite(c, Rule::action); }},
      {"simple-exchange", simple_exchange},
      {"simple-no-causal-path", simple_no_causal_path},
      {"stacked-deletion", stacked_deletion},
      {"no-causal-path", no_causal_path},
      {"condition-equivalence", condition_equivalence},
      {"augmented-observation", [](const InstanceConfig& c) { return augmented_suite(c, Rule::observation); }},
      {"augmented-action", [](const InstanceConfig& c) { return augmented_suite(c, Rule::action); }},
      {"info-edge-frontdoor", info_edge_frontdoor_suite},
      {"scm-commutativity", scm_commutativity},
      {"scm-pushforward", scm_pushforward},
      {"scm-factual", scm_factual},
      {"scm-ignorability", scm_ignorability},
  };
  return suites;
}

}  // namespace

std::vector<std::string> theorem_ids() {
  std::vector<std::string> out;
  for (const auto& [id, s] : registry()) out.push_back(id);
  return out;
}

VerificationReport verify(const std::string& theorem, const InstanceConfig& cfg, std::size_t trials, double tolerance) {
  validate(cfg);
  auto it = registry().find(theorem);
  if (it == registry().end()) throw Error(ErrorCode::unknown_theorem, theorem);
  VerificationReport report;
  report.theorem = theorem;
  report.tolerance = tolerance;
  for (std::size_t t = 0; t < trials; ++t) {
    InstanceConfig trial = cfg;
    trial.seed = mix_seed(cfg.seed, t);
    TrialRecord rec;
    try {
      rec = it->second(trial);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::zero_probability_evidence) throw;
      rec = skipped(e.what());
    }
    rec.seed = trial.seed;
    ++report.trials;
    if (rec.held) {
      ++report.held;
      report.max_deviation = std::max(report.max_deviation, rec.deviation);
      if (!(rec.deviation <= tolerance)) report.failures.push_back(rec);
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

std::string to_json_lines(const VerificationReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    nlohmann::ordered_json j;
    j["theorem"] = report.theorem;
    j["trial"] = i;
    j["seed"] = r.seed;
    j["held"] = r.held;
    j["deviation"] = r.deviation;
    if (!r.detail.empty()) j["detail"] = r.detail;
    out << j.dump() << "\n";
  }
  nlohmann::ordered_json s;
  s["summary"] = true;
  s["theorem"] = report.theorem;
  s["trials"] = report.trials;
  s["held"] = report.held;
  s["max_deviation"] = report.max_deviation;
  s["tolerance"] = report.tolerance;
  std::vector<std::uint64_t> seeds;
  for (const auto& f : report.failures) seeds.push_back(f.seed);
  s["failures"] = seeds;
  s["status"] = !report.failures.empty() ? "FAIL" : report.inconclusive() ? "INCONCLUSIVE" : "PASS";
  out << s.dump() << "\n";
  return out.str();
}

}  // namespace infocalc
