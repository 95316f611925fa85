#include "infocalc/calculus.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "infocalc/errors.hpp"

namespace infocalc {

namespace {

NodeSet unite(NodeSet a, const NodeSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

NodeSet minus(NodeSet a, const NodeSet& b) {
  for (const auto& x : b) a.erase(x);
  return a;
}

void require_disjoint(const std::vector<const NodeSet*>& sets) {
  NodeSet seen;
  for (const auto* s : sets)
    for (const auto& x : *s)
      if (!seen.insert(x).second) throw Error(ErrorCode::overlapping_sets, x + " is in two of the node sets");
}

std::string describe_trail(const Dag& dag, const std::vector<std::string>& trail) {
  std::string out = trail.front();
  for (std::size_t i = 1; i < trail.size(); ++i)
    out += (dag.has_edge(trail[i - 1], trail[i]) ? " -> " : " <- ") + trail[i];
  return out;
}

std::vector<Item> bare(const NodeSet& nodes) {
  std::vector<Item> out;
  for (const auto& n : nodes) out.push_back({n, std::nullopt});
  return out;
}

std::vector<Item> valued(const Assignment& a) {
  std::vector<Item> out;
  for (const auto& [n, v] : a) out.push_back({n, v});
  return out;
}

std::vector<Item> concat(std::vector<Item> a, const std::vector<Item>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

std::vector<Item> select(const std::vector<Item>& items, const NodeSet& keep) {
  std::vector<Item> out;
  for (const auto& i : items)
    if (keep.count(i.node)) out.push_back(i);
  return out;
}

std::vector<Item> drop(const std::vector<Item>& items, const NodeSet& gone) {
  std::vector<Item> out;
  for (const auto& i : items)
    if (!gone.count(i.node)) out.push_back(i);
  return out;
}

NodeSet nodes_of(const std::vector<Item>& items) {
  NodeSet out;
  for (const auto& i : items) out.insert(i.node);
  return out;
}

ProbAtom make_atom(std::vector<Item> targets, std::vector<Item> actions, std::vector<Item> given) {
  ProbAtom a;
  a.targets = std::move(targets);
  a.actions = std::move(actions);
  a.given = std::move(given);
  a.normalize();
  return a;
}

Expression backdoor_expression(const std::vector<Item>& treatment, const std::vector<Item>& targets,
                               const NodeSet& adjust) {
  const auto z = bare(adjust);
  Expression effect = Expression::of(make_atom(targets, {}, concat(treatment, z)));
  if (adjust.empty()) return effect;
  return Expression::sum({adjust.begin(), adjust.end()},
                         Expression::product({std::move(effect), Expression::of(make_atom(z, {}, {}))}));
}

Expression frontdoor_expression(const std::vector<Item>& treatment, const std::vector<Item>& targets,
                                const NodeSet& mediators) {
  const NodeSet a = nodes_of(treatment);
  const auto m = bare(mediators);
  const auto a_bare = bare(a);
  Expression inner = Expression::sum(
      {a.begin(), a.end()}, Expression::product({Expression::of(make_atom(targets, {}, concat(a_bare, m))),
                                                 Expression::of(make_atom(a_bare, {}, {}))}));
  return Expression::sum({mediators.begin(), mediators.end()},
                         Expression::product({Expression::of(make_atom(m, {}, treatment)), std::move(inner)}));
}

}  // namespace

std::optional<std::string> backdoor_violation(const Dag& dag, const NodeSet& treatment, const NodeSet& outcome,
                                              const NodeSet& adjust) {
  dag.require_nodes(treatment);
  dag.require_nodes(outcome);
  dag.require_nodes(adjust);
  require_disjoint({&treatment, &outcome, &adjust});
  const NodeSet desc = relatives(dag, treatment, Relation::descendants);
  for (const auto& z : adjust)
    if (desc.count(z)) return "adjustment node " + z + " is a descendant of the treatment";
  const Dag cut = remove_outgoing(dag, treatment);
  if (auto trail = active_path(cut, treatment, outcome, adjust))
    return "unblocked back-door path " + describe_trail(cut, *trail);
  return std::nullopt;
}

std::optional<std::string> frontdoor_violation(const Dag& dag, const NodeSet& treatment, const NodeSet& outcome,
                                               const NodeSet& mediators) {
  dag.require_nodes(treatment);
  dag.require_nodes(outcome);
  dag.require_nodes(mediators);
  require_disjoint({&treatment, &outcome, &mediators});
  if (has_directed_path(remove_incoming(dag, mediators), treatment, outcome))
    return "a directed path from the treatment to the outcome avoids the mediators";
  const Dag from_a = remove_outgoing(dag, treatment);
  if (auto trail = active_path(from_a, treatment, mediators, {}))
    return "unblocked back-door path " + describe_trail(from_a, *trail);
  const Dag from_c = remove_outgoing(dag, mediators);
  if (auto trail = active_path(from_c, mediators, outcome, treatment))
    return "back-door path not blocked by the treatment " + describe_trail(from_c, *trail);
  return std::nullopt;
}

Expression backdoor_adjust(const Dag& dag, const Assignment& treatment, const NodeSet& outcome, const NodeSet& adjust) {
  NodeSet a;
  for (const auto& [n, v] : treatment) a.insert(n);
  if (auto why = backdoor_violation(dag, a, outcome, adjust)) throw Error(ErrorCode::criterion_fails, *why);
  return backdoor_expression(valued(treatment), bare(outcome), adjust);
}

Expression frontdoor_adjust(const Dag& dag, const Assignment& treatment, const NodeSet& outcome,
                            const NodeSet& mediators) {
  NodeSet a;
  for (const auto& [n, v] : treatment) a.insert(n);
  if (auto why = frontdoor_violation(dag, a, outcome, mediators)) throw Error(ErrorCode::criterion_fails, *why);
  return frontdoor_expression(valued(treatment), bare(outcome), mediators);
}

Dag rule_graph(const Dag& dag, Rule rule, const NodeSet& a, const NodeSet& c, const NodeSet& d) {
  switch (rule) {
    case Rule::observation:
      return remove_outgoing(dag, a);
    case Rule::exchange:
      return remove_outgoing(dag, unite(a, c));
    case Rule::action: {
      const Dag g = remove_outgoing(dag, a);
      return remove_incoming(g, minus(c, relatives(g, d, Relation::ancestors)));
    }
  }
  throw Error(ErrorCode::model_error, "unknown rule");
}

bool check_rule(const Dag& dag, Rule rule, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
  for (const auto* s : {&a, &b, &c, &d}) dag.require_nodes(*s);
  require_disjoint({&a, &b, &c, &d});
  return d_separated(rule_graph(dag, rule, a, c, d), b, c, d);
}

bool check_rule_simple(const Dag& dag, Rule rule, const NodeSet& a, const NodeSet& b, const NodeSet& c,
                       const NodeSet& d) {
  for (const auto* s : {&a, &b, &c, &d}) dag.require_nodes(*s);
  require_disjoint({&a, &b, &c, &d});
  switch (rule) {
    case Rule::observation:
      return d_separated(remove_outgoing(dag, a), b, c, d);
    case Rule::exchange:
      return d_separated(remove_outgoing(dag, a), b, a, c);
    case Rule::action:
      return !has_directed_path(dag, a, b);
  }
  throw Error(ErrorCode::model_error, "unknown rule");
}

bool check_stacked_deletion(const Dag& dag, const NodeSet& b, const NodeSet& c1, const NodeSet& c2, const NodeSet& d) {
  for (const auto* s : {&b, &c1, &c2, &d}) dag.require_nodes(*s);
  require_disjoint({&b, &c1, &c2, &d});
  return d_separated(remove_outgoing(dag, c2), b, c1, d);
}

bool check_no_causal_path(const Dag& dag, const NodeSet& b, const NodeSet& c, const NodeSet& d) {
  for (const auto* s : {&b, &c, &d}) dag.require_nodes(*s);
  require_disjoint({&b, &c, &d});
  return !has_directed_path(dag, c, unite(b, d));
}

std::pair<bool, bool> check_equivalence(const Dag& dag, Rule which, const NodeSet& a, const NodeSet& b,
                                        const NodeSet& c, const NodeSet& d) {
  for (const auto* s : {&a, &b, &c, &d}) dag.require_nodes(*s);
  require_disjoint({&a, &b, &c, &d});
  const bool left = d_separated(rule_graph(dag, which, a, c, d), b, c, d);
  const Dag no_into_a = remove_incoming(dag, a);
  const NodeSet ad = unite(a, d);
  bool right = false;
  switch (which) {
    case Rule::observation:
      right = d_separated(no_into_a, b, c, ad);
      break;
    case Rule::exchange:
      right = d_separated(remove_outgoing(no_into_a, c), b, c, ad);
      break;
    case Rule::action: {
      const NodeSet cut = minus(c, relatives(no_into_a, d, Relation::ancestors));
      right = d_separated(remove_incoming(no_into_a, cut), b, c, ad);
      break;
    }
  }
  return {left, right};
}

bool check_generalized_rule(const Dag& dag, Rule rule, const std::vector<InfoFunction>& f1,
                            const std::vector<InfoFunction>& f2, const NodeSet& b, const NodeSet& c,
                            const NodeSet& d) {
  for (const auto* s : {&b, &c, &d}) dag.require_nodes(*s);
  require_disjoint({&b, &c, &d});
  std::map<Edge, bool> flags;
  for (const auto& f : f1) {
    if (flags.count(f.edge)) throw Error(ErrorCode::duplicate_edge_function, to_string(f.edge));
    flags[f.edge] = f.is_constant();
  }
  std::set<Edge> second;
  for (const auto& f : f2) {
    if (flags.count(f.edge)) throw Error(ErrorCode::overlapping_info_nodes, info_node_name(f.edge) + " is in both sets");
    if (!second.insert(f.edge).second) throw Error(ErrorCode::duplicate_edge_function, to_string(f.edge));
    if (!dag.has_edge(f.edge.tail, f.edge.head)) throw Error(ErrorCode::unknown_edge, to_string(f.edge));
  }
  const AugmentedDag aug = intervention_augmented(dag, flags);
  switch (rule) {
    case Rule::observation:
      return d_separated(aug.graph, b, c, d);
    case Rule::action: {
      NodeSet n2;
      for (const auto& e : second) n2.insert(aug.info_node(e));
      const NodeSet cut = minus(n2, relatives(aug.graph, d, Relation::ancestors));
      return d_separated(remove_incoming(aug.graph, cut), b, n2, d);
    }
    case Rule::exchange:
      break;
  }
  throw Error(ErrorCode::model_error, "only the observation and action rules exist on augmented graphs");
}

ProbTable info_edge_frontdoor(const FactoredDistribution& fd, const InfoFunction& f, const std::string& outcome) {
  const std::string& a = f.edge.tail;
  const std::string& c = f.edge.head;
  if (a == outcome || c == outcome) throw Error(ErrorCode::overlapping_sets, "outcome must differ from the edge ends");
  validate(f, fd.domain(a));
  const ProbTable m = marginal(fd, {a, c, outcome});
  const ProbTable ma = m.marginal({a});
  const ProbTable mac = m.marginal({a, c});
  const auto& dom_b = fd.domain(outcome);
  std::vector<double> probs(dom_b.size(), 0.0);
  for (std::size_t ib = 0; ib < dom_b.size(); ++ib) {
    for (const auto& vc : fd.domain(c)) {
      for (const auto& va : fd.domain(a)) {
        const std::string& e = f.apply(va);
        const double pe = ma.at({{a, e}});
        const double pa = ma.at({{a, va}});
        const double pac = mac.at({{a, va}, {c, vc}});
        if (pa <= kZeroEvidence) continue;
        if (pe <= kZeroEvidence) throw Error(ErrorCode::zero_probability_evidence, "P(" + a + "=" + e + ") = 0");
        const double c_given_e = mac.at({{a, e}, {c, vc}}) / pe;
        if (c_given_e <= kZeroEvidence) continue;
        if (pac <= kZeroEvidence)
          throw Error(ErrorCode::zero_probability_evidence, "P(" + a + "=" + va + "," + c + "=" + vc + ") = 0");
        const double b_given_ca = m.at({{a, va}, {c, vc}, {outcome, dom_b[ib]}}) / pac;
        probs[ib] += c_given_e * b_given_ca * pa;
      }
    }
  }
  return ProbTable({outcome}, {dom_b}, std::move(probs));
}

namespace {

std::vector<NodeSet> subsets(const NodeSet& s) {
  const std::vector<std::string> v(s.begin(), s.end());
  std::vector<NodeSet> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << v.size()); ++mask) {
    NodeSet sub;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (mask >> i & 1) sub.insert(v[i]);
    out.push_back(std::move(sub));
  }
  std::stable_sort(out.begin(), out.end(), [](const NodeSet& x, const NodeSet& y) { return x.size() < y.size(); });
  return out;
}

std::string names(const NodeSet& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ",") + x;
  return out;
}

Expression* leftmost_action(Expression& e) {
  if (e.kind == Expression::Kind::atom) return e.atom.interventional() ? &e : nullptr;
  for (auto& c : e.children)
    if (Expression* hit = leftmost_action(c)) return hit;
  return nullptr;
}

struct Rewrite {
  std::string label;
  Expression replacement;
};

std::vector<Rewrite> rewrites(const Dag& dag, const ProbAtom& atom) {
  std::vector<Rewrite> out;
  const NodeSet t = atom.target_nodes();
  const NodeSet a = atom.action_nodes();
  const NodeSet g = atom.given_nodes();

  // Sending a node its own value is no intervention.
  NodeSet same;
  for (const auto& act : atom.actions) {
    for (const auto* list : {&atom.targets, &atom.given})
      for (const auto& i : *list)
        if (i.node == act.node && i.value == act.value) same.insert(act.node);
  }
  if (!same.empty()) {
    ProbAtom next = atom;
    next.actions = drop(atom.actions, same);
    out.push_back({"consistency drops sigma(" + names(same) + ")", Expression::of(std::move(next))});
  }
  if (!atom.disjoint()) return out;

  const auto with = [&](std::vector<Item> actions, std::vector<Item> given) {
    ProbAtom next = make_atom(atom.targets, std::move(actions), std::move(given));
    next.action_kind = ActionKind::info;
    return Expression::of(std::move(next));
  };

  for (const auto& s : subsets(a))
    if (check_rule(dag, Rule::action, minus(a, s), t, s, g))
      out.push_back({"action rule deletes sigma(" + names(s) + ")", with(drop(atom.actions, s), atom.given)});
  for (const auto& s : subsets(a))
    if (check_rule(dag, Rule::exchange, minus(a, s), t, s, g))
      out.push_back({"exchange rule observes " + names(s),
                     with(drop(atom.actions, s), concat(atom.given, select(atom.actions, s)))});
  for (const auto& s : subsets(g))
    if (check_rule(dag, Rule::observation, a, t, s, minus(g, s)))
      out.push_back({"observation rule deletes " + names(s), with(atom.actions, drop(atom.given, s))});

  const NodeSet spare = minus(minus(minus(dag.observed(), t), a), g);
  if (g.empty()) {
    std::vector<NodeSet> candidates{NodeSet{}};
    for (const auto& s : subsets(spare)) candidates.push_back(s);
    for (const auto& z : candidates)
      if (!backdoor_violation(dag, a, t, z))
        out.push_back({"back-door adjustment over {" + names(z) + "}", backdoor_expression(atom.actions, atom.targets, z)});
    for (const auto& m : subsets(spare))
      if (!frontdoor_violation(dag, a, t, m))
        out.push_back({"front-door adjustment through {" + names(m) + "}",
                       frontdoor_expression(atom.actions, atom.targets, m)});
  }

  if (atom.targets.size() > 1) {
    for (const auto& first : atom.targets) {
      const NodeSet rest_nodes = minus(t, {first.node});
      const auto rest = select(atom.targets, rest_nodes);
      Expression head = Expression::of(make_atom({first}, atom.actions, concat(atom.given, rest)));
      Expression tail = Expression::of(make_atom(rest, atom.actions, atom.given));
      out.push_back({"chain rule splits off " + first.node, Expression::product({std::move(head), std::move(tail)})});
    }
  }

  for (const auto& n : spare) {
    const std::vector<Item> ni{{n, std::nullopt}};
    Expression cond = Expression::of(make_atom(atom.targets, atom.actions, concat(atom.given, ni)));
    Expression weight = Expression::of(make_atom(ni, atom.actions, atom.given));
    out.push_back({"marginalize over " + n,
                   Expression::sum({n}, Expression::product({std::move(cond), std::move(weight)}))});
  }

  for (const auto& n : g)
    if (check_rule(dag, Rule::exchange, a, t, {n}, minus(g, {n})))
      out.push_back({"exchange rule intervenes on " + n,
                     with(concat(atom.actions, select(atom.given, {n})), drop(atom.given, {n}))});
  return out;
}

void require_queryable(const Dag& dag, const std::vector<Item>& items, ErrorCode latent_code) {
  for (const auto& i : items) {
    dag.index_of(i.node);
    if (dag.is_latent(i.node)) throw Error(latent_code, i.node + " is latent");
  }
}

ProbAtom simplify_atom(const Dag& dag, ProbAtom atom) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& i : atom.given) {
      const NodeSet rest = minus(atom.given_nodes(), {i.node});
      if (d_separated(dag, atom.target_nodes(), {i.node}, rest)) {
        atom.given = drop(atom.given, {i.node});
        changed = true;
        break;
      }
    }
  }
  return atom;
}

}  // namespace

Expression simplify(const Dag& dag, const Expression& e) {
  Expression out = e;
  if (out.kind == Expression::Kind::atom) {
    if (!out.atom.interventional() && out.atom.disjoint()) out.atom = simplify_atom(dag, out.atom);
    return out;
  }
  for (auto& c : out.children) c = simplify(dag, c);
  return out;
}

IdentifyResult identify(const Dag& dag, const ProbAtom& query, std::size_t budget) {
  require_queryable(dag, query.targets, ErrorCode::latent_queried);
  require_queryable(dag, query.given, ErrorCode::latent_queried);
  require_queryable(dag, query.actions, ErrorCode::latent_intervention);
  ProbAtom start = query;
  start.action_kind = ActionKind::info;
  start.normalize();

  struct State {
    Expression expr;
    std::size_t parent;
    std::string step;
  };
  constexpr std::size_t root = static_cast<std::size_t>(-1);
  std::vector<State> states{{Expression::of(start), root, "query"}};
  std::unordered_set<std::string> seen{to_string(states.front().expr)};
  std::deque<std::size_t> queue{0};

  IdentifyResult result;
  const auto finish = [&](std::size_t idx) {
    std::vector<std::string> steps;
    for (std::size_t i = idx; i != root; i = states[i].parent) steps.push_back(states[i].step + ": " + to_string(states[i].expr));
    std::reverse(steps.begin(), steps.end());
    Expression simple = simplify(dag, states[idx].expr);
    if (!(simple == states[idx].expr)) steps.push_back("drop separated evidence: " + to_string(simple));
    result.derivation = std::move(steps);
    result.expression = std::move(simple);
    result.frontier = queue.size();
  };

  if (observational(states.front().expr)) {
    finish(0);
    return result;
  }
  while (!queue.empty() && result.expanded < budget) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    ++result.expanded;
    Expression base = states[idx].expr;
    const Expression* target = leftmost_action(base);
    const ProbAtom atom = target->atom;
    for (auto& rw : rewrites(dag, atom)) {
      Expression next = states[idx].expr;
      *leftmost_action(next) = std::move(rw.replacement);
      std::string key = to_string(next);
      if (!seen.insert(key).second) continue;
      const bool done = observational(next);
      states.push_back({std::move(next), idx, std::move(rw.label)});
      if (done) {
        finish(states.size() - 1);
        return result;
      }
      queue.push_back(states.size() - 1);
    }
  }
  result.frontier = queue.size();
  return result;
}

}  // namespace infocalc
