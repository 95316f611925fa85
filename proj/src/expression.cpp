#include "infocalc/expression.hpp"

#include <algorithm>

#include "infocalc/errors.hpp"

namespace infocalc {

std::string to_string(const Item& item) { return item.value ? item.node + "=" + *item.value : item.node; }

namespace {

NodeSet nodes_of(const std::vector<Item>& items) {
  NodeSet out;
  for (const auto& i : items) out.insert(i.node);
  return out;
}

std::string join_items(const std::vector<Item>& items) {
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += ",";
    out += to_string(i);
  }
  return out;
}

}  // namespace

NodeSet ProbAtom::target_nodes() const { return nodes_of(targets); }
NodeSet ProbAtom::action_nodes() const { return nodes_of(actions); }
NodeSet ProbAtom::given_nodes() const { return nodes_of(given); }

void ProbAtom::normalize() {
  std::sort(targets.begin(), targets.end());
  std::sort(actions.begin(), actions.end());
  std::sort(given.begin(), given.end());
  NodeSet seen;
  for (const auto* list : {&targets, &given})
    for (const auto& i : *list)
      if (!seen.insert(i.node).second) throw Error(ErrorCode::overlapping_sets, i.node + " appears twice in " + to_string(*this));
  NodeSet acted;
  for (const auto& i : actions)
    if (!acted.insert(i.node).second) throw Error(ErrorCode::overlapping_sets, i.node + " is intervened twice");
}

bool ProbAtom::disjoint() const {
  NodeSet seen = target_nodes();
  for (const auto* list : {&actions, &given})
    for (const auto& i : *list)
      if (!seen.insert(i.node).second) return false;
  return true;
}

std::string to_string(const ProbAtom& atom) {
  std::string out = "P(" + join_items(atom.targets);
  std::string cond;
  const char* op = atom.action_kind == ActionKind::do_ ? "do(" : "sigma(";
  for (const auto& a : atom.actions) {
    if (!cond.empty()) cond += ",";
    cond += op + to_string(a) + ")";
  }
  if (!atom.given.empty()) {
    if (!cond.empty()) cond += ",";
    cond += join_items(atom.given);
  }
  if (!cond.empty()) out += "|" + cond;
  return out + ")";
}

Expression Expression::of(ProbAtom atom) {
  Expression e;
  e.kind = Kind::atom;
  e.atom = std::move(atom);
  return e;
}

Expression Expression::sum(std::vector<std::string> over, Expression body) {
  if (over.empty()) return body;
  Expression e;
  e.kind = Kind::sum;
  std::sort(over.begin(), over.end());
  over.erase(std::unique(over.begin(), over.end()), over.end());
  e.sum_over = std::move(over);
  e.children.push_back(std::move(body));
  return e;
}

Expression Expression::product(std::vector<Expression> factors) {
  std::vector<Expression> flat;
  for (auto& f : factors) {
    if (f.kind == Kind::product) {
      for (auto& c : f.children) flat.push_back(std::move(c));
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) throw Error(ErrorCode::model_error, "empty product");
  if (flat.size() == 1) return std::move(flat.front());
  Expression e;
  e.kind = Kind::product;
  e.children = std::move(flat);
  return e;
}

std::string to_string(const Expression& e) {
  switch (e.kind) {
    case Expression::Kind::atom:
      return to_string(e.atom);
    case Expression::Kind::sum: {
      std::string vars;
      for (const auto& v : e.sum_over) vars += (vars.empty() ? "" : ",") + v;
      return "sum{" + vars + "}( " + to_string(e.children.front()) + " )";
    }
    case Expression::Kind::product: {
      std::string out;
      for (const auto& c : e.children) out += (out.empty() ? "" : " * ") + to_string(c);
      return out;
    }
  }
  return {};
}

namespace {

void collect_free(const Expression& e, const NodeSet& bound, NodeSet& out) {
  switch (e.kind) {
    case Expression::Kind::atom:
      for (const auto* list : {&e.atom.targets, &e.atom.actions, &e.atom.given})
        for (const auto& i : *list)
          if (!i.value && !bound.count(i.node)) out.insert(i.node);
      return;
    case Expression::Kind::sum: {
      NodeSet inner = bound;
      inner.insert(e.sum_over.begin(), e.sum_over.end());
      collect_free(e.children.front(), inner, out);
      return;
    }
    case Expression::Kind::product:
      for (const auto& c : e.children) collect_free(c, bound, out);
      return;
  }
}

}  // namespace

NodeSet free_variables(const Expression& e) {
  NodeSet out;
  collect_free(e, {}, out);
  return out;
}

bool observational(const Expression& e) {
  if (e.kind == Expression::Kind::atom) return !e.atom.interventional();
  return std::all_of(e.children.begin(), e.children.end(), [](const Expression& c) { return observational(c); });
}

Evaluator::Evaluator(const FactoredDistribution& fd) : fd_(fd), joint_(joint_table(fd)) {}

const ProbTable& Evaluator::marginal_of(const NodeSet& nodes) {
  auto it = marginals_.find(nodes);
  if (it != marginals_.end()) return it->second;
  return marginals_.emplace(nodes, joint_.marginal(nodes)).first->second;
}

const ProbTable& Evaluator::intervened(const InterventionSpec& spec, const std::string& key) {
  auto it = intervened_.find(key);
  if (it != intervened_.end()) return it->second;
  return intervened_.emplace(key, intervention_distribution(fd_, spec)).first->second;
}

namespace {

// Resolves items against env; returns false when two mentions of one node disagree.
bool resolve(const std::vector<Item>& items, const Assignment& env, Assignment& out) {
  for (const auto& i : items) {
    std::string v;
    if (i.value) {
      v = *i.value;
    } else {
      auto it = env.find(i.node);
      if (it == env.end()) throw Error(ErrorCode::unknown_node, "unbound variable " + i.node);
      v = it->second;
    }
    auto [pos, fresh] = out.emplace(i.node, v);
    if (!fresh && pos->second != v) return false;
  }
  return true;
}

NodeSet keys(const Assignment& a) {
  NodeSet out;
  for (const auto& [k, v] : a) out.insert(k);
  return out;
}

}  // namespace

double Evaluator::evaluate(const ProbAtom& atom, const Assignment& env) {
  Assignment given;
  if (!resolve(atom.given, env, given)) throw Error(ErrorCode::zero_probability_evidence, "contradictory evidence");
  Assignment joint = given;
  const bool consistent = resolve(atom.targets, env, joint);

  if (!atom.interventional()) {
    const double den = given.empty() ? 1.0 : marginal_of(keys(given)).at(given);
    if (den <= kZeroEvidence) throw Error(ErrorCode::zero_probability_evidence, "P(" + to_string(given) + ") = 0");
    if (!consistent) return 0.0;
    return marginal_of(keys(joint)).at(joint) / den;
  }

  Assignment act;
  if (!resolve(atom.actions, env, act)) throw Error(ErrorCode::model_error, "contradictory actions");
  const bool is_do = atom.action_kind == ActionKind::do_;
  const auto spec = is_do ? InterventionSpec::do_(act) : InterventionSpec::info(act);
  const ProbTable& dist = intervened(spec, (is_do ? "do:" : "sigma:") + to_string(act));
  const double den = given.empty() ? 1.0 : dist.probability(given);
  if (den <= kZeroEvidence) throw Error(ErrorCode::zero_probability_evidence, "P(" + to_string(given) + ") = 0");
  if (!consistent) return 0.0;
  return dist.probability(joint) / den;
}

double Evaluator::sum_over(const Expression& e, Assignment& env, std::size_t i) {
  if (i == e.sum_over.size()) return evaluate(e.children.front(), env);
  const std::string& var = e.sum_over[i];
  const auto saved = env.find(var) == env.end() ? std::optional<std::string>{} : std::optional<std::string>{env[var]};
  double total = 0.0;
  for (const auto& v : fd_.domain(var)) {
    env[var] = v;
    total += sum_over(e, env, i + 1);
  }
  if (saved) env[var] = *saved;
  else env.erase(var);
  return total;
}

double Evaluator::evaluate(const Expression& e, const Assignment& env) {
  switch (e.kind) {
    case Expression::Kind::atom:
      return evaluate(e.atom, env);
    case Expression::Kind::sum: {
      Assignment local = env;
      return sum_over(e, local, 0);
    }
    case Expression::Kind::product: {
      double p = 1.0;
      bool pending = false;
      std::string reason;
      for (const auto& c : e.children) {
        try {
          const double v = evaluate(c, env);
          if (v <= kZeroEvidence) return 0.0;
          p *= v;
        } catch (const Error& err) {
          if (err.code() != ErrorCode::zero_probability_evidence) throw;
          pending = true;
          reason = err.what();
        }
      }
      if (pending) throw Error(ErrorCode::zero_probability_evidence, reason);
      return p;
    }
  }
  return 0.0;
}

ProbTable Evaluator::tabulate(const Expression& e) {
  const NodeSet vars = free_variables(e);
  std::vector<std::string> nodes(vars.begin(), vars.end());
  std::vector<std::vector<std::string>> doms;
  std::vector<std::size_t> radix;
  for (const auto& v : nodes) {
    doms.push_back(fd_.domain(v));
    radix.push_back(doms.back().size());
  }
  std::vector<double> probs;
  Assignment env;
  for_each_state(radix, [&](const std::vector<std::size_t>& s) {
    for (std::size_t i = 0; i < nodes.size(); ++i) env[nodes[i]] = doms[i][s[i]];
    probs.push_back(evaluate(e, env));
  });
  return ProbTable(std::move(nodes), std::move(doms), std::move(probs));
}

}  // namespace infocalc
