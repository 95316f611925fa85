#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "infocalc/calculus.hpp"
#include "infocalc/dot.hpp"
#include "infocalc/errors.hpp"
#include "infocalc/expression.hpp"
#include "infocalc/model.hpp"
#include "infocalc/oracle.hpp"
#include "infocalc/query.hpp"

using namespace infocalc;

namespace {

enum Exit { ok = 0, input = 2, zero_evidence = 3, latent = 4, not_scm = 5, budget = 6, failures = 7, inconclusive = 8 };

std::string format_probability(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", p);
  return buf;
}

void print_table(const ProbTable& t, const Assignment& only = {}) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Assignment a = t.assignment(i);
    bool keep = true;
    for (const auto& [k, v] : only) keep = keep && a.at(k) == v;
    if (!keep) continue;
    std::string row;
    for (std::size_t k = 0; k < t.nodes().size(); ++k) row += (k ? "," : "") + a.at(t.nodes()[k]);
    std::cout << row << "\t" << format_probability(t.at_index(i)) << "\n";
  }
}

void split_targets(const std::vector<Item>& targets, NodeSet& nodes, Assignment& fixed) {
  for (const auto& t : targets) {
    if (!nodes.insert(t.node).second) throw Error(ErrorCode::overlapping_sets, t.node + " is a target twice");
    if (t.value) fixed[t.node] = *t.value;
  }
}

Assignment evidence_of(const std::vector<QueryItem>& items, std::vector<QueryItem>& interventions) {
  Assignment given;
  for (const auto& i : items) {
    if (i.kind != QueryItem::Kind::observe) {
      interventions.push_back(i);
      continue;
    }
    if (!i.value) throw Error(ErrorCode::parse_error, "evidence " + i.node + " needs a value");
    if (!given.emplace(i.node, *i.value).second) throw Error(ErrorCode::overlapping_sets, i.node + " observed twice");
  }
  return given;
}

void require_disjoint(const NodeSet& a, const Assignment& b, const std::string& what) {
  for (const auto& [k, v] : b)
    if (a.count(k)) throw Error(ErrorCode::overlapping_sets, k + " is both a target and " + what);
}

int run_query(const std::string& model_path, const std::string& text) {
  const Model m = load_model(model_path);
  const Query q = parse_query(text);
  if (!q.modifiers.empty()) throw Error(ErrorCode::parse_error, "counterfactual modifiers belong to the counterfactual command");
  NodeSet target;
  Assignment fixed;
  split_targets(q.targets, target, fixed);
  std::vector<QueryItem> interventions;
  const Assignment given = evidence_of(q.items, interventions);
  require_disjoint(target, given, "evidence");
  check_values(m, fixed);
  check_values(m, given);
  const InterventionSpec spec = build_spec(m, interventions);
  if (spec.kind() != InterventionSpec::Kind::generalized_info) require_disjoint(target, spec.assignment(), "intervened");
  for (const auto& [k, v] : spec.assignment())
    if (given.count(k)) throw Error(ErrorCode::overlapping_sets, k + " is both intervened and observed");

  // Observational queries never mention latent nodes.
  for (const auto& n : target)
    if (m.graph.is_latent(n)) throw Error(ErrorCode::latent_queried, n);
  for (const auto& [n, v] : given)
    if (m.graph.is_latent(n)) throw Error(ErrorCode::latent_queried, n);

  ProbTable table;
  if (m.distribution) {
    table = intervention_query(*m.distribution, spec, target, given);
  } else if (m.scm) {
    validate(spec, m.graph, &m.declared);
    table = pushforward(*m.scm, spec).conditional(target, given);
  } else {
    throw Error(ErrorCode::model_error, "the model declares a graph only, without parameters");
  }
  print_table(table, fixed);
  return ok;
}

int run_counterfactual(const std::string& model_path, const std::string& text) {
  const Model m = load_model(model_path);
  if (!m.scm) {
    std::cerr << "error: counterfactual queries need an scm model\n";
    return not_scm;
  }
  const Query q = parse_query(text);
  NodeSet target;
  Assignment fixed;
  split_targets(q.targets, target, fixed);
  std::vector<QueryItem> stray;
  const Assignment evidence = evidence_of(q.items, stray);
  if (!stray.empty()) throw Error(ErrorCode::parse_error, "interventions go after '^' on the targets");
  check_values(m, fixed);
  check_values(m, evidence);
  const InterventionSpec spec = build_spec(m, q.modifiers);
  print_table(counterfactual_query(*m.scm, evidence, spec, target), fixed);
  return ok;
}

int run_identify(const std::string& model_path, const std::string& text, std::size_t limit, bool trace) {
  const Model m = load_model(model_path);
  const ProbAtom atom = to_atom(parse_query(text));
  Assignment values;
  for (const auto& list : {atom.targets, atom.actions, atom.given})
    for (const auto& i : list)
      if (i.value) values[i.node] = *i.value;
  check_values(m, values);
  const IdentifyResult r = identify(m.graph, atom, limit);
  if (trace)
    for (const auto& step : r.derivation) std::cerr << step << "\n";
  if (!r.expression) {
    std::cout << "NOT-IDENTIFIED-WITHIN-BUDGET\n";
    return budget;
  }
  std::cout << to_string(*r.expression) << "\n";
  return ok;
}

int run_graph(const std::string& model_path, const std::string& text, const std::string& format, bool augmented) {
  const Model m = load_model(model_path);
  std::vector<QueryItem> items;
  if (!text.empty()) items = parse_query("P(_|" + text + ")").items;
  const InterventionSpec spec = build_spec(m, items);
  if (augmented) {
    if (format != "dot") throw Error(ErrorCode::parse_error, "augmented graphs are rendered as dot only");
    std::map<Edge, bool> flags;
    if (spec.kind() == InterventionSpec::Kind::do_)
      throw Error(ErrorCode::parse_error, "augmented graphs take information interventions only");
    const InterventionSpec g =
        spec.kind() == InterventionSpec::Kind::info ? spec.as_generalized(m.graph, m.declared) : spec;
    validate(g, m.graph, nullptr);
    for (const auto& f : g.functions()) flags[f.edge] = f.is_constant();
    std::cout << to_dot(intervention_augmented(m.graph, flags));
    return ok;
  }
  const InterventionGraph g = intervention_graph(m.graph, spec);
  std::cout << (format == "json" ? to_json(g) : to_dot(g));
  return ok;
}

int run_eval(const std::string& model_path, const std::string& text) {
  const Model m = load_model(model_path);
  const Expression e = parse_expression(text);
  const FactoredDistribution fd = m.parameters();
  Evaluator ev(fd);
  const ProbTable t = ev.tabulate(e);
  if (t.nodes().empty()) std::cout << format_probability(t.at_index(0)) << "\n";
  else print_table(t);
  return ok;
}

double tolerance_from_env() {
  const char* env = std::getenv("INFO_CALC_TOLERANCE");
  if (!env || !*env) return kDefaultTolerance;
  char* end = nullptr;
  const double tol = std::strtod(env, &end);
  if (*end != '\0' || !(tol >= 0.0)) throw Error(ErrorCode::config_error, "INFO_CALC_TOLERANCE must be a non-negative number");
  return tol;
}

int run_verify(const std::string& theorem, const InstanceConfig& cfg, std::size_t trials) {
  const VerificationReport r = verify(theorem, cfg, trials, tolerance_from_env());
  std::cout << to_json_lines(r);
  if (!r.failures.empty()) return failures;
  if (r.inconclusive()) return inconclusive;
  return ok;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::zero_probability_evidence:
      return zero_evidence;
    case ErrorCode::latent_queried:
      return latent;
    default:
      return input;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact queries, identification and checks for information interventions on causal models"};
  app.require_subcommand(1);
  std::string model_path, text, format = "dot", theorem;
  std::size_t limit = kDefaultBudget, trials = 200;
  bool trace = false, augmented = false, list = false;
  InstanceConfig cfg;

  auto* query = app.add_subcommand("query", "Probability table of a (do/sigma) query");
  query->add_option("--model", model_path, "Model file")->required();
  query->add_option("query", text, "e.g. 'P(B | sigma(A=1), C=0)'")->required();

  auto* cf = app.add_subcommand("counterfactual", "Abduction, action and prediction on an scm model");
  cf->add_option("--model", model_path, "SCM model file")->required();
  cf->add_option("query", text, "e.g. 'P(Y^sigma(T=1) | T=0, Y=0)'")->required();

  auto* ident = app.add_subcommand("identify", "Rewrite a query into observational terms");
  ident->add_option("--model", model_path, "Model or graph file")->required();
  ident->add_option("query", text, "e.g. 'P(B | sigma(A=a))'")->required();
  ident->add_option("--budget", limit, "Maximum number of expanded states");
  ident->add_flag("--trace", trace, "Print the derivation to stderr");

  auto* graph = app.add_subcommand("graph", "Render the intervention graph");
  graph->add_option("--model", model_path, "Model or graph file")->required();
  graph->add_option("intervention", text, "e.g. 'sigma(A=a~)' or 'sigma(A->C:g)'");
  graph->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  graph->add_flag("--augmented", augmented, "Render the intervention augmented graph");

  auto* eval = app.add_subcommand("eval", "Evaluate an expression on the model's distribution");
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("expression", text, "e.g. 'sum{C}( P(B|A=1,C) * P(C) )'")->required();

  auto* ver = app.add_subcommand("verify", "Randomized check of an identity; JSON lines on stdout");
  ver->add_option("theorem", theorem, "Identity id (see --list)");
  ver->add_flag("--list", list, "List identity ids");
  ver->add_option("--seed", cfg.seed, "Base seed");
  ver->add_option("--trials", trials, "Number of random instances");
  ver->add_option("--nodes", cfg.n_nodes, "Nodes per random graph");
  ver->add_option("--edge-prob", cfg.edge_prob, "Edge probability");
  ver->add_option("--max-domain", cfg.max_domain, "Largest domain size");
  ver->add_option("--latent-prob", cfg.latent_prob, "Probability that a node is latent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input;
  }

  try {
    if (*query) return run_query(model_path, text);
    if (*cf) return run_counterfactual(model_path, text);
    if (*ident) return run_identify(model_path, text, limit, trace);
    if (*graph) return run_graph(model_path, text, format, augmented);
    if (*eval) return run_eval(model_path, text);
    if (*ver) {
      if (list) {
        for (const auto& id : theorem_ids()) std::cout << id << "\n";
        return ok;
      }
      if (theorem.empty()) throw Error(ErrorCode::config_error, "missing identity id");
      return run_verify(theorem, cfg, trials);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  }
  return ok;
}
