#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "infocalc/distribution.hpp"
#include "infocalc/graph.hpp"
#include "infocalc/intervention.hpp"

namespace infocalc {

inline constexpr std::size_t kMaxExogenousStates = std::size_t{1} << 20;

struct StructuralEquation {
  std::string node;
  std::vector<std::string> inputs;
  std::map<std::vector<std::string>, std::string> table;
};

// Structural causal model over V ∪ U. Exogenous nodes are exactly the keys of
// the exogenous distribution map; they must be roots.
class Scm {
 public:
  Scm() = default;

  // Throws model_error, domain_error, unknown_node.
  static Scm build(Dag graph, const Domains& domains, const std::map<std::string, std::vector<double>>& exogenous,
                   const std::vector<StructuralEquation>& equations, double tolerance = kDefaultTolerance);

  const Dag& graph() const { return graph_; }
  const Domains& domains() const { return domains_; }
  const std::vector<std::string>& domain(const std::string& node) const;
  const NodeSet& exogenous() const { return exogenous_; }
  const NodeSet& endogenous() const { return endogenous_; }
  const std::vector<double>& noise(const std::string& u) const { return noise_.at(u); }
  const StructuralEquation& equation(const std::string& v) const { return equations_.at(v); }
  const std::vector<std::string>& solve_order() const { return order_; }

  // The endogenous part of the graph.
  Dag endogenous_graph() const;

  // Same model with one equation table swapped; inputs must be unchanged.
  Scm with_table(const std::string& node, std::map<std::vector<std::string>, std::string> table) const;

 private:
  Dag graph_;
  Domains domains_;
  NodeSet exogenous_;
  NodeSet endogenous_;
  std::map<std::string, std::vector<double>> noise_;
  std::map<std::string, StructuralEquation> equations_;
  std::vector<std::string> order_;
};

Assignment evaluate(const Scm& scm, const Assignment& u);
Assignment do_evaluate(const Scm& scm, const Assignment& u, const Assignment& forced);
Assignment info_evaluate(const Scm& scm, const Assignment& u, const Assignment& sent);
Assignment generalized_info_evaluate(const Scm& scm, const Assignment& u, const std::vector<InfoFunction>& functions);
Assignment evaluate(const Scm& scm, const Assignment& u, const InterventionSpec& spec);

// The intervened model as a model: children of the intervened nodes get
// rewritten tables. Stacking these composes interventions.
Scm info_intervened(const Scm& scm, const Assignment& sent);
Scm generalized_intervened(const Scm& scm, const std::vector<InfoFunction>& functions);
Scm do_intervened(const Scm& scm, const Assignment& forced);

// Visits every total exogenous assignment with its probability, in
// lexicographic order. Throws size_error past kMaxExogenousStates.
void for_each_noise(const Scm& scm, const std::function<void(const Assignment&, double)>& visit);

// Throws non_markovian.
FactoredDistribution induced_distribution(const Scm& scm);

// Distribution of the (intervened) endogenous variables under P_U.
ProbTable pushforward(const Scm& scm, const InterventionSpec& spec);
ProbTable pushforward(const Scm& scm);

// Abduction, action, prediction. Throws zero_probability_evidence.
ProbTable counterfactual_query(const Scm& scm, const Assignment& evidence, const InterventionSpec& spec,
                               const NodeSet& target);

}  // namespace infocalc
