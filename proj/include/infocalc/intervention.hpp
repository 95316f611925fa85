#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "infocalc/distribution.hpp"
#include "infocalc/graph.hpp"

namespace infocalc {

// Per-edge information function sigma_jk: domain(j) -> domain(j), stored as a
// value table. Edge j->k receives map(x_j) instead of x_j.
struct InfoFunction {
  Edge edge;
  std::map<std::string, std::string> map;
  std::string name;  // presentation only

  bool is_constant() const;
  // Throws domain_error when `value` has no image.
  const std::string& apply(const std::string& value) const;

  static InfoFunction constant(Edge edge, const std::vector<std::string>& domain, const std::string& value);
  static InfoFunction identity(Edge edge, const std::vector<std::string>& domain);
};

// Throws domain_error unless `f` is total over `domain` with images inside it.
void validate(const InfoFunction& f, const std::vector<std::string>& domain);

class InterventionSpec {
 public:
  enum class Kind { do_, info, generalized_info };

  static InterventionSpec do_(Assignment assignment);
  static InterventionSpec info(Assignment assignment);
  static InterventionSpec generalized(std::vector<InfoFunction> functions);

  Kind kind() const { return kind_; }
  // Do/Info: values forced or sent. Empty for GeneralizedInfo.
  const Assignment& assignment() const { return assignment_; }
  const std::vector<InfoFunction>& functions() const { return functions_; }

  // A for Do/Info, A_F = {j : (j,k) in F} for GeneralizedInfo.
  NodeSet sources() const;

  // Info on A rewritten as constant functions on every edge out of A.
  InterventionSpec as_generalized(const Dag& dag, const Domains& domains) const;

 private:
  Kind kind_ = Kind::info;
  Assignment assignment_;
  std::vector<InfoFunction> functions_;
};

// Throws unknown_node, unknown_edge, duplicate_edge_function, latent_intervention
// and, when domains are supplied, domain_error.
void validate(const InterventionSpec& spec, const Dag& dag, const Domains* domains);

// Forced values set the intervened factors to indicators.
ProbTable do_distribution(const FactoredDistribution& fd, const Assignment& forced);
// Every factor kept; parent slots fed by A read the sent value.
ProbTable info_distribution(const FactoredDistribution& fd, const Assignment& sent);
// Parent slot (j,k) in F reads sigma_jk(x_j).
ProbTable generalized_info_distribution(const FactoredDistribution& fd,
                                        const std::vector<InfoFunction>& functions);
ProbTable intervention_distribution(const FactoredDistribution& fd, const InterventionSpec& spec);

// Single entry of info_distribution(fd, sent) at total state `x` (graph-order
// value indices). Multiplies factors in graph order, exactly as joint() does.
double info_probability(const FactoredDistribution& fd, const Assignment& sent,
                        const std::vector<std::size_t>& x);

// Post-surgery graph plus presentation metadata for rendering.
struct InterventionGraph {
  Dag dag;
  std::map<std::string, std::string> counterfactual_labels;
  std::set<Edge> info_edges;
  std::map<Edge, std::string> info_edge_labels;
  Assignment forced;  // do-intervened nodes and their values
};

InterventionGraph intervention_graph(const Dag& dag, const InterventionSpec& spec);

// P(x_B | spec, x_given) as a table over `target`. Targets and evidence must be
// observed nodes. Throws latent_queried, overlapping_sets, zero_probability_evidence.
ProbTable intervention_query(const FactoredDistribution& fd, const InterventionSpec& spec,
                             const NodeSet& target, const Assignment& given);

}  // namespace infocalc
