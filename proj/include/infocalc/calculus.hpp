#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infocalc/distribution.hpp"
#include "infocalc/expression.hpp"
#include "infocalc/graph.hpp"
#include "infocalc/intervention.hpp"

namespace infocalc {

// Empty when the criterion holds, else a reason citing a path or node.
std::optional<std::string> backdoor_violation(const Dag& dag, const NodeSet& treatment, const NodeSet& outcome,
                                              const NodeSet& adjust);
std::optional<std::string> frontdoor_violation(const Dag& dag, const NodeSet& treatment, const NodeSet& outcome,
                                               const NodeSet& mediators);

// sum{C}( P(B|A=a,C) * P(C) ). Throws criterion_fails.
Expression backdoor_adjust(const Dag& dag, const Assignment& treatment, const NodeSet& outcome, const NodeSet& adjust);
// sum{C}( P(C|A=a) * sum{A}( P(B|A,C) * P(A) ) ). Throws criterion_fails.
Expression frontdoor_adjust(const Dag& dag, const Assignment& treatment, const NodeSet& outcome,
                            const NodeSet& mediators);

enum class Rule { observation = 1, exchange = 2, action = 3 };

// Graph in which the rule's d-separation is checked. For the action rule this
// is the info graph of A with arrows into C \ anc(D) removed, ancestry taken in
// the info graph.
Dag rule_graph(const Dag& dag, Rule rule, const NodeSet& a, const NodeSet& c, const NodeSet& d);

// Full rules:
//   observation: P(b|s(a),c,d) = P(b|s(a),d)
//   exchange:    P(b|s(a),s(c),d) = P(b|s(a),c,d)
//   action:      P(b|s(a),s(c),d) = P(b|s(a),d)
bool check_rule(const Dag& dag, Rule rule, const NodeSet& a, const NodeSet& b, const NodeSet& c, const NodeSet& d);

// Simplified rules:
//   observation: as above
//   exchange:    P(b|s(a),c) = P(b|a,c)    when B is separated from A given C in the info graph of A
//   action:      P(b|s(a)) = P(b)          when no directed path leads from A to B
bool check_rule_simple(const Dag& dag, Rule rule, const NodeSet& a, const NodeSet& b, const NodeSet& c,
                       const NodeSet& d = {});

// P(b|s(c1),s(c2),d) = P(b|s(c2),d) when B and C1 are separated given D in the info graph of C2.
bool check_stacked_deletion(const Dag& dag, const NodeSet& b, const NodeSet& c1, const NodeSet& c2, const NodeSet& d);
// P(b|s(c),d) = P(b|d) when no directed path leads from C into B ∪ D.
bool check_no_causal_path(const Dag& dag, const NodeSet& b, const NodeSet& c, const NodeSet& d);

// Both sides of the equivalence between the info-graph check of each rule and
// the corresponding check with A conditioned in the graph without arrows into A.
std::pair<bool, bool> check_equivalence(const Dag& dag, Rule which, const NodeSet& a, const NodeSet& b,
                                        const NodeSet& c, const NodeSet& d);

// Rules on the intervention augmented graph of F1:
//   observation: P(b|s(F1),c,d) = P(b|s(F1),d)          if B, C separated given D
//   action:      P(b|s(F1),s(F2),d) = P(b|s(F1),d)       if B, N_F2 separated given D with
//                arrows into N_F2 \ anc(D) removed
// Throws overlapping_info_nodes when F1 and F2 share an edge.
bool check_generalized_rule(const Dag& dag, Rule rule, const std::vector<InfoFunction>& f1,
                            const std::vector<InfoFunction>& f2, const NodeSet& b, const NodeSet& c,
                            const NodeSet& d);

// Closed form for an information function on the first edge of a front-door
// chain A -> C -> B: sum_C sum_A P(c | A = g(a)) P(b | c, a) P(a), as a table
// over the outcome. Uses only the observed marginal; `f.edge` is (A, C).
ProbTable info_edge_frontdoor(const FactoredDistribution& fd, const InfoFunction& f, const std::string& outcome);

struct IdentifyResult {
  std::optional<Expression> expression;
  std::size_t frontier = 0;
  std::size_t expanded = 0;
  std::vector<std::string> derivation;  // step label and expression after the step
};

inline constexpr std::size_t kDefaultBudget = 2000;

// Breadth-first rewriting of the leftmost interventional atom. Throws
// latent_queried, unknown_node.
IdentifyResult identify(const Dag& dag, const ProbAtom& query, std::size_t budget = kDefaultBudget);

// Drops evidence items of observational atoms that plain d-separation shows
// to be irrelevant.
Expression simplify(const Dag& dag, const Expression& e);

}  // namespace infocalc
