#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infocalc/distribution.hpp"
#include "infocalc/intervention.hpp"

namespace infocalc {

// A node mention. Without a value it refers to the node's current binding
// (a free variable or a summation index).
struct Item {
  std::string node;
  std::optional<std::string> value;

  friend auto operator<=>(const Item&, const Item&) = default;
  friend bool operator==(const Item&, const Item&) = default;
};

std::string to_string(const Item& item);

enum class ActionKind { info, do_ };

// P(targets | actions, given). Item lists are kept sorted by node.
struct ProbAtom {
  std::vector<Item> targets;
  std::vector<Item> actions;
  ActionKind action_kind = ActionKind::info;
  std::vector<Item> given;

  NodeSet target_nodes() const;
  NodeSet action_nodes() const;
  NodeSet given_nodes() const;
  bool interventional() const { return !actions.empty(); }

  // Sorts item lists. Throws overlapping_sets if a node is both target and
  // evidence or repeats within a list. An action may share its node with a
  // target or evidence item (the value it sends is then that item's value).
  void normalize();
  bool disjoint() const;

  friend bool operator==(const ProbAtom&, const ProbAtom&) = default;
};

std::string to_string(const ProbAtom& atom);

struct Expression {
  enum class Kind { atom, sum, product };

  Kind kind = Kind::atom;
  ProbAtom atom;
  std::vector<std::string> sum_over;  // sum only, sorted
  std::vector<Expression> children;   // sum: exactly one; product: two or more

  static Expression of(ProbAtom atom);
  static Expression sum(std::vector<std::string> over, Expression body);
  // Flattens nested products; a single factor is returned as is.
  static Expression product(std::vector<Expression> factors);

  friend bool operator==(const Expression&, const Expression&) = default;
};

std::string to_string(const Expression& e);

// Bare items not bound by an enclosing sum.
NodeSet free_variables(const Expression& e);

// True when no atom carries an action.
bool observational(const Expression& e);

// Evaluates expressions against one distribution, caching marginals and
// intervention distributions across calls.
class Evaluator {
 public:
  explicit Evaluator(const FactoredDistribution& fd);

  // `env` binds every free variable. Throws zero_probability_evidence,
  // domain_error, unknown_node.
  double evaluate(const Expression& e, const Assignment& env);
  double evaluate(const ProbAtom& atom, const Assignment& env);

  // Table over the free variables (sorted).
  ProbTable tabulate(const Expression& e);

 private:
  const ProbTable& marginal_of(const NodeSet& nodes);
  const ProbTable& intervened(const InterventionSpec& spec, const std::string& key);
  double sum_over(const Expression& e, Assignment& env, std::size_t i);

  const FactoredDistribution& fd_;
  ProbTable joint_;
  std::map<NodeSet, ProbTable> marginals_;
  std::map<std::string, ProbTable> intervened_;
};

}  // namespace infocalc
