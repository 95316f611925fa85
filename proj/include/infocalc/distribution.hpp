#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "infocalc/graph.hpp"

namespace infocalc {

// Node -> value. Partial unless stated otherwise.
using Assignment = std::map<std::string, std::string>;
using Domains = std::map<std::string, std::vector<std::string>>;

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kZeroEvidence = 1e-12;

std::string to_string(const Assignment& a);

// Dense probability table over an ordered list of nodes. Entries are laid out
// in mixed radix with the last node varying fastest, so flat order equals
// lexicographic order of domain indices.
class ProbTable {
 public:
  ProbTable() : probs_(1, 1.0) {}
  ProbTable(std::vector<std::string> nodes, std::vector<std::vector<std::string>> domains,
            std::vector<double> probs);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<std::vector<std::string>>& domains() const { return domains_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  double at(const Assignment& full) const;
  double at_index(std::size_t flat) const { return probs_[flat]; }
  std::vector<std::size_t> decode(std::size_t flat) const;
  Assignment assignment(std::size_t flat) const;

  // Sum of entries consistent with a partial assignment over a subset of nodes().
  double probability(const Assignment& partial) const;
  double total() const;

  ProbTable marginal(const NodeSet& keep) const;
  // Throws overlapping_sets, zero_probability_evidence.
  ProbTable conditional(const NodeSet& target, const Assignment& given) const;

 private:
  std::size_t position(const std::string& node) const;
  std::size_t value_index(std::size_t pos, const std::string& value) const;

  std::vector<std::string> nodes_;
  std::vector<std::vector<std::string>> domains_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
};

// Input form of a conditional probability table: one probability vector over
// the node's domain for every tuple of parent values (in `parents` order).
struct Cpt {
  std::string node;
  std::vector<std::string> parents;
  std::map<std::vector<std::string>, std::vector<double>> rows;
};

// Causal DAG with a CPT per node (latent nodes included). Immutable.
class FactoredDistribution {
 public:
  FactoredDistribution() = default;

  // Throws domain_error (bad domains, unnormalized rows, missing rows),
  // model_error (parent list differs from the graph) or unknown_node.
  static FactoredDistribution build(Dag dag, const Domains& domains, const std::vector<Cpt>& cpts,
                                    double tolerance = kDefaultTolerance);

  const Dag& dag() const { return dag_; }
  const std::vector<std::string>& domain(const std::string& node) const;
  const std::vector<std::string>& domain(std::size_t index) const { return domains_[index]; }
  Domains domains() const;
  std::size_t value_index(std::size_t node, const std::string& value) const;

  // Dense CPT access keyed by graph indices. `parent_values[k]` is the value
  // index of dag().parent_indices(node)[k].
  double factor(std::size_t node, std::size_t value, std::span<const std::size_t> parent_values) const;

  // Rebuilds the input form, parents in graph order.
  Cpt cpt(const std::string& node) const;

  // Total assignment as value indices in graph order.
  std::vector<std::size_t> encode(const Assignment& total) const;

 private:
  Dag dag_;
  std::vector<std::vector<std::string>> domains_;
  std::vector<std::map<std::string, std::size_t>> value_lookup_;
  // Per node: row-major over parents in graph order, domain-size entries per row.
  std::vector<std::vector<double>> tables_;
};

// Product of CPT lookups at a total assignment. Throws partial_assignment.
double joint(const FactoredDistribution& fd, const Assignment& x);

// Visits every total assignment (as value indices in graph order) in
// lexicographic order.
void for_each_state(const std::vector<std::size_t>& radix,
                    const std::function<void(const std::vector<std::size_t>&)>& visit);

std::vector<std::size_t> domain_sizes(const FactoredDistribution& fd);

// Full joint over all graph nodes, latent included.
ProbTable joint_table(const FactoredDistribution& fd);
ProbTable marginal(const FactoredDistribution& fd, const NodeSet& keep);
ProbTable conditional(const FactoredDistribution& fd, const NodeSet& target, const Assignment& given);

}  // namespace infocalc
