#pragma once

#include <cmath>
#include <map>
#include <string>

#include "infocalc/distribution.hpp"
#include "infocalc/graph.hpp"
#include "oracles/enumerate.hpp"
#include "oracles/path_dsep.hpp"

inline oracle::Graph to_oracle(const infocalc::Dag& g) {
  oracle::Graph out;
  out.nodes.assign(g.nodes().begin(), g.nodes().end());
  for (const auto& e : g.edges()) out.arcs.insert({e.tail, e.head});
  return out;
}

// Max |a - b| over all entries of a table against a reference map keyed by
// the table's own nodes.
inline double deviation(const infocalc::ProbTable& t, const std::map<infocalc::Assignment, double>& ref) {
  double d = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto it = ref.find(t.assignment(i));
    d = std::max(d, std::abs(t.at_index(i) - (it == ref.end() ? 0.0 : it->second)));
  }
  return d;
}

inline double deviation(const infocalc::ProbTable& a, const infocalc::ProbTable& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.at_index(i) - b.at(a.assignment(i))));
  return d;
}

inline infocalc::FactoredDistribution binary_model(const infocalc::Dag& g,
                                                   const std::map<std::string, std::vector<double>>& one_prob) {
  // one_prob[node][row] = P(node = 1 | parent row), rows in lexicographic order of graph parents.
  infocalc::Domains d;
  for (const auto& n : g.nodes()) d[n] = {"0", "1"};
  std::vector<infocalc::Cpt> cpts;
  for (const auto& n : g.nodes()) {
    infocalc::Cpt c{n, {}, {}};
    for (const auto& p : g.parents(n)) c.parents.push_back(p);
    const auto& probs = one_prob.at(n);
    for (std::size_t r = 0; r < probs.size(); ++r) {
      std::vector<std::string> key;
      for (std::size_t k = 0; k < c.parents.size(); ++k)
        key.push_back(((r >> (c.parents.size() - 1 - k)) & 1) ? "1" : "0");
      c.rows[key] = {1.0 - probs[r], probs[r]};
    }
    cpts.push_back(c);
  }
  return infocalc::FactoredDistribution::build(g, d, cpts);
}
