#pragma once

// Reference intervention distributions computed straight from the CPT input
// form with string keys, sharing nothing with the library's index arithmetic.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "infocalc/distribution.hpp"
#include "infocalc/intervention.hpp"

namespace oracle {

using infocalc::Assignment;

inline std::vector<Assignment> all_states(const infocalc::Domains& domains) {
  std::vector<Assignment> out{{}};
  for (const auto& [node, values] : domains) {
    std::vector<Assignment> next;
    for (const auto& partial : out)
      for (const auto& v : values) {
        Assignment a = partial;
        a[node] = v;
        next.push_back(a);
      }
    out = std::move(next);
  }
  return out;
}

// Value seen by `child` through its parent slot `parent` under `spec`.
inline std::string slot(const infocalc::InterventionSpec& spec, const Assignment& x, const std::string& parent,
                        const std::string& child) {
  using K = infocalc::InterventionSpec::Kind;
  if (spec.kind() == K::info) {
    auto it = spec.assignment().find(parent);
    if (it != spec.assignment().end()) return it->second;
  }
  if (spec.kind() == K::generalized_info)
    for (const auto& f : spec.functions())
      if (f.edge.tail == parent && f.edge.head == child) return f.map.at(x.at(parent));
  return x.at(parent);
}

inline std::map<Assignment, double> joint(const infocalc::FactoredDistribution& fd,
                                          const infocalc::InterventionSpec& spec) {
  using K = infocalc::InterventionSpec::Kind;
  std::map<Assignment, double> out;
  for (const auto& x : all_states(fd.domains())) {
    double p = 1.0;
    for (const auto& node : fd.dag().nodes()) {
      if (spec.kind() == K::do_) {
        auto it = spec.assignment().find(node);
        if (it != spec.assignment().end()) {
          p *= x.at(node) == it->second ? 1.0 : 0.0;
          continue;
        }
      }
      const infocalc::Cpt cpt = fd.cpt(node);
      std::vector<std::string> key;
      for (const auto& parent : cpt.parents) key.push_back(slot(spec, x, parent, node));
      const auto& dom = fd.domain(node);
      std::size_t v = 0;
      while (dom[v] != x.at(node)) ++v;
      p *= cpt.rows.at(key)[v];
    }
    out[x] = p;
  }
  return out;
}

inline std::map<Assignment, double> query(const infocalc::FactoredDistribution& fd,
                                          const infocalc::InterventionSpec& spec, const infocalc::NodeSet& target,
                                          const Assignment& given) {
  std::map<Assignment, double> num;
  double den = 0.0;
  for (const auto& [x, p] : joint(fd, spec)) {
    bool match = true;
    for (const auto& [k, v] : given) match = match && x.at(k) == v;
    if (!match) continue;
    den += p;
    Assignment t;
    for (const auto& n : target) t[n] = x.at(n);
    num[t] += p;
  }
  if (den <= 0.0) throw std::runtime_error("zero evidence");
  for (auto& [t, p] : num) p /= den;
  return num;
}

}  // namespace oracle
