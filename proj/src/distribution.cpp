#include "infocalc/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infocalc/errors.hpp"

namespace infocalc {

std::string to_string(const Assignment& a) {
  std::string out;
  for (const auto& [k, v] : a) {
    if (!out.empty()) out += ",";
    out += k + "=" + v;
  }
  return out;
}

ProbTable::ProbTable(std::vector<std::string> nodes, std::vector<std::vector<std::string>> domains,
                     std::vector<double> probs)
    : nodes_(std::move(nodes)), domains_(std::move(domains)), probs_(std::move(probs)) {
  strides_.assign(nodes_.size(), 1);
  std::size_t size = 1;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    strides_[i] = size;
    size *= domains_[i].size();
  }
  if (size != probs_.size())
    throw Error(ErrorCode::model_error, "probability table has " + std::to_string(probs_.size()) +
                                            " entries, expected " + std::to_string(size));
}

std::size_t ProbTable::position(const std::string& node) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i] == node) return i;
  throw Error(ErrorCode::unknown_node, node + " not in table");
}

std::size_t ProbTable::value_index(std::size_t pos, const std::string& value) const {
  const auto& dom = domains_[pos];
  for (std::size_t i = 0; i < dom.size(); ++i)
    if (dom[i] == value) return i;
  throw Error(ErrorCode::domain_error, value + " not in domain of " + nodes_[pos]);
}

double ProbTable::at(const Assignment& full) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto it = full.find(nodes_[i]);
    if (it == full.end()) throw Error(ErrorCode::partial_assignment, "missing " + nodes_[i]);
    flat += strides_[i] * value_index(i, it->second);
  }
  return probs_[flat];
}

std::vector<std::size_t> ProbTable::decode(std::size_t flat) const {
  std::vector<std::size_t> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out[i] = flat / strides_[i];
    flat %= strides_[i];
  }
  return out;
}

Assignment ProbTable::assignment(std::size_t flat) const {
  Assignment out;
  const auto idx = decode(flat);
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[nodes_[i]] = domains_[i][idx[i]];
  return out;
}

double ProbTable::probability(const Assignment& partial) const {
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& [node, value] : partial) {
    const std::size_t pos = position(node);
    fixed.emplace_back(pos, value_index(pos, value));
  }
  double sum = 0.0;
  for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
    bool match = true;
    for (const auto& [pos, v] : fixed)
      if ((flat / strides_[pos]) % domains_[pos].size() != v) {
        match = false;
        break;
      }
    if (match) sum += probs_[flat];
  }
  return sum;
}

double ProbTable::total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

ProbTable ProbTable::marginal(const NodeSet& keep) const {
  std::vector<std::size_t> kept_pos;
  for (const auto& k : keep) kept_pos.push_back(position(k));
  std::sort(kept_pos.begin(), kept_pos.end());
  std::vector<std::string> nodes;
  std::vector<std::vector<std::string>> domains;
  for (std::size_t p : kept_pos) {
    nodes.push_back(nodes_[p]);
    domains.push_back(domains_[p]);
  }
  std::vector<std::size_t> out_strides(kept_pos.size(), 1);
  std::size_t size = 1;
  for (std::size_t i = kept_pos.size(); i-- > 0;) {
    out_strides[i] = size;
    size *= domains[i].size();
  }
  std::vector<double> probs(size, 0.0);
  for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < kept_pos.size(); ++i)
      out += out_strides[i] * ((flat / strides_[kept_pos[i]]) % domains_[kept_pos[i]].size());
    probs[out] += probs_[flat];
  }
  return ProbTable(std::move(nodes), std::move(domains), std::move(probs));
}

ProbTable ProbTable::conditional(const NodeSet& target, const Assignment& given) const {
  for (const auto& [node, value] : given)
    if (target.count(node)) throw Error(ErrorCode::overlapping_sets, node + " is both target and evidence");
  NodeSet keep = target;
  for (const auto& [node, value] : given) keep.insert(node);
  const ProbTable joint = marginal(keep);
  const double evidence = joint.probability(given);
  if (evidence <= kZeroEvidence)
    throw Error(ErrorCode::zero_probability_evidence, "P(" + to_string(given) + ") = 0");

  const ProbTable shape = marginal(target);
  std::vector<double> probs(shape.size());
  for (std::size_t flat = 0; flat < shape.size(); ++flat) {
    Assignment a = shape.assignment(flat);
    a.insert(given.begin(), given.end());
    probs[flat] = joint.at(a) / evidence;
  }
  return ProbTable(shape.nodes(), shape.domains(), std::move(probs));
}

FactoredDistribution FactoredDistribution::build(Dag dag, const Domains& domains,
                                                 const std::vector<Cpt>& cpts, double tolerance) {
  FactoredDistribution fd;
  const std::size_t n = dag.size();
  fd.domains_.resize(n);
  fd.value_lookup_.resize(n);
  for (const auto& [node, dom] : domains) dag.index_of(node);
  for (std::size_t v = 0; v < n; ++v) {
    auto it = domains.find(dag.name(v));
    if (it == domains.end() || it->second.empty())
      throw Error(ErrorCode::domain_error, "node " + dag.name(v) + " has no domain");
    fd.domains_[v] = it->second;
    for (std::size_t i = 0; i < it->second.size(); ++i)
      if (!fd.value_lookup_[v].emplace(it->second[i], i).second)
        throw Error(ErrorCode::domain_error, "duplicate value " + it->second[i] + " for " + dag.name(v));
  }

  fd.tables_.assign(n, {});
  std::vector<char> seen(n, 0);
  for (const auto& cpt : cpts) {
    const std::size_t v = dag.index_of(cpt.node);
    if (seen[v]) throw Error(ErrorCode::model_error, "two CPTs for " + cpt.node);
    seen[v] = 1;
    if (NodeSet(cpt.parents.begin(), cpt.parents.end()) != dag.parents(cpt.node) ||
        cpt.parents.size() != dag.parent_indices(v).size())
      throw Error(ErrorCode::model_error, "CPT parents of " + cpt.node + " differ from graph parents");

    const auto& parents = dag.parent_indices(v);
    // Position of each graph-order parent inside the CPT's own parent list.
    std::vector<std::size_t> order(parents.size());
    for (std::size_t k = 0; k < parents.size(); ++k)
      for (std::size_t j = 0; j < cpt.parents.size(); ++j)
        if (cpt.parents[j] == dag.name(parents[k])) order[k] = j;

    std::vector<std::size_t> radix;
    for (std::size_t p : parents) radix.push_back(fd.domains_[p].size());
    const std::size_t card = fd.domains_[v].size();
    std::size_t rows = 1;
    for (std::size_t r : radix) rows *= r;
    auto& table = fd.tables_[v];
    table.assign(rows * card, 0.0);
    if (cpt.rows.size() != rows)
      throw Error(ErrorCode::domain_error, "CPT of " + cpt.node + " has " + std::to_string(cpt.rows.size()) +
                                               " rows, expected " + std::to_string(rows));

    std::size_t row = 0;
    for_each_state(radix, [&](const std::vector<std::size_t>& pv) {
      std::vector<std::string> key(cpt.parents.size());
      for (std::size_t k = 0; k < parents.size(); ++k) key[order[k]] = fd.domains_[parents[k]][pv[k]];
      auto it = cpt.rows.find(key);
      if (it == cpt.rows.end())
        throw Error(ErrorCode::domain_error, "CPT of " + cpt.node + " is missing a parent row");
      const auto& probs = it->second;
      if (probs.size() != card)
        throw Error(ErrorCode::domain_error, "CPT row of " + cpt.node + " has wrong length");
      double sum = 0.0;
      for (std::size_t i = 0; i < card; ++i) {
        if (!(probs[i] >= 0.0)) throw Error(ErrorCode::domain_error, "negative probability in CPT of " + cpt.node);
        table[row * card + i] = probs[i];
        sum += probs[i];
      }
      if (std::abs(sum - 1.0) > tolerance)
        throw Error(ErrorCode::domain_error, "CPT row of " + cpt.node + " sums to " + std::to_string(sum));
      ++row;
    });
  }
  for (std::size_t v = 0; v < n; ++v)
    if (!seen[v]) throw Error(ErrorCode::model_error, "no CPT for " + dag.name(v));
  fd.dag_ = std::move(dag);
  return fd;
}

const std::vector<std::string>& FactoredDistribution::domain(const std::string& node) const {
  return domains_[dag_.index_of(node)];
}

Domains FactoredDistribution::domains() const {
  Domains out;
  for (std::size_t v = 0; v < dag_.size(); ++v) out[dag_.name(v)] = domains_[v];
  return out;
}

std::size_t FactoredDistribution::value_index(std::size_t node, const std::string& value) const {
  auto it = value_lookup_[node].find(value);
  if (it == value_lookup_[node].end())
    throw Error(ErrorCode::domain_error, value + " not in domain of " + dag_.name(node));
  return it->second;
}

double FactoredDistribution::factor(std::size_t node, std::size_t value,
                                    std::span<const std::size_t> parent_values) const {
  const auto& parents = dag_.parent_indices(node);
  std::size_t row = 0;
  for (std::size_t k = 0; k < parents.size(); ++k) row = row * domains_[parents[k]].size() + parent_values[k];
  return tables_[node][row * domains_[node].size() + value];
}

Cpt FactoredDistribution::cpt(const std::string& node) const {
  const std::size_t v = dag_.index_of(node);
  Cpt out;
  out.node = node;
  const auto& parents = dag_.parent_indices(v);
  std::vector<std::size_t> radix;
  for (std::size_t p : parents) {
    out.parents.push_back(dag_.name(p));
    radix.push_back(domains_[p].size());
  }
  const std::size_t card = domains_[v].size();
  std::size_t row = 0;
  for_each_state(radix, [&](const std::vector<std::size_t>& pv) {
    std::vector<std::string> key;
    for (std::size_t k = 0; k < parents.size(); ++k) key.push_back(domains_[parents[k]][pv[k]]);
    out.rows[key] = std::vector<double>(tables_[v].begin() + row * card, tables_[v].begin() + (row + 1) * card);
    ++row;
  });
  return out;
}

std::vector<std::size_t> FactoredDistribution::encode(const Assignment& total) const {
  std::vector<std::size_t> state(dag_.size());
  for (std::size_t v = 0; v < dag_.size(); ++v) {
    auto it = total.find(dag_.name(v));
    if (it == total.end()) throw Error(ErrorCode::partial_assignment, "missing " + dag_.name(v));
    state[v] = value_index(v, it->second);
  }
  for (const auto& [node, value] : total) dag_.index_of(node);
  return state;
}

void for_each_state(const std::vector<std::size_t>& radix,
                    const std::function<void(const std::vector<std::size_t>&)>& visit) {
  for (std::size_t r : radix)
    if (r == 0) return;
  std::vector<std::size_t> state(radix.size(), 0);
  while (true) {
    visit(state);
    std::size_t i = radix.size();
    while (i > 0) {
      --i;
      if (++state[i] < radix[i]) break;
      state[i] = 0;
      if (i == 0) return;
    }
    if (radix.empty()) return;
  }
}

std::vector<std::size_t> domain_sizes(const FactoredDistribution& fd) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < fd.dag().size(); ++v) out.push_back(fd.domain(v).size());
  return out;
}

namespace {

double product_at(const FactoredDistribution& fd, const std::vector<std::size_t>& state) {
  const Dag& g = fd.dag();
  double p = 1.0;
  std::vector<std::size_t> pv;
  for (std::size_t k = 0; k < g.size(); ++k) {
    pv.clear();
    for (std::size_t parent : g.parent_indices(k)) pv.push_back(state[parent]);
    p *= fd.factor(k, state[k], pv);
  }
  return p;
}

std::vector<std::vector<std::string>> all_domains(const FactoredDistribution& fd) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t v = 0; v < fd.dag().size(); ++v) out.push_back(fd.domain(v));
  return out;
}

}  // namespace

double joint(const FactoredDistribution& fd, const Assignment& x) { return product_at(fd, fd.encode(x)); }

ProbTable joint_table(const FactoredDistribution& fd) {
  std::vector<double> probs;
  for_each_state(domain_sizes(fd), [&](const std::vector<std::size_t>& s) { probs.push_back(product_at(fd, s)); });
  const auto nodes = fd.dag().nodes();
  return ProbTable(std::vector<std::string>(nodes.begin(), nodes.end()), all_domains(fd), std::move(probs));
}

ProbTable marginal(const FactoredDistribution& fd, const NodeSet& keep) {
  fd.dag().require_nodes(keep);
  return joint_table(fd).marginal(keep);
}

ProbTable conditional(const FactoredDistribution& fd, const NodeSet& target, const Assignment& given) {
  fd.dag().require_nodes(target);
  for (const auto& [node, value] : given) fd.value_index(fd.dag().index_of(node), value);
  return joint_table(fd).conditional(target, given);
}

}  // namespace infocalc
