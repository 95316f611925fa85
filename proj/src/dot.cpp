#include "infocalc/dot.hpp"

#include <functional>

#include <json.hpp>

namespace infocalc {

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string node_label(const InterventionGraph& g, const std::string& n) {
  if (auto f = g.forced.find(n); f != g.forced.end()) return "X_" + n + "=" + f->second;
  if (auto c = g.counterfactual_labels.find(n); c != g.counterfactual_labels.end()) return c->second;
  return "X_" + n;
}

std::string render(const Dag& dag, const std::function<std::string(const std::string&)>& label,
                   const std::function<std::string(const Edge&)>& edge_label) {
  std::string out = "digraph G {\n";
  for (const auto& n : dag.nodes()) {
    out += "  " + quote(n) + " [label=" + quote(label(n));
    if (dag.is_latent(n)) out += ", style=dashed";
    out += "];\n";
  }
  for (const auto& e : dag.edges()) {
    std::vector<std::string> attrs;
    if (const std::string l = edge_label(e); !l.empty()) attrs.push_back("label=" + quote(l));
    if (dag.is_latent(e.tail)) attrs.push_back("style=dashed");
    out += "  " + quote(e.tail) + " -> " + quote(e.head);
    if (!attrs.empty()) {
      out += " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) out += (i ? ", " : "") + attrs[i];
      out += "]";
    }
    out += ";\n";
  }
  return out + "}\n";
}

}  // namespace

std::string to_dot(const InterventionGraph& g) {
  return render(
      g.dag, [&](const std::string& n) { return node_label(g, n); },
      [&](const Edge& e) {
        auto it = g.info_edge_labels.find(e);
        return it == g.info_edge_labels.end() ? std::string() : it->second;
      });
}

std::string to_dot(const Dag& dag) {
  InterventionGraph g;
  g.dag = dag;
  return to_dot(g);
}

std::string to_dot(const AugmentedDag& g) {
  std::map<std::string, std::string> labels;
  for (const auto& [e, name] : g.info_nodes) labels[name] = "N_" + e.tail + e.head;
  return render(
      g.graph,
      [&](const std::string& n) {
        auto it = labels.find(n);
        return it == labels.end() ? n : it->second;
      },
      [](const Edge&) { return std::string(); });
}

std::string to_json(const InterventionGraph& g) {
  nlohmann::ordered_json out;
  out["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.dag.nodes())
    out["nodes"].push_back({{"name", n}, {"label", node_label(g, n)}, {"latent", g.dag.is_latent(n)}});
  out["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.dag.edges()) {
    nlohmann::ordered_json j = {{"tail", e.tail}, {"head", e.head}};
    if (auto it = g.info_edge_labels.find(e); it != g.info_edge_labels.end()) j["label"] = it->second;
    out["edges"].push_back(j);
  }
  return out.dump(2) + "\n";
}

}  // namespace infocalc
