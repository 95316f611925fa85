#include "infocalc/model.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "infocalc/errors.hpp"

namespace infocalc {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& why) { throw Error(ErrorCode::model_error, why); }

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
}

const json& need(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where + " is missing '" + key + "'");
  return *it;
}

std::string str(const json& v, const std::string& where) {
  if (!v.is_string()) bad(where + " must be a string");
  return v.get<std::string>();
}

std::vector<std::string> strings(const json& v, const std::string& where) {
  if (!v.is_array()) bad(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(str(x, where));
  return out;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) bad(where + " must be a number");
  return v.get<double>();
}

long long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) bad(where + " must be an integer");
  return v.get<long long>();
}

std::vector<std::string> split_key(const std::string& key, std::size_t arity) {
  std::vector<std::string> out;
  if (arity == 0) {
    if (!key.empty()) bad("row key '" + key + "' given for a node without parents");
    return out;
  }
  std::stringstream in(key);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(part);
  if (!key.empty() && key.back() == ',') out.push_back("");
  if (out.size() != arity) bad("row key '" + key + "' does not match " + std::to_string(arity) + " parents");
  return out;
}

const std::vector<std::string>& domain_of(const Domains& d, const std::string& node) {
  auto it = d.find(node);
  if (it == d.end()) bad("node " + node + " needs a domain");
  return it->second;
}

std::vector<std::string> parent_list(const json& v, const Dag& g, const std::string& node, const std::string& where) {
  auto parents = strings(v, where);
  const NodeSet declared(parents.begin(), parents.end());
  if (declared.size() != parents.size() || declared != g.parents(node))
    bad(where + " must list exactly the graph parents of " + node);
  return parents;
}

InfoMapDecl parse_info_map(const json& v, const std::string& name) {
  const std::string where = "info_maps." + name;
  only_keys(v, {"table", "constant", "shift", "affine"}, where);
  if (v.size() != 1) bad(where + " must have exactly one of table, constant, shift, affine");
  InfoMapDecl d;
  if (v.contains("table")) {
    d.kind = InfoMapDecl::Kind::table;
    const auto& t = v["table"];
    if (!t.is_object()) bad(where + ".table must be an object");
    for (const auto& [k, out] : t.items()) d.table[k] = str(out, where + ".table");
  } else if (v.contains("constant")) {
    d.kind = InfoMapDecl::Kind::constant;
    d.value = str(v["constant"], where + ".constant");
  } else if (v.contains("shift")) {
    d.kind = InfoMapDecl::Kind::shift;
    d.add = integer(v["shift"], where + ".shift");
  } else {
    d.kind = InfoMapDecl::Kind::affine;
    const auto& a = v["affine"];
    only_keys(a, {"mul", "add"}, where + ".affine");
    d.mul = integer(need(a, "mul", where + ".affine"), where + ".affine.mul");
    d.add = a.contains("add") ? integer(a["add"], where + ".affine.add") : 0;
  }
  return d;
}

FactoredDistribution parse_cpts(const json& cpts, const Dag& g, const Domains& domains) {
  if (!cpts.is_object()) bad("cpts must be an object");
  for (const auto& [k, v] : cpts.items())
    if (!g.contains(k)) throw Error(ErrorCode::unknown_node, "cpts." + k);
  std::vector<Cpt> out;
  for (const auto& node : g.nodes()) {
    const std::string where = "cpts." + node;
    auto it = cpts.find(node);
    if (it == cpts.end()) bad(where + " is missing");
    only_keys(*it, {"parents", "table"}, where);
    Cpt cpt{node, parent_list(need(*it, "parents", where), g, node, where + ".parents"), {}};
    domain_of(domains, node);
    const auto& table = need(*it, "table", where);
    if (!table.is_object()) bad(where + ".table must be an object");
    for (const auto& [key, row] : table.items()) {
      if (!row.is_array()) bad(where + ".table rows must be arrays");
      std::vector<double> probs;
      for (const auto& p : row) probs.push_back(number(p, where + ".table"));
      cpt.rows[split_key(key, cpt.parents.size())] = std::move(probs);
    }
    out.push_back(std::move(cpt));
  }
  return FactoredDistribution::build(g, domains, out);
}

Scm parse_scm(const json& doc, const Dag& g, const Domains& domains) {
  const auto& ex = need(doc, "exogenous", "scm model");
  if (!ex.is_object()) bad("exogenous must be an object");
  std::map<std::string, std::vector<double>> noise;
  for (const auto& [u, dist] : ex.items()) {
    if (!g.contains(u)) throw Error(ErrorCode::unknown_node, "exogenous." + u);
    const auto& dom = domain_of(domains, u);
    if (!dist.is_object()) bad("exogenous." + u + " must map values to probabilities");
    for (const auto& [value, p] : dist.items())
      if (std::find(dom.begin(), dom.end(), value) == dom.end())
        throw Error(ErrorCode::domain_error, "exogenous." + u + " value " + value + " is not in the domain");
    std::vector<double> probs;
    for (const auto& value : dom) {
      auto it = dist.find(value);
      probs.push_back(it == dist.end() ? 0.0 : number(*it, "exogenous." + u));
    }
    noise[u] = std::move(probs);
  }
  const auto& eqs = need(doc, "equations", "scm model");
  if (!eqs.is_object()) bad("equations must be an object");
  std::vector<StructuralEquation> out;
  for (const auto& [v, body] : eqs.items()) {
    const std::string where = "equations." + v;
    if (!g.contains(v)) throw Error(ErrorCode::unknown_node, where);
    only_keys(body, {"inputs", "table"}, where);
    StructuralEquation eq{v, parent_list(need(body, "inputs", where), g, v, where + ".inputs"), {}};
    const auto& table = need(body, "table", where);
    if (!table.is_object()) bad(where + ".table must be an object");
    for (const auto& [key, value] : table.items())
      eq.table[split_key(key, eq.inputs.size())] = str(value, where + ".table");
    out.push_back(std::move(eq));
  }
  for (const auto& n : g.nodes()) domain_of(domains, n);
  return Scm::build(g, domains, noise, out);
}

}  // namespace

FactoredDistribution Model::parameters() const {
  if (distribution) return *distribution;
  if (scm) return induced_distribution(*scm);
  throw Error(ErrorCode::model_error, "the model declares a graph only, without parameters");
}

Model parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
  only_keys(doc, {"version", "kind", "nodes", "edges", "cpts", "exogenous", "equations", "info_maps"}, "model");
  if (str(need(doc, "version", "model"), "version") != "1") bad("unsupported version");
  Model m;
  const std::string kind = str(need(doc, "kind", "model"), "kind");
  if (kind == "dag") {
    m.kind = Model::Kind::dag;
    if (doc.contains("exogenous") || doc.contains("equations")) bad("a dag model takes cpts, not exogenous/equations");
  } else if (kind == "scm") {
    m.kind = Model::Kind::scm;
    if (doc.contains("cpts")) bad("an scm model takes exogenous and equations, not cpts");
  } else {
    bad("kind must be \"dag\" or \"scm\"");
  }

  std::vector<std::string> names, latent;
  const auto& nodes = need(doc, "nodes", "model");
  if (!nodes.is_array()) bad("nodes must be an array");
  for (const auto& n : nodes) {
    only_keys(n, {"name", "domain", "latent"}, "node");
    const std::string name = str(need(n, "name", "node"), "node name");
    names.push_back(name);
    if (n.contains("domain")) m.declared[name] = strings(n["domain"], "domain of " + name);
    if (n.contains("latent")) {
      if (!n["latent"].is_boolean()) bad("latent of " + name + " must be a boolean");
      if (n["latent"].get<bool>()) latent.push_back(name);
    }
  }
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) bad("edges must be an array");
    for (const auto& e : doc["edges"]) {
      auto pair = strings(e, "edge");
      if (pair.size() != 2) bad("edges are [tail, head] pairs");
      edges.push_back({pair[0], pair[1]});
    }
  }
  m.graph = Dag::build(names, edges, latent);

  if (doc.contains("info_maps")) {
    if (!doc["info_maps"].is_object()) bad("info_maps must be an object");
    for (const auto& [name, v] : doc["info_maps"].items()) m.info_maps[name] = parse_info_map(v, name);
  }
  if (m.kind == Model::Kind::dag && doc.contains("cpts")) m.distribution = parse_cpts(doc["cpts"], m.graph, m.declared);
  if (m.kind == Model::Kind::scm) m.scm = parse_scm(doc, m.graph, m.declared);
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::model_error, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

InfoFunction resolve_info_map(const Model& model, const Edge& edge, const std::string& name) {
  auto it = model.info_maps.find(name);
  if (it == model.info_maps.end()) throw Error(ErrorCode::model_error, "no information map named " + name);
  const InfoMapDecl& d = it->second;
  auto dom = model.declared.find(edge.tail);
  InfoFunction f{edge, {}, name};
  if (dom == model.declared.end()) {
    // Graph-only use: enough to tell constant maps from the rest.
    if (d.kind == InfoMapDecl::Kind::constant) f.map[d.value] = d.value;
    else if (d.kind == InfoMapDecl::Kind::table) f.map = d.table;
    else throw Error(ErrorCode::domain_error, "map " + name + " needs the domain of " + edge.tail);
    return f;
  }
  const auto& values = dom->second;
  const long long k = static_cast<long long>(values.size());
  for (long long i = 0; i < k; ++i) {
    const std::string& x = values[static_cast<std::size_t>(i)];
    switch (d.kind) {
      case InfoMapDecl::Kind::table: {
        auto t = d.table.find(x);
        if (t == d.table.end()) throw Error(ErrorCode::domain_error, "map " + name + " has no image for " + x);
        f.map[x] = t->second;
        break;
      }
      case InfoMapDecl::Kind::constant:
        f.map[x] = d.value;
        break;
      case InfoMapDecl::Kind::shift:
      case InfoMapDecl::Kind::affine: {
        const long long j = (d.kind == InfoMapDecl::Kind::shift ? i : i * d.mul) + d.add;
        if (j < 0 || j >= k)
          throw Error(ErrorCode::domain_error, "map " + name + " sends " + x + " outside the domain of " + edge.tail);
        f.map[x] = values[static_cast<std::size_t>(j)];
        break;
      }
    }
  }
  validate(f, values);
  return f;
}

void check_values(const Model& model, const Assignment& a) {
  for (const auto& [node, value] : a) {
    model.graph.index_of(node);
    auto dom = model.declared.find(node);
    if (dom == model.declared.end()) continue;
    if (std::find(dom->second.begin(), dom->second.end(), value) == dom->second.end())
      throw Error(ErrorCode::domain_error, value + " is not in the domain of " + node);
  }
}

InterventionSpec build_spec(const Model& model, const std::vector<QueryItem>& items) {
  Assignment forced, sent;
  std::vector<InfoFunction> functions;
  for (const auto& i : items) {
    switch (i.kind) {
      case QueryItem::Kind::observe:
        throw Error(ErrorCode::parse_error, "observation " + to_string(i) + " where an intervention was expected");
      case QueryItem::Kind::do_:
      case QueryItem::Kind::sigma: {
        if (!i.value) throw Error(ErrorCode::parse_error, to_string(i) + " needs a value");
        auto& into = i.kind == QueryItem::Kind::do_ ? forced : sent;
        if (!into.emplace(i.node, *i.value).second)
          throw Error(ErrorCode::overlapping_sets, i.node + " is intervened on twice");
        break;
      }
      case QueryItem::Kind::sigma_edge:
        functions.push_back(resolve_info_map(model, {i.node, i.head}, i.map));
        break;
    }
  }
  check_values(model, forced);
  check_values(model, sent);
  if (!forced.empty() && (!sent.empty() || !functions.empty()))
    throw Error(ErrorCode::parse_error, "do and sigma cannot be mixed in one query");
  if (!forced.empty()) return InterventionSpec::do_(forced);
  if (functions.empty()) return sent.empty() ? InterventionSpec::generalized({}) : InterventionSpec::info(sent);
  for (const auto& [node, value] : sent) {
    model.graph.index_of(node);
    for (const auto& child : model.graph.children(node)) {
      InfoFunction f{{node, child}, {}, {}};
      auto dom = model.declared.find(node);
      if (dom != model.declared.end()) f = InfoFunction::constant(f.edge, dom->second, value);
      else f.map[value] = value;
      functions.push_back(std::move(f));
    }
  }
  return InterventionSpec::generalized(std::move(functions));
}

}  // namespace infocalc
