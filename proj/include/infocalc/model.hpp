#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infocalc/distribution.hpp"
#include "infocalc/graph.hpp"
#include "infocalc/intervention.hpp"
#include "infocalc/query.hpp"
#include "infocalc/scm.hpp"

namespace infocalc {

// A named information map as declared in a model file. Shift and affine act
// on value positions within the tail's domain and must stay inside it.
struct InfoMapDecl {
  enum class Kind { table, constant, shift, affine };

  Kind kind = Kind::table;
  std::map<std::string, std::string> table;
  std::string value;  // constant
  long long mul = 1;  // affine; shift uses add only
  long long add = 0;
};

struct Model {
  enum class Kind { dag, scm };

  Kind kind = Kind::dag;
  Dag graph;
  Domains declared;  // only nodes whose domain was given
  std::optional<FactoredDistribution> distribution;
  std::optional<Scm> scm;
  std::map<std::string, InfoMapDecl> info_maps;

  bool has_parameters() const { return distribution || scm; }
  // The CPT form: the distribution itself, or the one induced by a Markovian
  // SCM. Throws model_error for graph-only models, non_markovian.
  FactoredDistribution parameters() const;
};

// Strict: unknown keys are rejected. Throws parse_error, model_error,
// domain_error and the graph errors.
Model parse_model(std::string_view json_text);
Model load_model(const std::string& path);

// Throws model_error for unknown names, domain_error when the image leaves
// the domain or the map needs a domain that was not declared.
InfoFunction resolve_info_map(const Model& model, const Edge& edge, const std::string& name);

// Intervention items of a query (do, sigma, sigma edge) as one spec. Value
// sigmas combined with edge sigmas become constant edge functions. Throws
// parse_error on mixed do/sigma and on observations, domain_error on values
// outside declared domains.
InterventionSpec build_spec(const Model& model, const std::vector<QueryItem>& items);

// Throws domain_error when a value is not in a declared domain.
void check_values(const Model& model, const Assignment& a);

}  // namespace infocalc
