#pragma once

#include <string>

#include "infocalc/graph.hpp"
#include "infocalc/intervention.hpp"

namespace infocalc {

// Nodes then edges, each sorted. Latent nodes and edges leaving them are
// dashed; forced nodes read X_A=v, counterfactual nodes carry their label.
std::string to_dot(const InterventionGraph& g);
std::string to_dot(const Dag& dag);
// Information nodes are labelled N_jk.
std::string to_dot(const AugmentedDag& g);

std::string to_json(const InterventionGraph& g);

}  // namespace infocalc
