#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infocalc/expression.hpp"

namespace infocalc {

struct QueryItem {
  enum class Kind { do_, sigma, sigma_edge, observe };

  Kind kind = Kind::observe;
  std::string node;                  // tail for sigma_edge
  std::optional<std::string> value;  // absent for a bare node
  std::string head;                  // sigma_edge only
  std::string map;                   // sigma_edge only: named information map

  friend bool operator==(const QueryItem&, const QueryItem&) = default;
};

std::string to_string(const QueryItem& item);

// P( targets [ ^ modifiers ] | items )
struct Query {
  std::vector<Item> targets;
  std::vector<QueryItem> modifiers;
  std::vector<QueryItem> items;

  friend bool operator==(const Query&, const Query&) = default;
};

// Throws parse_error.
Query parse_query(std::string_view text);
std::string to_string(const Query& q);

// Parses the printed form of an Expression. Throws parse_error.
Expression parse_expression(std::string_view text);

// The query as a single atom: do/sigma value items become actions, observations
// become evidence. Throws parse_error on modifiers, mixed kinds or edge items.
ProbAtom to_atom(const Query& q);

}  // namespace infocalc
