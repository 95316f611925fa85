#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infocalc {

enum class ErrorCode {
  cycle,
  unknown_node,
  duplicate_node,
  unknown_edge,
  overlapping_sets,
  name_collision,
  partial_assignment,
  domain_error,
  zero_probability_evidence,
  duplicate_edge_function,
  latent_queried,
  latent_intervention,
  non_markovian,
  size_error,
  criterion_fails,
  overlapping_info_nodes,
  config_error,
  unknown_theorem,
  parse_error,
  model_error,
};

std::string_view error_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace infocalc
