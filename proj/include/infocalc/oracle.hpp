#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "infocalc/distribution.hpp"
#include "infocalc/scm.hpp"

namespace infocalc {

struct InstanceConfig {
  std::uint64_t seed = 1;
  std::size_t n_nodes = 5;
  double edge_prob = 0.4;
  std::size_t max_domain = 3;
  double latent_prob = 0.0;
};

// Throws config_error.
void validate(const InstanceConfig& cfg);

// Portable generator: std::mt19937_64 with fixed conversions, so identical
// seeds give identical instances on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();                              // [0, 1)
  std::size_t below(std::size_t n);              // [0, n)
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Nodes X0..X{n-1}, random order, Bernoulli edges; domains of size 2..max
// with values "0".."k-1"; rows are normalized uniform positives.
FactoredDistribution random_instance(const InstanceConfig& cfg);

// Random CPTs on a fixed graph.
FactoredDistribution random_parameters(const Dag& dag, const Domains& domains, std::uint64_t seed);
Domains random_domains(const Dag& dag, std::size_t max_domain, Rng& rng);

// Markovian: one private noise parent U_X per endogenous X.
Scm random_scm(const InstanceConfig& cfg);

struct TrialRecord {
  std::uint64_t seed = 0;
  bool held = false;
  double deviation = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::string theorem;
  std::size_t trials = 0;
  std::size_t held = 0;
  double max_deviation = 0.0;
  double tolerance = kDefaultTolerance;
  std::vector<TrialRecord> records;
  std::vector<TrialRecord> failures;

  bool inconclusive(std::size_t min_held = 10) const { return held < min_held; }
  bool passed(std::size_t min_held = 10) const { return failures.empty() && !inconclusive(min_held); }
};

std::vector<std::string> theorem_ids();

// Throws unknown_theorem, config_error.
VerificationReport verify(const std::string& theorem, const InstanceConfig& cfg, std::size_t trials,
                          double tolerance = kDefaultTolerance);

// One JSON object per trial, then a summary object.
std::string to_json_lines(const VerificationReport& report);

}  // namespace infocalc
