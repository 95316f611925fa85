#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "infocalc/errors.hpp"
#include "infocalc/oracle.hpp"
#include "support.hpp"

using namespace infocalc;

namespace {

Dag chain() { return Dag::build({"A", "B"}, {{"A", "B"}}); }

FactoredDistribution chain_model() { return binary_model(chain(), {{"A", {0.3}}, {"B", {0.2, 0.9}}}); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::model_error;
}

}  // namespace

TEST_CASE("joint is the product of factors") {
  const auto fd = chain_model();
  CHECK(joint(fd, {{"A", "1"}, {"B", "1"}}) == doctest::Approx(0.27));
  CHECK(joint(fd, {{"A", "0"}, {"B", "1"}}) == doctest::Approx(0.14));
  CHECK(code_of([&] { joint(fd, {{"A", "1"}}); }) == ErrorCode::partial_assignment);
  const ProbTable t = joint_table(fd);
  CHECK(t.total() == doctest::Approx(1.0));
  CHECK(t.nodes() == std::vector<std::string>{"A", "B"});
}

TEST_CASE("marginals and conditionals") {
  const auto fd = chain_model();
  const ProbTable b = marginal(fd, {"B"});
  CHECK(b.at({{"B", "1"}}) == doctest::Approx(0.7 * 0.2 + 0.3 * 0.9));
  const ProbTable a_given_b = conditional(fd, {"A"}, {{"B", "1"}});
  CHECK(a_given_b.at({{"A", "1"}}) == doctest::Approx(0.27 / 0.41));
  CHECK(code_of([&] { conditional(fd, {"A"}, {{"A", "1"}}); }) == ErrorCode::overlapping_sets);
}

TEST_CASE("zero-probability evidence is reported") {
  const auto fd = binary_model(chain(), {{"A", {0.0}}, {"B", {0.5, 0.5}}});
  CHECK(code_of([&] { conditional(fd, {"B"}, {{"A", "1"}}); }) == ErrorCode::zero_probability_evidence);
}

TEST_CASE("build validates the parameters") {
  const Dag g = chain();
  const Domains d{{"A", {"0", "1"}}, {"B", {"0", "1"}}};
  const Cpt a{"A", {}, {{{}, {0.5, 0.5}}}};
  const Cpt b{"B", {"A"}, {{{"0"}, {0.5, 0.5}}, {{"1"}, {0.1, 0.9}}}};
  CHECK_NOTHROW(FactoredDistribution::build(g, d, {a, b}));
  Cpt bad_sum = b;
  bad_sum.rows[{"1"}] = {0.2, 0.9};
  CHECK(code_of([&] { FactoredDistribution::build(g, d, {a, bad_sum}); }) == ErrorCode::domain_error);
  Cpt missing = b;
  missing.rows.erase({"1"});
  CHECK(code_of([&] { FactoredDistribution::build(g, d, {a, missing}); }) == ErrorCode::domain_error);
  Cpt parents = b;
  parents.parents = {};
  CHECK(code_of([&] { FactoredDistribution::build(g, d, {a, parents}); }) == ErrorCode::model_error);
  Cpt negative = b;
  negative.rows[{"1"}] = {-0.1, 1.1};
  CHECK(code_of([&] { FactoredDistribution::build(g, d, {a, negative}); }) == ErrorCode::domain_error);
  CHECK(code_of([&] { FactoredDistribution::build(g, {{"A", {"0", "0"}}, {"B", {"0", "1"}}}, {a, b}); }) ==
        ErrorCode::domain_error);
  CHECK(code_of([&] { FactoredDistribution::build(g, d, {a}); }) == ErrorCode::model_error);
}

TEST_CASE("cpt round-trips through the dense form") {
  const auto fd = chain_model();
  const Cpt b = fd.cpt("B");
  CHECK(b.parents == std::vector<std::string>{"A"});
  CHECK(b.rows.at({"1"})[1] == doctest::Approx(0.9));
}

TEST_CASE("table queries") {
  const ProbTable t({"A", "B"}, {{"0", "1"}, {"x", "y", "z"}}, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1});
  CHECK(t.probability({{"A", "1"}}) == doctest::Approx(0.6));
  CHECK(t.probability({{"B", "y"}}) == doctest::Approx(0.4));
  CHECK(t.assignment(4) == Assignment{{"A", "1"}, {"B", "y"}});
  CHECK(t.marginal({"B"}).at({{"B", "z"}}) == doctest::Approx(0.2));
  CHECK(t.conditional({"A"}, {{"B", "x"}}).at({{"A", "1"}}) == doctest::Approx(0.75));
}

TEST_CASE("marginals agree with string-keyed enumeration") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    InstanceConfig cfg;
    cfg.seed = seed;
    const auto fd = random_instance(cfg);
    Rng rng(seed);
    NodeSet keep, evidence;
    for (const auto& n : fd.dag().nodes()) {
      const auto r = rng.below(3);
      if (r == 0) keep.insert(n);
      if (r == 1) evidence.insert(n);
    }
    if (keep.empty()) continue;
    Assignment given;
    for (const auto& n : evidence) given[n] = fd.domain(n)[rng.below(fd.domain(n).size())];
    const auto ref = oracle::query(fd, InterventionSpec::generalized({}), keep, given);
    CHECK(deviation(conditional(fd, keep, given), ref) <= 1e-12);
    CHECK(joint_table(fd).total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("random instances are reproducible") {
  InstanceConfig cfg;
  cfg.seed = 42;
  const auto a = random_instance(cfg);
  const auto b = random_instance(cfg);
  CHECK(a.dag() == b.dag());
  CHECK(joint_table(a).probs() == joint_table(b).probs());
  cfg.n_nodes = 0;
  CHECK(code_of([&] { random_instance(cfg); }) == ErrorCode::config_error);
}
