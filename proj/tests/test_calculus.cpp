#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "infocalc/calculus.hpp"
#include "infocalc/errors.hpp"
#include "infocalc/oracle.hpp"
#include "support.hpp"

using namespace infocalc;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::model_error;
}

Dag backdoor() { return Dag::build({"A", "B", "C"}, {{"C", "A"}, {"C", "B"}, {"A", "B"}}); }
Dag frontdoor() { return Dag::build({"A", "B", "C", "D"}, {{"D", "A"}, {"D", "B"}, {"A", "C"}, {"C", "B"}}, {"D"}); }
Dag two_action() {
  return Dag::build({"A1", "A2", "B", "C", "D"},
                    {{"D", "C"}, {"D", "A2"}, {"A1", "C"}, {"C", "A2"}, {"A2", "B"}, {"C", "B"}}, {"D"});
}

const std::vector<std::string> kBinary{"0", "1"};

}  // namespace

TEST_CASE("back-door criterion") {
  const Dag g = backdoor();
  CHECK_FALSE(backdoor_violation(g, {"A"}, {"B"}, {"C"}));
  auto why = backdoor_violation(g, {"A"}, {"B"}, {});
  REQUIRE(why);
  CHECK(why->find("A <- C -> B") != std::string::npos);
  const Dag longer = Dag::build({"A", "B", "C", "M"}, {{"C", "A"}, {"C", "B"}, {"A", "M"}, {"M", "B"}});
  CHECK(backdoor_violation(longer, {"A"}, {"B"}, {"C", "M"}));
  CHECK(to_string(backdoor_adjust(g, {{"A", "a"}}, {"B"}, {"C"})) == "sum{C}( P(B|A=a,C) * P(C) )");
  CHECK(code_of([&] { backdoor_adjust(g, {{"A", "a"}}, {"B"}, {}); }) == ErrorCode::criterion_fails);
}

TEST_CASE("front-door criterion") {
  const Dag g = frontdoor();
  CHECK_FALSE(frontdoor_violation(g, {"A"}, {"B"}, {"C"}));
  CHECK(to_string(frontdoor_adjust(g, {{"A", "a"}}, {"B"}, {"C"})) ==
        "sum{C}( P(C|A=a) * sum{A}( P(B|A,C) * P(A) ) )");
  const Dag leaky = Dag::build({"A", "B", "C", "D"}, {{"D", "A"}, {"D", "B"}, {"A", "C"}, {"C", "B"}, {"A", "B"}}, {"D"});
  CHECK(frontdoor_violation(leaky, {"A"}, {"B"}, {"C"}));
  const Dag confounded_mediator =
      Dag::build({"A", "B", "C", "D"}, {{"D", "A"}, {"D", "C"}, {"A", "C"}, {"C", "B"}}, {"D"});
  CHECK(frontdoor_violation(confounded_mediator, {"A"}, {"B"}, {"C"}));
  CHECK(code_of([&] { frontdoor_adjust(leaky, {{"A", "a"}}, {"B"}, {"C"}); }) == ErrorCode::criterion_fails);
}

TEST_CASE("adjustment formulas match enumeration") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    for (const Dag& g : {backdoor(), frontdoor()}) {
      const Domains d = random_domains(g, 3, rng);
      const auto fd = random_parameters(g, d, rng.next());
      const std::string a = d.at("A").back();
      const Expression e = g.contains("D") ? frontdoor_adjust(g, {{"A", a}}, {"B"}, {"C"})
                                           : backdoor_adjust(g, {{"A", a}}, {"B"}, {"C"});
      Evaluator ev(fd);
      const auto ref = oracle::query(fd, InterventionSpec::info({{"A", a}}), {"B"}, {});
      CHECK(deviation(ev.tabulate(e), ref) <= 1e-9);
    }
  }
}

TEST_CASE("rules on the two-action graph") {
  const Dag g = two_action();
  // sigma(A1) can be dropped given C because A1 is an ancestor of C.
  CHECK(check_rule(g, Rule::action, {"A2"}, {"B"}, {"A1"}, {"C"}));
  // sigma(A2) becomes an observation once C is given.
  CHECK(check_rule(g, Rule::exchange, {}, {"B"}, {"A2"}, {"C"}));
  CHECK_FALSE(check_rule(g, Rule::exchange, {}, {"B"}, {"A2"}, {}));
  CHECK(check_rule(g, Rule::observation, {"C"}, {"B"}, {"A1"}, {}));
  CHECK_FALSE(check_rule(g, Rule::observation, {}, {"B"}, {"A1"}, {}));
  CHECK(rule_graph(g, Rule::exchange, {}, {"A2"}, {"C"}).has_edge("C", "A2"));
  CHECK_FALSE(rule_graph(g, Rule::exchange, {}, {"A2"}, {"C"}).has_edge("A2", "B"));
}

TEST_CASE("simplified rules and stacked deletion") {
  const Dag g = backdoor();
  CHECK(check_rule_simple(g, Rule::exchange, {"A"}, {"B"}, {"C"}));
  CHECK_FALSE(check_rule_simple(g, Rule::exchange, {"A"}, {"B"}, {}));
  CHECK(check_rule_simple(g, Rule::action, {"B"}, {"A"}, {}));
  CHECK_FALSE(check_rule_simple(g, Rule::action, {"A"}, {"B"}, {}));
  const Dag f = frontdoor();
  CHECK(check_no_causal_path(f, {"A"}, {"C"}, {}));
  CHECK_FALSE(check_no_causal_path(f, {"B"}, {"A"}, {}));
  CHECK(check_stacked_deletion(f, {"B"}, {"A"}, {"C"}, {"D"}));
  CHECK_FALSE(check_stacked_deletion(f, {"B"}, {"A"}, {"C"}, {}));
}

TEST_CASE("graphical conditions imply the distributional identities") {
  std::size_t held = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    InstanceConfig cfg;
    cfg.seed = seed;
    const auto fd = random_instance(cfg);
    Rng rng(seed * 31);
    NodeSet a, b, c, d;
    for (const auto& n : fd.dag().nodes()) {
      const auto r = rng.below(5);
      if (r == 0) a.insert(n);
      if (r == 1) b.insert(n);
      if (r == 2) c.insert(n);
      if (r == 3) d.insert(n);
    }
    if (b.empty() || c.empty()) continue;
    auto pick = [&](const NodeSet& s) {
      Assignment x;
      for (const auto& n : s) x[n] = fd.domain(n)[rng.below(fd.domain(n).size())];
      return x;
    };
    const Assignment xa = pick(a), xc = pick(c), xd = pick(d);
    Assignment cd = xc;
    cd.insert(xd.begin(), xd.end());
    Assignment ac = xa;
    ac.insert(xc.begin(), xc.end());
    const auto info_a = InterventionSpec::info(xa);
    const auto info_ac = InterventionSpec::info(ac);
    if (check_rule(fd.dag(), Rule::observation, a, b, c, d)) {
      ++held;
      CHECK(deviation(intervention_query(fd, info_a, b, cd), oracle::query(fd, info_a, b, xd)) <= 1e-9);
    }
    if (check_rule(fd.dag(), Rule::exchange, a, b, c, d)) {
      ++held;
      CHECK(deviation(intervention_query(fd, info_ac, b, xd), oracle::query(fd, info_a, b, cd)) <= 1e-9);
    }
    if (check_rule(fd.dag(), Rule::action, a, b, c, d)) {
      ++held;
      CHECK(deviation(intervention_query(fd, info_ac, b, xd), oracle::query(fd, info_a, b, xd)) <= 1e-9);
    }
  }
  CHECK(held >= 20);
}

TEST_CASE("info-graph checks agree with the conditioned checks on small graphs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    InstanceConfig cfg;
    cfg.seed = seed;
    cfg.n_nodes = 4;
    cfg.max_domain = 1;
    const Dag g = random_instance(cfg).dag();
    std::vector<std::size_t> roles(g.size(), 0);
    while (true) {
      NodeSet s[5];
      for (std::size_t i = 0; i < roles.size(); ++i) s[roles[i]].insert(g.name(i));
      for (Rule r : {Rule::observation, Rule::exchange, Rule::action}) {
        const auto [lhs, rhs] = check_equivalence(g, r, s[1], s[2], s[3], s[4]);
        CHECK(lhs == rhs);
      }
      std::size_t k = 0;
      while (k < roles.size() && roles[k] == 4) roles[k++] = 0;
      if (k == roles.size()) break;
      ++roles[k];
    }
  }
}

TEST_CASE("rules on augmented graphs") {
  const Dag g = frontdoor();
  const InfoFunction flip{{"A", "C"}, {{"0", "1"}, {"1", "0"}}, {}};
  const InfoFunction constant = InfoFunction::constant({"A", "C"}, kBinary, "1");
  CHECK(check_generalized_rule(g, Rule::action, {}, {flip}, {"B"}, {}, {"A", "C"}));
  CHECK_FALSE(check_generalized_rule(g, Rule::action, {}, {flip}, {"B"}, {}, {}));
  CHECK(check_generalized_rule(g, Rule::observation, {constant}, {}, {"C"}, {"A"}, {}));
  CHECK_FALSE(check_generalized_rule(g, Rule::observation, {flip}, {}, {"C"}, {"A"}, {}));
  CHECK(code_of([&] { check_generalized_rule(g, Rule::action, {flip}, {constant}, {"B"}, {}, {}); }) ==
        ErrorCode::overlapping_info_nodes);
  CHECK(code_of([&] { check_generalized_rule(g, Rule::action, {}, {flip, flip}, {"B"}, {}, {}); }) ==
        ErrorCode::duplicate_edge_function);
}

TEST_CASE("closed form for an information function on the first front-door edge") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const Dag g = frontdoor();
    const Domains d = random_domains(g, 3, rng);
    const auto fd = random_parameters(g, d, rng.next());
    InfoFunction f{{"A", "C"}, {}, {}};
    for (const auto& v : d.at("A")) f.map[v] = d.at("A")[rng.below(d.at("A").size())];
    const auto ref = oracle::query(fd, InterventionSpec::generalized({f}), {"B"}, {});
    CHECK(deviation(info_edge_frontdoor(fd, f, "B"), ref) <= 1e-9);
  }
}
