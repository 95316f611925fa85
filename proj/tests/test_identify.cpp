#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "infocalc/calculus.hpp"
#include "infocalc/errors.hpp"
#include "infocalc/oracle.hpp"
#include "infocalc/query.hpp"
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

ProbAtom atom(const std::string& text) { return to_atom(parse_query(text)); }

Dag backdoor() { return Dag::build({"A", "B", "C"}, {{"C", "A"}, {"C", "B"}, {"A", "B"}}); }
Dag frontdoor() { return Dag::build({"A", "B", "C", "D"}, {{"D", "A"}, {"D", "B"}, {"A", "C"}, {"C", "B"}}, {"D"}); }
Dag two_action() {
  return Dag::build({"A1", "A2", "B", "C", "D"},
                    {{"D", "C"}, {"D", "A2"}, {"A1", "C"}, {"C", "A2"}, {"A2", "B"}, {"C", "B"}}, {"D"});
}

}  // namespace

TEST_CASE("back-door graph") {
  const auto r = identify(backdoor(), atom("P(B|sigma(A=a))"));
  REQUIRE(r.expression);
  CHECK(to_string(*r.expression) == "sum{C}( P(B|A=a,C) * P(C) )");
  CHECK_FALSE(r.derivation.empty());
}

TEST_CASE("front-door graph") {
  const auto r = identify(frontdoor(), atom("P(B|sigma(A=a))"));
  REQUIRE(r.expression);
  CHECK(to_string(*r.expression) == "sum{C}( P(C|A=a) * sum{A}( P(B|A,C) * P(A) ) )");
}

TEST_CASE("two-action graph") {
  const auto r = identify(two_action(), atom("P(B|sigma(A1=a1),sigma(A2=a2),C)"));
  REQUIRE(r.expression);
  CHECK(to_string(*r.expression) == "P(B|A2=a2,C)");
}

TEST_CASE("do queries are identified through their info form") {
  const auto r = identify(backdoor(), atom("P(B|do(A=a))"));
  REQUIRE(r.expression);
  CHECK(to_string(*r.expression) == "sum{C}( P(B|A=a,C) * P(C) )");
}

TEST_CASE("observational queries come back unchanged") {
  const auto r = identify(backdoor(), atom("P(B|A=a)"));
  REQUIRE(r.expression);
  CHECK(to_string(*r.expression) == "P(B|A=a)");
}

TEST_CASE("a latent confounder of a direct effect is not identified") {
  const Dag bow = Dag::build({"A", "B", "U"}, {{"U", "A"}, {"U", "B"}, {"A", "B"}}, {"U"});
  const auto r = identify(bow, atom("P(B|sigma(A=a))"), 300);
  CHECK_FALSE(r.expression);
  CHECK(r.expanded <= 300);
}

TEST_CASE("identify rejects latent query nodes") {
  CHECK(code_of([] { identify(frontdoor(), atom("P(D|sigma(A=a))")); }) == ErrorCode::latent_queried);
  CHECK(code_of([] { identify(frontdoor(), atom("P(Q|sigma(A=a))")); }) == ErrorCode::unknown_node);
}

TEST_CASE("simplify drops separated evidence") {
  const Dag chain = Dag::build({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
  CHECK(to_string(simplify(chain, parse_expression("P(C|A,B)"))) == "P(C|B)");
  CHECK(to_string(simplify(chain, parse_expression("P(C|A)"))) == "P(C|A)");
}

TEST_CASE("identified expressions evaluate to the interventional answer") {
  struct Case {
    Dag g;
    std::string query;
    NodeSet target;
    Assignment sent, given;
  };
  const std::vector<Case> cases{
      {backdoor(), "P(B|sigma(A=1))", {"B"}, {{"A", "1"}}, {}},
      {frontdoor(), "P(B|sigma(A=1))", {"B"}, {{"A", "1"}}, {}},
      {two_action(), "P(B|sigma(A1=0),sigma(A2=1),C=1)", {"B"}, {{"A1", "0"}, {"A2", "1"}}, {{"C", "1"}}},
  };
  for (const auto& c : cases) {
    const auto r = identify(c.g, atom(c.query));
    REQUIRE(r.expression);
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      Rng rng(seed);
      Domains d;
      for (const auto& n : c.g.nodes()) d[n] = {"0", "1"};
      const auto fd = random_parameters(c.g, d, rng.next());
      Evaluator ev(fd);
      const auto ref = oracle::query(fd, InterventionSpec::info(c.sent), c.target, c.given);
      CHECK(deviation(ev.tabulate(*r.expression), ref) <= 1e-9);
    }
  }
}

TEST_CASE("whatever identify returns on random graphs is sound") {
  std::size_t found = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    InstanceConfig cfg;
    cfg.seed = seed;
    cfg.n_nodes = 4;
    cfg.max_domain = 2;
    cfg.latent_prob = 0.2;
    const auto fd = random_instance(cfg);
    const NodeSet obs = fd.dag().observed();
    if (obs.size() < 2) continue;
    const std::string a = *obs.begin();
    const std::string b = *obs.rbegin();
    const auto r = identify(fd.dag(), atom("P(" + b + "|sigma(" + a + "=1))"), 400);
    if (!r.expression) continue;
    ++found;
    CHECK(observational(*r.expression));
    Evaluator ev(fd);
    const auto ref = oracle::query(fd, InterventionSpec::info({{a, "1"}}), {b}, {});
    CHECK(deviation(ev.tabulate(*r.expression), ref) <= 1e-9);
  }
  CHECK(found >= 10);
}
