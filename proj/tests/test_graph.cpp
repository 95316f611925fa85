#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "infocalc/errors.hpp"
#include "infocalc/graph.hpp"
#include "infocalc/oracle.hpp"
#include "support.hpp"

using namespace infocalc;

namespace {

Dag front() { return Dag::build({"A", "B", "C", "D"}, {{"D", "A"}, {"D", "B"}, {"A", "C"}, {"C", "B"}}, {"D"}); }

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

TEST_CASE("build validates the graph") {
  CHECK(code_of([] { Dag::build({"A", "B"}, {{"A", "B"}, {"B", "A"}}); }) == ErrorCode::cycle);
  CHECK(code_of([] { Dag::build({"A", "A"}, {}); }) == ErrorCode::duplicate_node);
  CHECK(code_of([] { Dag::build({"A"}, {{"A", "Z"}}); }) == ErrorCode::unknown_node);
  CHECK(code_of([] { Dag::build({"A"}, {}, {"Q"}); }) == ErrorCode::unknown_node);
  CHECK(code_of([] { Dag::build({"A"}, {{"A", "A"}}); }) == ErrorCode::cycle);
}

TEST_CASE("nodes are sorted and adjacency is deterministic") {
  const Dag g = Dag::build({"C", "A", "B"}, {{"C", "A"}, {"A", "B"}, {"C", "B"}});
  CHECK(std::vector<std::string>(g.nodes().begin(), g.nodes().end()) == std::vector<std::string>{"A", "B", "C"});
  CHECK(g.topological_order() == std::vector<std::string>{"C", "A", "B"});
  CHECK(g.parents("B") == NodeSet{"A", "C"});
  CHECK(g.children("C") == NodeSet{"A", "B"});
}

TEST_CASE("relatives") {
  const Dag g = front();
  CHECK(relatives(g, {"A"}, Relation::descendants) == NodeSet{"B", "C"});
  CHECK(relatives(g, {"B"}, Relation::ancestors) == NodeSet{"A", "C", "D"});
  CHECK(relatives(g, {"A", "C"}, Relation::children) == NodeSet{"B", "C"});
  CHECK(relatives(g, {"A"}, Relation::parents) == NodeSet{"D"});
}

TEST_CASE("d-separation on small graphs") {
  const Dag g = front();
  CHECK_FALSE(d_separated(g, {"A"}, {"B"}, {}));
  CHECK_FALSE(d_separated(g, {"A"}, {"B"}, {"C"}));
  CHECK(d_separated(g, {"A"}, {"B"}, {"C", "D"}));
  CHECK(d_separated(g, {"C"}, {"D"}, {"A"}));
  const Dag collider = Dag::build({"X", "Y", "Z", "W"}, {{"X", "Z"}, {"Y", "Z"}, {"Z", "W"}});
  CHECK(d_separated(collider, {"X"}, {"Y"}, {}));
  CHECK_FALSE(d_separated(collider, {"X"}, {"Y"}, {"Z"}));
  CHECK_FALSE(d_separated(collider, {"X"}, {"Y"}, {"W"}));
  CHECK(d_separated(g, {}, {"B"}, {}));
  CHECK(code_of([&] { d_separated(g, {"A"}, {"A"}, {}); }) == ErrorCode::overlapping_sets);
  CHECK(code_of([&] { d_separated(g, {"A"}, {"Q"}, {}); }) == ErrorCode::unknown_node);
}

TEST_CASE("active path explains a connection") {
  const Dag g = front();
  auto p = active_path(g, {"A"}, {"B"}, {"C"});
  REQUIRE(p);
  CHECK(*p == std::vector<std::string>{"A", "D", "B"});
  CHECK_FALSE(active_path(g, {"A"}, {"B"}, {"C", "D"}));
}

TEST_CASE("d-separation agrees with path enumeration on random graphs") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    InstanceConfig cfg;
    cfg.seed = seed;
    cfg.n_nodes = 6;
    cfg.max_domain = 1;
    cfg.edge_prob = 0.45;
    const Dag g = random_instance(cfg).dag();
    const auto ref = to_oracle(g);
    Rng rng(seed);
    for (int t = 0; t < 40; ++t) {
      NodeSet x, y, z;
      for (const auto& n : g.nodes()) {
        switch (rng.below(4)) {
          case 0: x.insert(n); break;
          case 1: y.insert(n); break;
          case 2: z.insert(n); break;
          default: break;
        }
      }
      CHECK(d_separated(g, x, y, z) == oracle::d_separated(ref, x, y, z));
    }
  }
}

TEST_CASE("surgeries") {
  const Dag g = front();
  const Dag in = remove_incoming(g, {"A"});
  CHECK_FALSE(in.has_edge("D", "A"));
  CHECK(in.has_edge("A", "C"));
  const Dag out = remove_outgoing(g, {"A"});
  CHECK_FALSE(out.has_edge("A", "C"));
  CHECK(out.has_edge("D", "A"));
  CHECK(out.latent() == g.latent());
  CHECK(has_directed_path(g, {"A"}, {"B"}));
  CHECK_FALSE(has_directed_path(g, {"B"}, {"A"}));
  CHECK_FALSE(has_directed_path(out, {"A"}, {"B"}));
}

TEST_CASE("augmented graph splices one information node per edge") {
  const Dag g = front();
  const AugmentedDag aug = augment(g);
  CHECK(aug.graph.size() == g.size() + g.edges().size());
  CHECK(aug.graph.edges().size() == 2 * g.edges().size());
  const std::string n_ac = aug.info_node({"A", "C"});
  CHECK(aug.graph.has_edge("A", n_ac));
  CHECK(aug.graph.has_edge(n_ac, "C"));
  CHECK(aug.graph.is_latent(aug.info_node({"D", "A"})));
  CHECK_FALSE(aug.graph.is_latent(n_ac));
  // Separation among base nodes is unchanged by the splice.
  CHECK(d_separated(aug.graph, {"A"}, {"B"}, {"C", "D"}));
  CHECK_FALSE(d_separated(aug.graph, {"A"}, {"B"}, {"C"}));

  const AugmentedDag cut = intervention_augmented(g, {{{"A", "C"}, true}});
  CHECK_FALSE(cut.graph.has_edge("A", n_ac));
  CHECK(cut.graph.has_edge(n_ac, "C"));
  const AugmentedDag kept = intervention_augmented(g, {{{"A", "C"}, false}});
  CHECK(kept.graph.has_edge("A", n_ac));
  CHECK(code_of([&] { intervention_augmented(g, {{{"C", "A"}, true}}); }) == ErrorCode::unknown_edge);
}

TEST_CASE("augmenting rejects a base node named like an information node") {
  const Dag g = Dag::build({"A", "B", info_node_name({"A", "B"})}, {{"A", "B"}});
  CHECK(code_of([&] { augment(g); }) == ErrorCode::name_collision);
}

TEST_CASE("augmentation preserves separation of base nodes on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    InstanceConfig cfg;
    cfg.seed = seed;
    cfg.n_nodes = 5;
    cfg.max_domain = 1;
    const Dag g = random_instance(cfg).dag();
    const Dag aug = augment(g).graph;
    Rng rng(seed + 100);
    for (int t = 0; t < 20; ++t) {
      NodeSet x, y, z;
      for (const auto& n : g.nodes()) {
        const auto r = rng.below(4);
        if (r == 0) x.insert(n);
        if (r == 1) y.insert(n);
        if (r == 2) z.insert(n);
      }
      CHECK(d_separated(g, x, y, z) == d_separated(aug, x, y, z));
    }
  }
}
