#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <set>
#include <sstream>

#include "infocalc/errors.hpp"
#include "infocalc/oracle.hpp"

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

InstanceConfig small() {
  InstanceConfig cfg;
  cfg.seed = 3;
  cfg.n_nodes = 4;
  return cfg;
}

}  // namespace

TEST_CASE("generator is deterministic and respects the configuration") {
  InstanceConfig cfg;
  cfg.seed = 42;
  cfg.n_nodes = 6;
  cfg.max_domain = 4;
  cfg.latent_prob = 0.3;
  const auto a = random_instance(cfg);
  const auto b = random_instance(cfg);
  CHECK(a.dag() == b.dag());
  CHECK(a.domains() == b.domains());
  CHECK(joint_table(a).probs() == joint_table(b).probs());
  CHECK(a.dag().size() == 6);
  for (const auto& n : a.dag().nodes()) {
    CHECK(a.domain(n).size() >= 2);
    CHECK(a.domain(n).size() <= 4);
  }
  cfg.seed = 43;
  CHECK_FALSE(joint_table(random_instance(cfg)).probs() == joint_table(a).probs());
}

TEST_CASE("rng helpers stay in range") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(3) < 3);
  }
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("configuration errors") {
  InstanceConfig cfg;
  cfg.n_nodes = 0;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::config_error);
  cfg.n_nodes = 9;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::config_error);
  cfg = {};
  cfg.edge_prob = 1.5;
  CHECK(code_of([&] { verify("factual-joint", cfg, 1); }) == ErrorCode::config_error);
  cfg = {};
  cfg.max_domain = 5;
  CHECK(code_of([&] { validate(cfg); }) == ErrorCode::config_error);
  CHECK(code_of([] { verify("no-such-identity", {}, 1); }) == ErrorCode::unknown_theorem);
}

TEST_CASE("every registered identity holds on a short run") {
  const auto ids = theorem_ids();
  CHECK(ids.size() == std::set<std::string>(ids.begin(), ids.end()).size());
  for (const auto& id : ids) {
    const auto r = verify(id, small(), 25);
    CHECK_MESSAGE(r.failures.empty(), id);
    CHECK(r.trials == 25);
    CHECK(r.records.size() == 25);
    CHECK(r.held <= r.trials);
  }
}

TEST_CASE("verification is reproducible") {
  const auto a = verify("rule-exchange", small(), 30);
  const auto b = verify("rule-exchange", small(), 30);
  CHECK(to_json_lines(a) == to_json_lines(b));
}

TEST_CASE("pass, fail and inconclusive") {
  const auto ok = verify("factual-joint", small(), 20);
  CHECK(ok.passed());
  CHECK(ok.max_deviation == 0.0);
  const auto few = verify("factual-joint", small(), 5);
  CHECK(few.inconclusive());
  CHECK_FALSE(few.passed());
  // A negative tolerance rejects every trial that ran.
  const auto strict = verify("factual-marginal", small(), 20, -1.0);
  CHECK(strict.failures.size() == strict.held);
  CHECK_FALSE(strict.passed());
}

TEST_CASE("json lines carry one record per trial and a summary") {
  const auto r = verify("backdoor", small(), 12);
  std::istringstream in(to_json_lines(r));
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  REQUIRE(rows.size() == 13);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(rows[i]["theorem"] == "backdoor");
    CHECK(rows[i]["trial"] == i);
    CHECK(rows[i]["seed"] == r.records[i].seed);
    CHECK(rows[i].contains("held"));
    CHECK(rows[i].contains("deviation"));
  }
  const auto& s = rows.back();
  CHECK(s["summary"] == true);
  CHECK(s["trials"] == 12);
  CHECK(s["held"] == r.held);
  CHECK(s["status"] == "PASS");
  CHECK(s["failures"].empty());

  const auto bad = verify("backdoor", small(), 12, -1.0);
  std::istringstream in2(to_json_lines(bad));
  std::string last;
  while (std::getline(in2, line)) last = line;
  const auto summary = nlohmann::json::parse(last);
  CHECK(summary["status"] == "FAIL");
  CHECK(summary["failures"].size() == bad.failures.size());
}
