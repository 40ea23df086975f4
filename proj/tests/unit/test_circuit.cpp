#include "oracles.hpp"

#include "qsched/circuit.hpp"
#include "qsched/errors.hpp"
#include "qsched/rng.hpp"
#include "qsched/serialize.hpp"

#include <doctest.h>

#include <memory>

using namespace qsched;

TEST_CASE("generator: one full-density layer on two qubits is a single CX") {
  const auto c = generateRandomCircuit(2, 1, 1.0, 7);
  REQUIRE(c.gates().size() == 1);
  CHECK(c.gates()[0].kind == GateKind::CX);
  const auto& q = c.gates()[0].qubits;
  CHECK(std::min(q[0], q[1]) == 0);
  CHECK(std::max(q[0], q[1]) == 1);
  CHECK(c.depth() == 1);
}

TEST_CASE("generator: zero density on one qubit gives a serial chain") {
  const auto c = generateRandomCircuit(1, 3, 0.0, 0);
  REQUIRE(c.gates().size() == 3);
  for (const auto& g : c.gates()) {
    CHECK(g == Gate::single(0));
  }
  CHECK(c.depth() == 3);
}

TEST_CASE("generator: seed 42 circuit matches the frozen fixture") {
  const auto c = generateRandomCircuit(5, 10, 0.3, 42);
  CHECK(c.depth() >= 8);
  CHECK(c.depth() <= 12);
  const auto golden = circuitFromJson(readJsonFile(QSCHED_FIXTURE_DIR "/circuit_q5_d10_seed42.json"));
  CHECK(c == golden);
  CHECK(c.depth() == oracle::depth(golden.gates()));
}

TEST_CASE("generator: same seed gives the same gate list, depth is a fixed point") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int q = rng.uniformInt(1, 12);
    const int d = rng.uniformInt(1, 20);
    const double density = q > 1 ? rng.uniform(0.0, 1.0) : 0.0;
    const auto seed = rng.next();
    const auto a = generateRandomCircuit(q, d, density, seed);
    const auto b = generateRandomCircuit(q, d, density, seed);
    CHECK(a == b);
    CHECK(a.depth() == d);
    CHECK(computeDepth(a) == a.depth());
    CHECK(oracle::depth(a.gates()) == a.depth());
  }
}

TEST_CASE("generator rejects bad arguments") {
  CHECK_THROWS_AS(generateRandomCircuit(0, 3, 0.3, 1), ValidationError);
  CHECK_THROWS_AS(generateRandomCircuit(3, 0, 0.3, 1), ValidationError);
  CHECK_THROWS_AS(generateRandomCircuit(3, 3, 1.5, 1), ValidationError);
}

TEST_CASE("depth of small hand-built circuits") {
  CHECK(computeDepth(1, {Gate::single(0), Gate::single(0), Gate::single(0)}) == 3);
  CHECK(computeDepth(2, {Gate::single(0), Gate::single(1)}) == 1);
  CHECK(computeDepth(3, {Gate::single(0), Gate::cx(0, 1), Gate::single(2), Gate::cx(1, 2)}) == 3);
  CHECK_THROWS_AS(computeDepth(2, {}), ValidationError);
}

TEST_CASE("depth agrees with the DAG oracle on arbitrary gate orders") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int q = rng.uniformInt(2, 8);
    std::vector<Gate> gates;
    const int n = rng.uniformInt(1, 40);
    for (int i = 0; i < n; ++i) {
      const int a = rng.uniformInt(0, q - 1);
      int b = rng.uniformInt(0, q - 2);
      b += b >= a ? 1 : 0;
      gates.push_back(rng.bernoulli(0.4) ? Gate::cx(a, b) : Gate::single(a));
    }
    CHECK(computeDepth(q, gates) == oracle::depth(gates));
  }
}

TEST_CASE("circuit rejects malformed gates") {
  CHECK_THROWS_AS(Circuit("c", 2, {Gate::cx(0, 0)}), ValidationError);
  CHECK_THROWS_AS(Circuit("c", 2, {Gate::cx(0, 2)}), ValidationError);
  CHECK_THROWS_AS(Circuit("c", 2, {Gate::single(-1)}), ValidationError);
  CHECK_THROWS_AS(Circuit("c", 2, {}), ValidationError);
}

TEST_CASE("makeProxy without preference") {
  auto c = std::make_shared<const Circuit>(generateRandomCircuit(5, 10, 0.3, 42));
  const auto p = makeProxy(c, std::nullopt, 0.0, 1, 1000, {2.0, 0.1});
  CHECK(p.q == 5);
  CHECK(p.d == 10);
  CHECK(p.sigma == 0.0);
  CHECK_FALSE(p.tau.has_value());
  CHECK(p.id == c->id());
  CHECK_FALSE(p.isFragment());
}

TEST_CASE("makeProxy rejects a preference without strictness") {
  auto c = std::make_shared<const Circuit>(generateRandomCircuit(5, 10, 0.3, 42));
  CHECK_THROWS_AS(makeProxy(c, "M1", 0.0, 1, 1000, {}), ValidationError);
  CHECK_THROWS_AS(makeProxy(c, std::nullopt, 1.0, 1, 1000, {}), ValidationError);
  CHECK_THROWS_AS(makeProxy(c, std::nullopt, 0.0, 0, 1000, {}), ValidationError);
  CHECK_THROWS_AS(makeProxy(c, std::nullopt, 0.0, 21, 1000, {}), ValidationError);
  CHECK_THROWS_AS(makeProxy(c, std::nullopt, 0.0, 1, 0, {}), ValidationError);
}

TEST_CASE("makeProxy echoes every field") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = std::make_shared<const Circuit>(
        generateRandomCircuit(rng.uniformInt(2, 9), rng.uniformInt(1, 16), 0.3, rng.next()));
    const bool pref = rng.bernoulli(0.5);
    const std::optional<std::string> tau = pref ? std::optional<std::string>("M2") : std::nullopt;
    const double sigma = pref ? rng.uniform(0.5, 3.0) : 0.0;
    const int rho = rng.uniformInt(1, 20);
    const std::int64_t shots = rng.uniformInt(1, 100000);
    const ProxyEstimates est{rng.uniform(0.0, 10.0), rng.uniform(0.0, 0.99)};
    const auto p = makeProxy(c, tau, sigma, rho, shots, est);
    CHECK(p.id == c->id());
    CHECK(p.parentId == c->id());
    CHECK(p.q == c->numQubits());
    CHECK(p.d == c->depth());
    CHECK(p.tau == tau);
    CHECK(p.sigma == sigma);
    CHECK(p.rho == rho);
    CHECK(p.shots == shots);
    CHECK(p.basePTime == est.basePTime);
    CHECK(p.baseNoise == est.baseNoise);
    CHECK_FALSE(p.b.has_value());
    CHECK_FALSE(p.c.has_value());
    CHECK(p.circuit == c);
  }
}

TEST_CASE("circuit JSON round trip") {
  const auto c = generateRandomCircuit(6, 7, 0.5, 9);
  CHECK(circuitFromJson(toJson(c)) == c);
}

TEST_CASE("circuit ids are deterministic and distinct per seed") {
  CHECK(makeCircuitId(1) == makeCircuitId(1));
  CHECK(makeCircuitId(1) != makeCircuitId(2));
  CHECK(makeCircuitId(1).size() == 36);
}
