#include "oracles.hpp"

#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"

#include <doctest.h>

#include <cmath>

using namespace qsched;

namespace {

CircuitProxy proxy(int q, int d, double p = 4.0) {
  auto j = gen::job("p", q, p, 1, d);
  j.shots = 1000;
  return j;
}

} // namespace

TEST_CASE("processing time is layers plus readout") {
  EstimateModel m;
  m.perLayerTime = 0.1;
  m.perShotReadout = 0.0;
  CHECK(processingTime(10, 1000, m) == doctest::Approx(1.0).epsilon(1e-12));
  m.perShotReadout = 0.001;
  CHECK(processingTime(10, 1000, m) == doctest::Approx(10 * 0.1 + 1000 * 0.001).epsilon(1e-12));
  CHECK(processingTime(10, 1000, m) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(processingTime(0, 1000, m), ValidationError);
}

TEST_CASE("processing time on a machine checks capacity") {
  const auto m = gen::machine("m", 5);
  CHECK(processingTime(proxy(5, 10), m) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(processingTime(proxy(6, 10), m), CapacityError);
}

TEST_CASE("processing time grows strictly in depth and shots") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    EstimateModel m;
    m.perLayerTime = rng.uniform(0.001, 1.0);
    m.perShotReadout = rng.uniform(0.0001, 0.01);
    const int d = rng.uniformInt(1, 100);
    const int shots = rng.uniformInt(0, 10000);
    CHECK(processingTime(d + 1, shots, m) > processingTime(d, shots, m));
    CHECK(processingTime(d, shots + 1, m) > processingTime(d, shots, m));
  }
}

TEST_CASE("fragment time scales with depth ratio") {
  const auto parent = proxy(4, 8, 4.0);
  CHECK(scaledProcessingTime(parent, 8) == 4.0);
  CHECK(scaledProcessingTime(parent, 4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(scaledProcessingTime(parent, 10) == doctest::Approx(5.0).epsilon(1e-12));
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = proxy(3, rng.uniformInt(1, 50), rng.uniform(0.01, 100.0));
    CHECK(scaledProcessingTime(p, p.d) == *p.basePTime);
  }
}

TEST_CASE("base noise") {
  const auto m = gen::machine("m", 5, 0.01);
  CHECK(baseNoise(1, 1, m)->value == doctest::Approx(0.01).epsilon(1e-12));
  const double expected = 1.0 - std::pow(0.99, 6);
  CHECK(baseNoise(2, 3, m)->value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(baseNoise(2, 3, m)->value == doctest::Approx(0.0585).epsilon(1e-3));
  CHECK_FALSE(baseNoise(9, 3, m).has_value());
}

TEST_CASE("base noise is in [0,1) and missing exactly when oversize") {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = gen::machine("m", rng.uniformInt(1, 20), rng.uniform(0.0001, 0.9));
    const int q = rng.uniformInt(1, 25);
    const int d = rng.uniformInt(1, 500);
    const auto f = baseNoise(q, d, m);
    CHECK(f.has_value() == (q <= m.capacity));
    if (f) {
      CHECK(f->value >= 0.0);
      CHECK(f->value < 1.0);
    }
  }
}

TEST_CASE("extrapolated noise takes the worst machine and scales by depth") {
  const std::vector<Machine> one{gen::machine("a", 5, 0.01)};
  const auto parent = proxy(2, 3);
  CHECK(extrapolatedNoise(parent, 3, one).value == baseNoise(2, 3, one[0])->value);

  const std::vector<Machine> two{gen::machine("a", 5, 0.01), gen::machine("b", 5, 0.02)};
  const double worst = 1.0 - std::pow(0.98, 6);
  CHECK(extrapolatedNoise(parent, 3, two).value == doctest::Approx(worst).epsilon(1e-12));
  CHECK(extrapolatedNoise(parent, 3, two).value == doctest::Approx(0.1142).epsilon(1e-3));
  const auto deep = proxy(2, 9);
  const double worstDeep = 1.0 - std::pow(0.98, 18);
  CHECK(extrapolatedNoise(deep, 3, two).value == doctest::Approx(worstDeep / 3).epsilon(1e-12));
}

TEST_CASE("extrapolated noise for a parent wider than every machine") {
  const std::vector<Machine> ms{gen::machine("a", 5, 0.01), gen::machine("b", 7, 0.02)};
  const auto parent = proxy(10, 4);
  const double seeded = 1.0 - std::pow(0.98, 7 * 4);
  CHECK(extrapolatedNoise(parent, 2, ms).value == doctest::Approx(seeded / 2).epsilon(1e-12));
}

TEST_CASE("set-up time") {
  auto m = gen::machine("m", 5, 0.01, 0.5);
  m.model.fragmentSetup = 0.0;
  auto a = proxy(2, 3);
  auto b = proxy(2, 3);
  a.id = "x.a";
  a.parentId = "x";
  b.id = "x.b";
  b.parentId = "x";
  auto other = proxy(2, 3);
  other.id = other.parentId = "y";
  CHECK(setupTime(nullptr, a, m) == 0.0);
  CHECK(setupTime(&a, b, m) == 0.0);
  CHECK(setupTime(&a, other, m) == 0.5);
  m.model.fragmentSetup = 0.2;
  CHECK(setupTime(&a, b, m) == 0.2);
}

TEST_CASE("estimate model validation") {
  EstimateModel m;
  m.noisePerQubitLayer = 1.0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m.noisePerQubitLayer = 0.01;
  m.baseSetup = -1.0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  CHECK_THROWS_AS(makeMachine("m", 0), ValidationError);
}

TEST_CASE("noise clamp") {
  CHECK(clampNoise(-0.5) == 0.0);
  CHECK(clampNoise(0.25) == 0.25);
  CHECK(clampNoise(1.0) < 1.0);
  CHECK(clampNoise(std::nan("")) == 0.0);
}
