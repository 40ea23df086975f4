#include "oracles.hpp"

#include "qsched/errors.hpp"
#include "qsched/rl.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace qsched;
using namespace qsched::rl;

namespace {

struct Toy {
  std::vector<Machine> machines;
  std::vector<CircuitProxy> jobs;

  [[nodiscard]] SchedulingEnv env(EnvConfig config = {}) const {
    return SchedulingEnv(jobs, machines, config);
  }
};

// Two identical devices except for a 5x noise gap; bin packing fills the noisy one first.
Toy noisyToy(int jobs = 2) {
  Toy t;
  t.machines = {gen::machine("noisy", 5, 0.05), gen::machine("clean", 5, 0.01)};
  for (int i = 0; i < jobs; ++i) {
    t.jobs.push_back(gen::circuitJob(2, 4 + i, 100 + static_cast<std::uint64_t>(i), t.machines));
  }
  return t;
}

std::size_t indexOf(const SchedulingEnv& env, const std::string& action) {
  for (std::size_t i = 0; i < env.actionCount(); ++i) {
    if (describe(env.decode(i)) == action) {
      return i;
    }
  }
  FAIL("action not in the action space: " << action);
  return 0;
}

Policy always(const SchedulingEnv& env, std::size_t action) {
  auto p = Policy::zeros(env.observationSize(), env.actionCount());
  p.actionWeights[action * (p.observationSize + 1) + p.observationSize] = 50.0;
  return p;
}

double expectedReward(const SchedulingEnv& env, const Schedule& s) {
  const auto ref = oracle::evaluate(s, env.machines());
  return -(env.config().mu * ref.pmax + env.config().nu * ref.noise);
}

} // namespace

TEST_CASE("terminate on a valid schedule ends the episode with the plain reward") {
  auto env = noisyToy().env();
  const auto step = env.step(TerminateAction{});
  CHECK(step.done);
  CHECK_FALSE(step.invalidAction);
  CHECK(step.reward == doctest::Approx(expectedReward(env, env.current())).epsilon(1e-12));
  CHECK(env.done());
  const auto after = env.step(TerminateAction{});
  CHECK(after.invalidAction);
}

TEST_CASE("a cut at qubit zero is invalid and penalised") {
  auto env = noisyToy().env();
  const auto before = env.current();
  const auto step = env.step(CutAction{0, 0});
  CHECK(step.invalidAction);
  CHECK(env.current().slots == before.slots);
  CHECK(step.reward ==
        doctest::Approx(expectedReward(env, before) - env.penalty()).epsilon(1e-12));
}

TEST_CASE("moving a job onto its own slot is invalid") {
  auto env = noisyToy().env();
  const auto pos = *env.current().locate(0);
  const auto step = env.step(MoveAction{0, pos.machine, pos.slot});
  CHECK(step.invalidAction);
  CHECK(step.reward < expectedReward(env, env.current()));
}

TEST_CASE("a valid cut conserves width and scales shots") {
  const std::vector<Machine> ms{gen::machine("a", 7), gen::machine("b", 7)};
  const std::vector<CircuitProxy> jobs{gen::circuitJob(6, 5, 4, ms)};
  SchedulingEnv env(jobs, ms);
  const auto parent = env.current().jobs[0];
  const auto step = env.step(CutAction{0, 3});
  REQUIRE_FALSE(step.invalidAction);
  const auto& s = env.current();
  REQUIRE(s.jobs.size() == 2);
  REQUIRE(s.cuts.size() == 1);
  CHECK(s.jobs[0].q + s.jobs[1].q == parent.q);
  const auto factor = static_cast<std::int64_t>(std::pow(9, s.cuts[0].plan.crossingGates));
  CHECK(s.jobs[0].shots == parent.shots * factor);
  CHECK(s.jobs[1].shots == parent.shots * factor);
}

TEST_CASE("action space decodes every index to a distinct action") {
  const auto env = noisyToy(3).env();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < env.actionCount(); ++i) {
    seen.insert(describe(env.decode(i)));
  }
  CHECK(seen.size() == env.actionCount());
  CHECK(std::holds_alternative<TerminateAction>(env.decode(env.actionCount() - 1)));
}

TEST_CASE("step is total and rewards follow the formula") {
  Rng rng(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ms = gen::machines(rng, rng.uniformInt(1, 3), 3, 7);
    std::vector<CircuitProxy> jobs;
    const int n = rng.uniformInt(1, 4);
    for (int i = 0; i < n; ++i) {
      jobs.push_back(gen::circuitJob(rng.uniformInt(1, 3), rng.uniformInt(1, 8), rng.next(), ms,
                                     rng.uniformInt(1, 20)));
    }
    EnvConfig config;
    config.mu = rng.uniform(0.1, 2.0);
    config.nu = rng.uniform(0.0, 10.0);
    config.maxSteps = rng.uniformInt(1, 40);
    SchedulingEnv env(jobs, ms, config);
    int steps = 0;
    while (!env.done()) {
      Action action = env.decode(rng.below(env.actionCount()));
      if (rng.bernoulli(0.1)) {
        action = MoveAction{rng.below(50), rng.below(5), rng.below(50)};
      }
      StepResult step;
      REQUIRE_NOTHROW(step = env.step(action));
      ++steps;
      const double plain = expectedReward(env, env.current());
      const bool penalised = step.invalidAction || step.invalidState;
      CHECK(step.invalidState == !oracle::evaluate(env.current(), ms).valid);
      CHECK(oracle::relClose(step.reward, plain - (penalised ? env.penalty() : 0.0)));
      CHECK(step.observation.values.size() == env.observationSize());
    }
    CHECK(steps <= *config.maxSteps);
  }
}

TEST_CASE("environment rejects empty inputs") {
  const std::vector<Machine> ms{gen::machine("a", 5)};
  CHECK_THROWS_AS(SchedulingEnv({}, ms), ValidationError);
  EnvConfig config;
  config.maxSteps = 0;
  CHECK_THROWS_AS(SchedulingEnv({gen::job("x", 1, 1.0)}, ms, config), ValidationError);
}

TEST_CASE("one training iteration gives a usable policy") {
  const auto toy = noisyToy();
  TrainConfig config;
  config.iterations = 1;
  const auto r = train([&] { return toy.env(); }, config, 5);
  CHECK(r.policyUpdates == 1);
  CHECK(r.curve.size() == 1);
  CHECK(r.environmentSteps >= 1);
  auto env = toy.env();
  const auto s = extractSchedule(r.policy, env);
  CHECK(std::isfinite(env.scheduleReward(s)));
  CHECK(isValid(s, toy.machines));
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto toy = noisyToy();
  TrainConfig config;
  config.iterations = 50;
  const auto a = train([&] { return toy.env(); }, config, 9);
  const auto b = train([&] { return toy.env(); }, config, 9);
  CHECK(a.policy.actionWeights == b.policy.actionWeights);
  CHECK(a.policy.valueWeights == b.policy.valueWeights);
  const auto c = train([&] { return toy.env(); }, config, 10);
  CHECK(a.policy.actionWeights != c.policy.actionWeights);
}

TEST_CASE("training config validation") {
  const auto toy = noisyToy();
  TrainConfig config;
  config.iterations = 0;
  CHECK_THROWS_AS(train([&] { return toy.env(); }, config, 1), ValidationError);
  config.iterations = 1;
  config.gamma = 0.0;
  CHECK_THROWS_AS(train([&] { return toy.env(); }, config, 1), ValidationError);
}

TEST_CASE("a policy that terminates at once returns the initial schedule") {
  auto env = noisyToy().env();
  const auto policy = always(env, env.actionCount() - 1);
  const auto s = extractSchedule(policy, env);
  CHECK(s.slots == env.initial().slots);
  CHECK(env.stepCount() == 1);
}

TEST_CASE("a rollout ending over capacity falls back to the best valid state") {
  const std::vector<Machine> ms{gen::machine("a", 5), gen::machine("b", 5)};
  const std::vector<CircuitProxy> jobs{gen::circuitJob(3, 4, 1, ms), gen::circuitJob(3, 5, 2, ms)};
  SchedulingEnv env(jobs, ms);
  REQUIRE(isValid(env.initial(), ms));
  const auto first = *env.initial().locate(0);
  const auto second = *env.initial().locate(1);
  const auto action =
      "move(job=1, machine=" + std::to_string(first.machine) + ", slot=" + std::to_string(first.slot) + ")";
  REQUIRE(second.machine != first.machine);
  const auto s = extractSchedule(always(env, indexOf(env, action)), env);
  CHECK_FALSE(isValid(env.current(), ms));
  CHECK(isValid(s, ms));
  CHECK(s.slots == env.initial().slots);
}

TEST_CASE("training on a toy with a better move never ends worse than the start") {
  const auto toy = noisyToy();
  TrainConfig config;
  config.iterations = 5000;
  const auto r = train([&] { return toy.env(); }, config, 21);
  auto env = toy.env();
  const auto s = extractSchedule(r.policy, env);
  CHECK(isValid(s, toy.machines));
  CHECK(env.scheduleReward(s) >= env.scheduleReward(env.initial()));
  const auto trainedNoise = evaluate(s, toy.machines).noise;
  CHECK(trainedNoise <= evaluate(env.initial(), toy.machines).noise);
}
