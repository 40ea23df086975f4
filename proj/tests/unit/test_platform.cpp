#include "oracles.hpp"

#include "qsched/errors.hpp"
#include "qsched/platform.hpp"
#include "qsched/serialize.hpp"

#include <doctest.h>

using namespace qsched;

namespace {

std::vector<int> widths(const std::vector<CircuitProxy>& batch) {
  std::vector<int> out;
  for (const auto& j : batch) {
    out.push_back(j.q);
  }
  return out;
}

std::vector<std::string> ids(const SubmissionQueue& q) {
  std::vector<std::string> out;
  for (const auto& j : q.items()) {
    out.push_back(j.id);
  }
  return out;
}

SubmissionQueue queueOf(const std::vector<int>& qs) {
  SubmissionQueue q;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    q.push(gen::job("j" + std::to_string(i), qs[i], 1.0));
  }
  return q;
}

void checkCapacity(const Platform& p) {
  for (const auto& m : p.machines()) {
    for (const auto& e : m.queue) {
      CHECK(e.usedQubits() <= m.capacity);
    }
  }
}

} // namespace

TEST_CASE("idle machine takes a job without preference at once") {
  Platform p({gen::machine("m", 5)});
  const auto r = p.submit(gen::job("a", 3, 1.0));
  CHECK(r.kind == SubmissionKind::Immediate);
  CHECK(r.machine == 0);
  CHECK(p.queue().empty());
  CHECK(p.machines()[0].queue.size() == 1);
}

TEST_CASE("immediate start prefers the narrowest idle machine") {
  Platform p({gen::machine("wide", 7), gen::machine("busy", 3), gen::machine("narrow", 5)});
  p.machines()[1].loadOffset = 2.0;
  CHECK(p.submit(gen::job("a", 3, 1.0)).machine == 2);
}

TEST_CASE("jobs with a preference are always enqueued") {
  Platform p({gen::machine("m", 5)}, {.backfilling = true});
  auto j = gen::job("a", 3, 1.0);
  j.tau = "m";
  j.sigma = 1.0;
  CHECK(p.submit(j).kind == SubmissionKind::Enqueued);
  CHECK(p.queue().size() == 1);
  CHECK(p.machines()[0].queue.empty());
}

TEST_CASE("backfilling joins an existing timeslot with room") {
  Platform p({gen::machine("m", 5)}, {.backfilling = true});
  REQUIRE(p.submit(gen::job("a", 3, 2.0)).kind == SubmissionKind::Immediate);
  const auto r = p.submit(gen::job("b", 2, 1.0));
  CHECK(r.kind == SubmissionKind::Backfilled);
  CHECK(r.timeslot == 0);
  CHECK(p.machines()[0].queue[0].usedQubits() == 5);
  CHECK(p.submit(gen::job("c", 1, 1.0)).kind == SubmissionKind::Enqueued);
}

TEST_CASE("backfilling does not stretch a timeslot and is off by default") {
  Platform p({gen::machine("m", 5)}, {.backfilling = true});
  p.submit(gen::job("a", 3, 2.0));
  CHECK(p.submit(gen::job("b", 2, 3.0)).kind == SubmissionKind::Enqueued);
  Platform off({gen::machine("m", 5)});
  off.submit(gen::job("a", 3, 2.0));
  CHECK(off.submit(gen::job("b", 2, 1.0)).kind == SubmissionKind::Enqueued);
}

TEST_CASE("formBatch takes the longest prefix within the threshold") {
  auto q = queueOf({3, 4, 5});
  CHECK(widths(formBatch(q, 8)) == std::vector<int>{3, 4});
  CHECK(ids(q) == std::vector<std::string>{"j2"});

  auto all = queueOf({1, 2, 3});
  CHECK(widths(formBatch(all, 100)) == std::vector<int>{1, 2, 3});
  CHECK(all.empty());

  auto big = queueOf({12, 1});
  CHECK(widths(formBatch(big, 8)) == std::vector<int>{12});

  SubmissionQueue none;
  CHECK(formBatch(none, 8).empty());
}

TEST_CASE("formBatch stops at the job limit first when it binds") {
  auto q = queueOf({1, 1, 1, 1, 1, 1, 1});
  CHECK(formBatch(q, 100, 5).size() == 5);
  CHECK(q.size() == 2);
}

TEST_CASE("formBatch agrees with a prefix-sum oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> qs;
    const int n = rng.uniformInt(0, 10);
    for (int i = 0; i < n; ++i) {
      qs.push_back(rng.uniformInt(1, 12));
    }
    const int t = rng.uniformInt(1, 20);
    std::size_t expected = 0;
    int sum = 0;
    while (expected < qs.size() && sum + qs[expected] <= t) {
      sum += qs[expected++];
    }
    if (expected == 0 && !qs.empty()) {
      expected = 1;
    }
    auto q = queueOf(qs);
    const auto batch = formBatch(q, t);
    CHECK(batch.size() == expected);
    CHECK(q.size() == qs.size() - expected);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CHECK(batch[i].id == "j" + std::to_string(i));
    }
  }
}

TEST_CASE("enqueueing an empty schedule changes nothing") {
  Platform p({gen::machine("a", 5), gen::machine("b", 7)});
  p.machines()[0].loadOffset = 3.0;
  p.enqueueSchedule(Schedule::empty(2));
  CHECK(p.machines()[0].queue.empty());
  CHECK(p.machines()[0].queueLength() == 3.0);
  CHECK(p.machines()[1].queueLength() == 0.0);
}

TEST_CASE("enqueueing two timeslots adds their span to the queue") {
  Platform p({gen::machine("a", 5, 0.01, 0.5)});
  p.machines()[0].loadOffset = 1.0;
  auto s = Schedule::empty(1);
  s.addJobInNewSlot(gen::job("x", 2, 2.0), 0);
  s.addJobInNewSlot(gen::job("y", 2, 3.0), 0);
  p.enqueueSchedule(s);
  const auto& queue = p.machines()[0].queue;
  REQUIRE(queue.size() == 2);
  CHECK(queue[0].startTime == 1.0);
  CHECK(queue[0].endTime == 3.0);
  CHECK(queue[1].startTime == 3.5);
  CHECK(p.machines()[0].queueLength() == doctest::Approx(1.0 + 2.0 + 0.5 + 3.0));
}

TEST_CASE("concurrent jobs become one combined queue entry") {
  Platform p({gen::machine("a", 5)});
  auto s = Schedule::empty(1);
  s.addJob(gen::job("x", 2, 2.0), 0, 0);
  s.addJob(gen::job("y", 3, 1.0), 0, 0);
  p.enqueueSchedule(s);
  REQUIRE(p.machines()[0].queue.size() == 1);
  CHECK(p.machines()[0].queue[0].proxies.size() == 2);
  CHECK(p.machines()[0].queue[0].endTime == 2.0);
}

TEST_CASE("over-capacity schedules are refused without side effects") {
  Platform p({gen::machine("a", 5)});
  auto s = Schedule::empty(1);
  s.addJob(gen::job("x", 3, 2.0), 0, 0);
  s.addJob(gen::job("y", 3, 1.0), 0, 0);
  CHECK_THROWS_AS(p.enqueueSchedule(s), ValidationError);
  CHECK(p.machines()[0].queue.empty());
}

TEST_CASE("platform rejects duplicate machine ids") {
  CHECK_THROWS_AS(Platform({gen::machine("a", 5), gen::machine("a", 7)}), ValidationError);
}

TEST_CASE("capacity holds and FIFO order survives random submissions") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    auto ms = gen::machines(rng, 3, 2, 7);
    for (auto& m : ms) {
      m.loadOffset = 0.0;
    }
    Platform p(ms, {.backfilling = rng.bernoulli(0.5)});
    std::vector<std::string> enqueued;
    for (int i = 0; i < 12; ++i) {
      auto j = gen::job("j" + std::to_string(i), rng.uniformInt(1, 7), rng.uniform(0.1, 3.0));
      if (rng.bernoulli(0.3)) {
        j.tau = ms[0].id;
        j.sigma = 1.0;
      }
      std::vector<std::vector<double>> startsBefore;
      for (const auto& m : p.machines()) {
        startsBefore.emplace_back();
        for (const auto& e : m.queue) {
          startsBefore.back().push_back(e.startTime);
        }
      }
      if (p.submit(j).kind == SubmissionKind::Enqueued) {
        enqueued.push_back(j.id);
      }
      for (std::size_t m = 0; m < p.machines().size(); ++m) {
        for (std::size_t t = 0; t < startsBefore[m].size(); ++t) {
          CHECK(p.machines()[m].queue[t].startTime == startsBefore[m][t]);
        }
      }
      checkCapacity(p);
    }
    CHECK(ids(p.queue()) == enqueued);
  }
}

TEST_CASE("prepopulate draws loads in range") {
  std::vector<Machine> ms{gen::machine("a", 5), gen::machine("b", 5), gen::machine("c", 5)};
  prepopulate(ms, 7, 0.0, 0.0);
  for (const auto& m : ms) {
    CHECK(m.loadOffset == 0.0);
  }
  prepopulate(ms, 7, 10.0, 100.0);
  auto again = ms;
  prepopulate(again, 7, 10.0, 100.0);
  const auto golden = readJsonFile(QSCHED_FIXTURE_DIR "/prepopulate_seed7.json");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(ms[i].loadOffset >= 10.0);
    CHECK(ms[i].loadOffset <= 100.0);
    CHECK(ms[i].loadOffset == again[i].loadOffset);
    CHECK(ms[i].loadOffset == golden["offsets"][i].get<double>());
  }
  CHECK_THROWS_AS(prepopulate(ms, 7, 5.0, 1.0), ValidationError);
}
