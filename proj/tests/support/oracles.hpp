#pragma once

#include "qsched/circuit.hpp"
#include "qsched/estimation.hpp"
#include "qsched/machine.hpp"
#include "qsched/rng.hpp"
#include "qsched/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

// Reference implementations written from the definitions, kept deliberately
// naive so they share no code paths with the library.
namespace oracle {

// Longest path in the gate dependency DAG: gate j depends on every earlier
// gate that touches one of its qubits.
inline int depth(const std::vector<qsched::Gate>& gates) {
  std::vector<int> longest(gates.size(), 1);
  int best = 0;
  for (std::size_t j = 0; j < gates.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      bool shared = false;
      for (int a = 0; a < gates[i].arity(); ++a) {
        for (int b = 0; b < gates[j].arity(); ++b) {
          shared = shared || gates[i].qubits[a] == gates[j].qubits[b];
        }
      }
      if (shared) {
        longest[j] = std::max(longest[j], longest[i] + 1);
      }
    }
    best = std::max(best, longest[j]);
  }
  return best;
}

struct Bipartition {
  std::vector<std::uint8_t> partition;
  int crossing = 0;
};

inline int crossingGates(const qsched::Circuit& circuit, const std::vector<std::uint8_t>& part) {
  int count = 0;
  for (const auto& g : circuit.gates()) {
    if (g.kind == qsched::GateKind::CX && part[g.qubits[0]] != part[g.qubits[1]]) {
      ++count;
    }
  }
  return count;
}

// Every 0/1 vector is visited, counting crossings straight from the gate list.
inline std::optional<Bipartition> bestBipartition(const qsched::Circuit& circuit, int maxA,
                                                  int maxB) {
  const int q = circuit.numQubits();
  std::vector<std::uint8_t> part(q, 0);
  std::optional<Bipartition> best;
  while (true) {
    const int sizeB = static_cast<int>(std::count(part.begin(), part.end(), 1));
    const int sizeA = q - sizeB;
    if (sizeA >= 1 && sizeB >= 1 && sizeA <= maxA && sizeB <= maxB) {
      const int k = crossingGates(circuit, part);
      const auto bestA = [&] {
        return q - static_cast<int>(std::count(best->partition.begin(), best->partition.end(), 1));
      };
      if (!best || k < best->crossing || (k == best->crossing && sizeA < bestA()) ||
          (k == best->crossing && sizeA == bestA() && part < best->partition)) {
        best = Bipartition{part, k};
      }
    }
    int i = q - 1;
    while (i >= 0 && part[i] == 1) {
      part[i--] = 0;
    }
    if (i < 0) {
      break;
    }
    part[i] = 1;
  }
  return best;
}

struct Evaluation {
  std::vector<double> start;
  std::vector<double> completion;
  std::vector<double> score;
  double pmax = 0.0;
  double makespan = 0.0;
  double noise = 0.0;
  bool valid = true;
};

inline double setup(const qsched::CircuitProxy* prev, const qsched::CircuitProxy& next,
                    const qsched::Machine& m) {
  if (prev == nullptr) {
    return 0.0;
  }
  return prev->parentId == next.parentId ? m.model.fragmentSetup : m.model.baseSetup;
}

inline double noiseOf(const qsched::CircuitProxy& job, const qsched::Machine& m) {
  if (job.id == job.parentId && job.q <= m.capacity) {
    return 1.0 - std::pow(1.0 - m.model.noisePerQubitLayer, job.q * job.d);
  }
  return job.baseNoise ? *job.baseNoise : 0.0;
}

inline double preference(const qsched::CircuitProxy& job, const qsched::Machine& m,
                         const qsched::CostWeights& w) {
  if (!job.tau) {
    return 0.0;
  }
  const bool on = *job.tau == m.id;
  if (w.preference == qsched::PreferenceTerm::AsWritten) {
    return on ? w.beta * job.sigma : 0.0;
  }
  return on ? 0.0 : w.beta * job.sigma;
}

inline double pending(const qsched::Machine& m) {
  return m.queue.empty() ? m.loadOffset : m.queue.back().endTime;
}

// Per machine the timeslots form a chain; a slot opens once the previous
// slot's longest job is done and the set-up towards its first job has passed.
inline Evaluation evaluate(const qsched::Schedule& s, const std::vector<qsched::Machine>& ms) {
  Evaluation out;
  out.start.assign(s.jobs.size(), 0.0);
  out.completion.assign(s.jobs.size(), 0.0);
  for (std::size_t m = 0; m < ms.size(); ++m) {
    struct Slot {
      std::vector<std::size_t> members;
    };
    std::vector<Slot> chain;
    for (const auto& slot : s.slots[m]) {
      if (!slot.empty()) {
        chain.push_back({slot});
      }
    }
    double terms = 0.0;
    double previousEnd = 0.0;
    std::optional<std::size_t> previousLast;
    for (const auto& slot : chain) {
      const auto& first = s.jobs[slot.members.front()];
      const double open =
          previousEnd + setup(previousLast ? &s.jobs[*previousLast] : nullptr, first, ms[m]);
      int width = 0;
      std::size_t last = slot.members.front();
      double end = open;
      for (const auto i : slot.members) {
        const auto& job = s.jobs[i];
        out.start[i] = open;
        out.completion[i] = open + *job.basePTime;
        if (out.completion[i] > end) {
          end = out.completion[i];
          last = i;
        }
        width += job.q;
        terms = std::max(terms, s.weights.alpha * job.rho * out.completion[i] +
                                    preference(job, ms[m], s.weights));
        out.noise += noiseOf(job, ms[m]);
        out.makespan = std::max(out.makespan, out.completion[i]);
      }
      out.valid = out.valid && width <= ms[m].capacity;
      previousEnd = end;
      previousLast = last;
    }
    out.score.push_back(pending(ms[m]) + terms);
  }
  out.pmax = out.score.empty() ? 0.0 : *std::max_element(out.score.begin(), out.score.end());
  return out;
}

// Union form: every (machine, job) pair that occurs in either schedule adds
// the start difference when the job is on that machine in both, otherwise
// the larger of the two spans of that machine.
inline double distance(const qsched::Schedule& a, const qsched::Schedule& b) {
  const auto machineOf = [](const qsched::Schedule& s) {
    std::map<std::string, std::size_t> where;
    for (std::size_t m = 0; m < s.slots.size(); ++m) {
      for (const auto& slot : s.slots[m]) {
        for (const auto i : slot) {
          where[s.jobs[i].id] = m;
        }
      }
    }
    return where;
  };
  const auto spans = [](const qsched::Schedule& s) {
    std::vector<double> span(s.slots.size(), 0.0);
    for (std::size_t m = 0; m < s.slots.size(); ++m) {
      for (const auto& slot : s.slots[m]) {
        for (const auto i : slot) {
          span[m] = std::max(span[m], *s.jobs[i].c);
        }
      }
    }
    return span;
  };
  const auto startOf = [](const qsched::Schedule& s, const std::string& id) {
    for (const auto& j : s.jobs) {
      if (j.id == id) {
        return *j.b;
      }
    }
    return 0.0;
  };
  const auto wa = machineOf(a);
  const auto wb = machineOf(b);
  const auto sa = spans(a);
  const auto sb = spans(b);
  double total = 0.0;
  for (std::size_t m = 0; m < a.slots.size(); ++m) {
    std::map<std::string, int> members;
    for (const auto& [id, mm] : wa) {
      if (mm == m) {
        members[id] |= 1;
      }
    }
    for (const auto& [id, mm] : wb) {
      if (mm == m) {
        members[id] |= 2;
      }
    }
    for (const auto& [id, mask] : members) {
      total += mask == 3 ? std::abs(startOf(a, id) - startOf(b, id)) : std::max(sa[m], sb[m]);
    }
  }
  return total;
}

inline bool relClose(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace oracle

namespace gen {

inline qsched::CircuitProxy job(std::string id, int q, double p, int rho = 1, int d = 4) {
  qsched::CircuitProxy j;
  j.id = id;
  j.parentId = std::move(id);
  j.q = q;
  j.d = d;
  j.rho = rho;
  j.basePTime = p;
  j.baseNoise = 0.01 * q;
  return j;
}

// A root job backed by a random circuit, timed with the default model.
inline qsched::CircuitProxy circuitJob(int q, int d, std::uint64_t seed,
                                       const std::vector<qsched::Machine>& ms, int rho = 1,
                                       double density = 0.3) {
  auto c = std::make_shared<const qsched::Circuit>(
      qsched::generateRandomCircuit(q, d, q > 1 ? density : 0.0, seed));
  const double p = qsched::processingTime(c->depth(), qsched::kDefaultShots, qsched::EstimateModel{});
  qsched::CircuitProxy probe;
  probe.q = q;
  probe.d = c->depth();
  return qsched::makeProxy(c, std::nullopt, 0.0, rho, qsched::kDefaultShots,
                           {p, qsched::extrapolatedNoise(probe, probe.d, ms).value});
}

inline qsched::Machine machine(std::string id, int capacity, double eps = 0.01,
                               double setupTime = 0.5) {
  qsched::EstimateModel model;
  model.noisePerQubitLayer = eps;
  model.baseSetup = setupTime;
  return qsched::makeMachine(std::move(id), capacity, model);
}

inline std::vector<qsched::Machine> machines(qsched::Rng& rng, std::size_t count, int minCap,
                                             int maxCap) {
  std::vector<qsched::Machine> out;
  for (std::size_t m = 0; m < count; ++m) {
    auto mm = machine("m" + std::to_string(m), rng.uniformInt(minCap, maxCap),
                      rng.uniform(0.001, 0.05), rng.uniform(0.0, 1.0));
    mm.model.fragmentSetup = rng.uniform(0.0, 0.1);
    mm.loadOffset = rng.bernoulli(0.5) ? rng.uniform(0.0, 5.0) : 0.0;
    out.push_back(std::move(mm));
  }
  return out;
}

// Jobs with random width, depth, priority and preference; roughly one in
// four is a fragment sharing its parent with the previous job.
inline std::vector<qsched::CircuitProxy> batch(qsched::Rng& rng, std::size_t count,
                                               const std::vector<qsched::Machine>& ms,
                                               int maxQ) {
  std::vector<qsched::CircuitProxy> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto j = job("j" + std::to_string(i), rng.uniformInt(1, maxQ), rng.uniform(0.1, 4.0),
                 rng.uniformInt(1, 20), rng.uniformInt(1, 12));
    j.baseNoise = rng.uniform(0.0, 0.5);
    if (rng.bernoulli(0.5)) {
      j.tau = ms[rng.below(ms.size())].id;
      j.sigma = rng.uniform(0.5, 3.0);
    }
    if (i > 0 && rng.bernoulli(0.25)) {
      j.parentId = out.back().parentId;
      j.id = j.parentId + ".f" + std::to_string(i);
    }
    out.push_back(std::move(j));
  }
  return out;
}

// Random placement; slots may exceed capacity.
inline qsched::Schedule schedule(qsched::Rng& rng, const std::vector<qsched::CircuitProxy>& jobs,
                                 std::size_t machineCount, qsched::CostWeights w = {}) {
  auto s = qsched::Schedule::empty(machineCount, w);
  for (const auto& j : jobs) {
    const auto m = rng.below(machineCount);
    const auto slots = s.slots[m].size();
    s.addJob(j, m, rng.below(slots + 1));
  }
  return s;
}

inline qsched::CostWeights weights(qsched::Rng& rng) {
  qsched::CostWeights w;
  w.alpha = rng.uniform(0.1, 3.0);
  w.beta = rng.uniform(0.0, 3.0);
  w.preference = rng.bernoulli(0.5) ? qsched::PreferenceTerm::AsWritten
                                    : qsched::PreferenceTerm::PenaltyWhenOff;
  return w;
}

} // namespace gen

namespace oracle {

// Minimum valid P_max over every machine assignment and every ordered
// grouping of each machine's jobs into timeslots.
inline double bruteForceOptimum(const std::vector<qsched::CircuitProxy>& jobs,
                                const std::vector<qsched::Machine>& ms,
                                qsched::CostWeights w = {}) {
  double best = std::numeric_limits<double>::infinity();
  auto s = qsched::Schedule::empty(ms.size(), w);
  s.jobs = jobs;
  const std::function<void(std::size_t)> place = [&](std::size_t k) {
    if (k == jobs.size()) {
      const auto r = evaluate(s, ms);
      if (r.valid) {
        best = std::min(best, r.pmax);
      }
      return;
    }
    for (std::size_t m = 0; m < ms.size(); ++m) {
      auto& slots = s.slots[m];
      for (std::size_t t = 0; t < slots.size(); ++t) {
        slots[t].push_back(k);
        place(k + 1);
        slots[t].pop_back();
      }
      for (std::size_t pos = 0; pos <= slots.size(); ++pos) {
        slots.insert(slots.begin() + static_cast<std::ptrdiff_t>(pos), qsched::Timeslot{k});
        place(k + 1);
        slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(pos));
      }
    }
  };
  place(0);
  return best;
}

} // namespace oracle
