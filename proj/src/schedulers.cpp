#include "qsched/schedulers.hpp"

#include "placement.hpp"
#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace qsched {

namespace detail {

std::size_t predictMachine(const CircuitProxy& proxy, std::span<const Machine> machines) {
  if (proxy.tau) {
    for (std::size_t m = 0; m < machines.size(); ++m) {
      if (machines[m].id == *proxy.tau && machines[m].capacity >= proxy.q) {
        return m;
      }
    }
  }
  std::size_t best = machines.size();
  double bestNoise = 0.0;
  for (std::size_t m = 0; m < machines.size(); ++m) {
    const auto f = baseNoise(proxy.q, proxy.d, machines[m]);
    if (!f) {
      continue;
    }
    if (best == machines.size() || f->value < bestNoise ||
        (f->value == bestNoise && machines[m].queueLength() < machines[best].queueLength())) {
      best = m;
      bestNoise = f->value;
    }
  }
  if (best == machines.size()) {
    throw InfeasibleJob("job " + proxy.id + " fits no machine");
  }
  return best;
}

int slotQubits(const Schedule& schedule, const Timeslot& slot) {
  int used = 0;
  for (const auto idx : slot) {
    used += schedule.jobs[idx].q;
  }
  return used;
}

std::size_t firstFitSlot(const Schedule& schedule, std::size_t machine, int q,
                         std::span<const Machine> machines) {
  const auto& slots = schedule.slots[machine];
  for (std::size_t t = 0; t < slots.size(); ++t) {
    if (slotQubits(schedule, slots[t]) + q <= machines[machine].capacity) {
      return t;
    }
  }
  return slots.size();
}

bool sameStructure(const Schedule& a, const Schedule& b) {
  if (a.slots.size() != b.slots.size() || a.jobs.size() != b.jobs.size()) {
    return false;
  }
  for (std::size_t m = 0; m < a.slots.size(); ++m) {
    if (a.slots[m].size() != b.slots[m].size()) {
      return false;
    }
    for (std::size_t t = 0; t < a.slots[m].size(); ++t) {
      const auto& sa = a.slots[m][t];
      const auto& sb = b.slots[m][t];
      if (sa.size() != sb.size()) {
        return false;
      }
      for (std::size_t k = 0; k < sa.size(); ++k) {
        if (a.jobs[sa[k]].id != b.jobs[sb[k]].id) {
          return false;
        }
      }
    }
  }
  return true;
}

} // namespace detail

std::vector<CircuitProxy> cutToFit(const CircuitProxy& proxy, std::span<const Machine> machines,
                                   std::vector<CutRecord>& cuts) {
  if (machines.empty()) {
    throw InfeasibleJob("no machines to place job " + proxy.id);
  }
  int widest = 0;
  long long total = 0;
  for (const auto& m : machines) {
    widest = std::max(widest, m.capacity);
    total += m.capacity;
  }
  if (proxy.q <= widest) {
    return {proxy};
  }
  if (proxy.q > total) {
    throw InfeasibleJob("job " + proxy.id + " needs " + std::to_string(proxy.q) +
                        " qubits, all machines together offer " + std::to_string(total));
  }
  if (!proxy.circuit) {
    throw InfeasibleJob("job " + proxy.id + " is oversize and has no circuit to cut");
  }
  CutPlan plan;
  try {
    plan = estimateCut(*proxy.circuit, widest, std::max(widest, proxy.q - widest));
  } catch (const ValidationError& e) {
    throw InfeasibleJob("cannot cut job " + proxy.id + ": " + e.what());
  }
  const CutOutcome outcome = applyCutToProxy(proxy, plan, machines);
  cuts.push_back({proxy.id, plan});
  std::vector<CircuitProxy> pieces;
  for (const auto& fragment : outcome.fragmentProxies) {
    auto sub = cutToFit(fragment, machines, cuts);
    pieces.insert(pieces.end(), std::make_move_iterator(sub.begin()),
                  std::make_move_iterator(sub.end()));
  }
  return pieces;
}

Schedule binpackSchedule(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                         CostWeights weights) {
  Schedule schedule = Schedule::empty(machines.size(), weights);
  std::vector<CircuitProxy> pieces;
  for (const auto& job : batch) {
    auto sub = cutToFit(job, machines, schedule.cuts);
    pieces.insert(pieces.end(), std::make_move_iterator(sub.begin()),
                  std::make_move_iterator(sub.end()));
  }
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const CircuitProxy& a, const CircuitProxy& b) { return a.q > b.q; });

  std::vector<double> load(machines.size(), 0.0);
  std::vector<std::vector<double>> slotSpan(machines.size());
  for (auto& piece : pieces) {
    const double p = piece.basePTime.value_or(0.0);
    bool placed = false;
    for (std::size_t m = 0; m < machines.size() && !placed; ++m) {
      const std::size_t t = detail::firstFitSlot(schedule, m, piece.q, machines);
      if (t < schedule.slots[m].size()) {
        schedule.addJob(std::move(piece), m, t);
        if (p > slotSpan[m][t]) {
          load[m] += p - slotSpan[m][t];
          slotSpan[m][t] = p;
        }
        placed = true;
      }
    }
    if (placed) {
      continue;
    }
    std::size_t target = machines.size();
    for (std::size_t m = 0; m < machines.size(); ++m) {
      if (machines[m].capacity >= piece.q && (target == machines.size() || load[m] < load[target])) {
        target = m;
      }
    }
    if (target == machines.size()) {
      throw InfeasibleJob("job " + piece.id + " fits no machine");
    }
    schedule.addJobInNewSlot(std::move(piece), target);
    slotSpan[target].push_back(p);
    load[target] += p;
  }
  return schedule;
}

Candidate makeCandidate(Schedule schedule, std::span<const Machine> machines) {
  Candidate c;
  c.evaluation = evaluate(schedule, machines);
  stampTimings(schedule, c.evaluation);
  c.schedule = std::move(schedule);
  return c;
}

} // namespace qsched
