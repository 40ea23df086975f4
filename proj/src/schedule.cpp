#include "qsched/schedule.hpp"

#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace qsched {

Schedule Schedule::empty(std::size_t machineCount, CostWeights weights) {
  Schedule s;
  s.slots.resize(machineCount);
  s.weights = weights;
  return s;
}

std::optional<JobPosition> Schedule::locate(std::size_t job) const {
  for (std::size_t m = 0; m < slots.size(); ++m) {
    for (std::size_t t = 0; t < slots[m].size(); ++t) {
      const auto& slot = slots[m][t];
      for (std::size_t k = 0; k < slot.size(); ++k) {
        if (slot[k] == job) {
          return JobPosition{m, t, k};
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> Schedule::findJob(const std::string& id) const {
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (jobs[i].id == id) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t Schedule::addJob(CircuitProxy proxy, std::size_t machine, std::size_t slot) {
  if (machine >= slots.size()) {
    throw ValidationError("addJob: machine index out of range");
  }
  auto& machineSlots = slots[machine];
  if (slot > machineSlots.size()) {
    throw ValidationError("addJob: timeslot index out of range");
  }
  if (slot == machineSlots.size()) {
    machineSlots.emplace_back();
  }
  jobs.push_back(std::move(proxy));
  machineSlots[slot].push_back(jobs.size() - 1);
  return jobs.size() - 1;
}

std::size_t Schedule::addJobInNewSlot(CircuitProxy proxy, std::size_t machine) {
  if (machine >= slots.size()) {
    throw ValidationError("addJob: machine index out of range");
  }
  return addJob(std::move(proxy), machine, slots[machine].size());
}

void Schedule::compact() {
  for (auto& machineSlots : slots) {
    std::erase_if(machineSlots, [](const Timeslot& t) { return t.empty(); });
  }
}

void Schedule::removeJob(std::size_t job) {
  if (job >= jobs.size()) {
    throw ValidationError("removeJob: index out of range");
  }
  for (auto& machineSlots : slots) {
    for (auto& slot : machineSlots) {
      std::erase(slot, job);
      for (auto& idx : slot) {
        if (idx > job) {
          --idx;
        }
      }
    }
  }
  jobs.erase(jobs.begin() + static_cast<std::ptrdiff_t>(job));
  compact();
}

void Schedule::checkConsistency() const {
  std::vector<int> seen(jobs.size(), 0);
  for (const auto& machineSlots : slots) {
    for (const auto& slot : machineSlots) {
      for (const auto idx : slot) {
        if (idx >= jobs.size()) {
          throw ValidationError("schedule references a job index out of range");
        }
        ++seen[idx];
      }
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != 1) {
      throw ValidationError("job " + jobs[i].id + " appears " + std::to_string(seen[i]) +
                            " times in the schedule");
    }
  }
}

std::vector<std::size_t> Schedule::machineJobs(std::size_t machine) const {
  std::vector<std::size_t> out;
  for (const auto& slot : slots.at(machine)) {
    out.insert(out.end(), slot.begin(), slot.end());
  }
  return out;
}

double jobNoise(const CircuitProxy& proxy, const Machine& machine) {
  if (!proxy.isFragment()) {
    if (const auto f = baseNoise(proxy, machine)) {
      return f->value;
    }
  }
  return proxy.baseNoise.value_or(0.0);
}

namespace {

double preferenceTerm(const CircuitProxy& job, const Machine& machine, const CostWeights& w) {
  if (!job.tau) {
    return 0.0;
  }
  const bool onPreferred = *job.tau == machine.id;
  switch (w.preference) {
  case PreferenceTerm::AsWritten:
    return onPreferred ? job.sigma * w.beta : 0.0;
  case PreferenceTerm::PenaltyWhenOff:
    return onPreferred ? 0.0 : job.sigma * w.beta;
  }
  return 0.0;
}

} // namespace

EvaluationResult evaluate(const Schedule& schedule, std::span<const Machine> machines) {
  if (schedule.machineCount() != machines.size()) {
    throw ValidationError("schedule has " + std::to_string(schedule.machineCount()) +
                          " machines, platform has " + std::to_string(machines.size()));
  }
  EvaluationResult result;
  result.perJob.resize(schedule.jobs.size());
  result.machineScore.resize(machines.size());
  result.machineSpan.resize(machines.size(), 0.0);
  const auto& w = schedule.weights;

  for (std::size_t m = 0; m < machines.size(); ++m) {
    const Machine& machine = machines[m];
    double clock = 0.0;
    const CircuitProxy* previous = nullptr;
    double worstTerm = 0.0;
    for (const auto& slot : schedule.slots[m]) {
      if (slot.empty()) {
        continue;
      }
      const double start =
          clock + setupTime(previous, schedule.jobs.at(slot.front()), machine);
      double slotEnd = start;
      std::size_t lastFinishing = slot.front();
      int used = 0;
      for (const auto idx : slot) {
        const CircuitProxy& job = schedule.jobs.at(idx);
        if (!job.basePTime) {
          throw ValidationError("job " + job.id + " has no processing time estimate");
        }
        const double completion = start + *job.basePTime;
        result.perJob[idx] = {start, completion};
        if (completion > slotEnd) {
          slotEnd = completion;
          lastFinishing = idx;
        }
        used += job.q;
        worstTerm = std::max(worstTerm, completion * job.rho * w.alpha +
                                            preferenceTerm(job, machine, w));
        result.noise += jobNoise(job, machine);
        result.makespan = std::max(result.makespan, completion);
        result.machineSpan[m] = std::max(result.machineSpan[m], completion);
      }
      if (used > machine.capacity) {
        result.valid = false;
      }
      clock = slotEnd;
      previous = &schedule.jobs[lastFinishing];
    }
    result.machineScore[m] = machine.queueLength() + worstTerm;
    result.cost = m == 0 ? result.machineScore[m] : std::max(result.cost, result.machineScore[m]);
  }
  return result;
}

void stampTimings(Schedule& schedule, const EvaluationResult& result) {
  if (result.perJob.size() != schedule.jobs.size()) {
    throw ValidationError("evaluation does not belong to this schedule");
  }
  for (std::size_t i = 0; i < schedule.jobs.size(); ++i) {
    schedule.jobs[i].b = result.perJob[i].start;
    schedule.jobs[i].c = result.perJob[i].completion;
  }
}

bool isValid(const Schedule& schedule, std::span<const Machine> machines) {
  if (schedule.machineCount() != machines.size()) {
    return false;
  }
  for (std::size_t m = 0; m < machines.size(); ++m) {
    for (const auto& slot : schedule.slots[m]) {
      int used = 0;
      for (const auto idx : slot) {
        used += schedule.jobs.at(idx).q;
      }
      if (used > machines[m].capacity) {
        return false;
      }
    }
  }
  return true;
}

namespace {

struct Placement {
  std::vector<std::size_t> machineOf;  // per job index
  std::vector<double> span;            // per machine
};

Placement placementOf(const Schedule& s) {
  Placement p;
  p.machineOf.assign(s.jobs.size(), SIZE_MAX);
  p.span.assign(s.machineCount(), 0.0);
  for (std::size_t m = 0; m < s.machineCount(); ++m) {
    for (const auto& slot : s.slots[m]) {
      for (const auto idx : slot) {
        const auto& job = s.jobs.at(idx);
        if (!job.b || !job.c) {
          throw ValidationError("distance needs evaluated schedules (job " + job.id +
                                " has no timing)");
        }
        p.machineOf[idx] = m;
        p.span[m] = std::max(p.span[m], *job.c);
      }
    }
  }
  return p;
}

bool sameJobOrder(const Schedule& a, const Schedule& b) {
  if (a.jobs.size() != b.jobs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.jobs.size(); ++i) {
    if (a.jobs[i].id != b.jobs[i].id) {
      return false;
    }
  }
  return true;
}

} // namespace

double distance(const Schedule& lhs, const Schedule& rhs, JobSetPolicy policy) {
  if (lhs.machineCount() != rhs.machineCount()) {
    throw ValidationError("distance: schedules cover different machine sets");
  }
  const Placement pl = placementOf(lhs);
  const Placement pr = placementOf(rhs);

  // counterpart[i] is the index in rhs of lhs job i, SIZE_MAX when absent
  std::vector<std::size_t> counterpart(lhs.jobs.size(), SIZE_MAX);
  std::vector<bool> rhsMatched(rhs.jobs.size(), false);
  if (sameJobOrder(lhs, rhs)) {
    for (std::size_t i = 0; i < lhs.jobs.size(); ++i) {
      counterpart[i] = i;
      rhsMatched[i] = true;
    }
  } else {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(rhs.jobs.size());
    for (std::size_t j = 0; j < rhs.jobs.size(); ++j) {
      index.emplace(rhs.jobs[j].id, j);
    }
    for (std::size_t i = 0; i < lhs.jobs.size(); ++i) {
      if (const auto it = index.find(lhs.jobs[i].id); it != index.end()) {
        counterpart[i] = it->second;
        rhsMatched[it->second] = true;
      }
    }
    if (policy == JobSetPolicy::RequireSame &&
        (lhs.jobs.size() != rhs.jobs.size() ||
         std::find(rhsMatched.begin(), rhsMatched.end(), false) != rhsMatched.end())) {
      throw ValidationError("distance: schedules hold different job sets");
    }
  }

  // per-job terms, summed in sorted order so that swapping the arguments is exact
  std::vector<double> terms;
  terms.reserve(lhs.jobs.size() + rhs.jobs.size());
  for (std::size_t i = 0; i < lhs.jobs.size(); ++i) {
    const std::size_t m = pl.machineOf[i];
    const std::size_t j = counterpart[i];
    if (j != SIZE_MAX && pr.machineOf[j] == m) {
      terms.push_back(std::abs(*lhs.jobs[i].b - *rhs.jobs[j].b));
      continue;
    }
    // job left machine m (or is unknown to rhs)
    const double left = std::max(pl.span[m], pr.span[m]);
    if (j == SIZE_MAX) {
      terms.push_back(left);
      continue;
    }
    const std::size_t other = pr.machineOf[j];
    terms.push_back(left + std::max(pl.span[other], pr.span[other]));
  }
  for (std::size_t j = 0; j < rhs.jobs.size(); ++j) {
    if (!rhsMatched[j]) {
      const std::size_t m = pr.machineOf[j];
      terms.push_back(std::max(pl.span[m], pr.span[m]));
    }
  }
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (const double t : terms) {
    total += t;
  }
  return total;
}

} // namespace qsched
