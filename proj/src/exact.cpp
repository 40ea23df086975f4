#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"
#include "qsched/schedulers.hpp"

#include <algorithm>
#include <limits>

namespace qsched {

namespace {

/// Depth-first enumeration of every valid schedule of a fixed job list.
/// Machines are filled one after another; on the open machine a job either
/// opens a new timeslot or joins the last one. Each schedule is produced
/// exactly once, and because appending never lowers a machine score the
/// running maximum prunes against the incumbent.
class ExactSearch {
public:
  ExactSearch(const std::vector<CircuitProxy>& jobs, std::span<const Machine> machines,
              CostWeights weights)
      : jobs_(jobs), machines_(machines), weights_(weights), placed_(jobs.size(), false) {
    current_ = Schedule::empty(machines.size(), weights);
    current_.jobs = jobs;
  }

  void run() { extend(0, 0.0, 0, std::nullopt, 0.0); }

  [[nodiscard]] bool found() const { return found_; }
  [[nodiscard]] double bestCost() const { return bestCost_; }
  [[nodiscard]] const Schedule& best() const { return best_; }
  void setIncumbent(double cost) { bestCost_ = cost; }

private:
  struct SlotState {
    double start = 0.0;
    double end = 0.0;
    std::size_t lastFinishing = 0;
    int used = 0;
  };

  double term(const CircuitProxy& job, std::size_t m, double completion) const {
    double pref = 0.0;
    if (job.tau) {
      const bool on = *job.tau == machines_[m].id;
      if (weights_.preference == PreferenceTerm::AsWritten) {
        pref = on ? job.sigma * weights_.beta : 0.0;
      } else {
        pref = on ? 0.0 : job.sigma * weights_.beta;
      }
    }
    return completion * job.rho * weights_.alpha + pref;
  }

  // `slot` describes the last open timeslot on machine m; `worst` is the
  // largest completion term on m so far.
  void extend(std::size_t m, double closedMax, std::size_t placedCount,
              std::optional<SlotState> slot, double worst) {
    const double machineScore = machines_[m].queueLength() + worst;
    const double running = std::max(closedMax, machineScore);
    if (running >= bestCost_) {
      return;
    }
    if (placedCount == jobs_.size()) {
      double total = running;
      for (std::size_t k = m + 1; k < machines_.size(); ++k) {
        total = std::max(total, machines_[k].queueLength());
      }
      if (total < bestCost_) {
        found_ = true;
        bestCost_ = total;
        best_ = current_;
        best_.compact();
      }
      return;
    }
    // close this machine and continue with the next one
    if (m + 1 < machines_.size()) {
      extend(m + 1, running, placedCount, std::nullopt, 0.0);
    }
    const Machine& machine = machines_[m];
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
      if (placed_[j] || jobs_[j].q > machine.capacity) {
        continue;
      }
      const CircuitProxy& job = jobs_[j];
      const double p = *job.basePTime;
      placed_[j] = true;

      // new timeslot
      {
        const CircuitProxy* prev = slot ? &jobs_[slot->lastFinishing] : nullptr;
        SlotState next;
        next.start = (slot ? slot->end : 0.0) + setupTime(prev, job, machine);
        next.end = next.start + p;
        next.lastFinishing = j;
        next.used = job.q;
        current_.slots[m].push_back({j});
        extend(m, closedMax, placedCount + 1, next,
               std::max(worst, term(job, m, next.start + p)));
        current_.slots[m].pop_back();
      }
      // join the open timeslot
      if (slot && slot->used + job.q <= machine.capacity) {
        SlotState next = *slot;
        const double completion = next.start + p;
        if (completion > next.end) {
          next.end = completion;
          next.lastFinishing = j;
        }
        next.used += job.q;
        current_.slots[m].back().push_back(j);
        extend(m, closedMax, placedCount + 1, next, std::max(worst, term(job, m, completion)));
        current_.slots[m].back().pop_back();
      }
      placed_[j] = false;
    }
  }

  const std::vector<CircuitProxy>& jobs_;
  std::span<const Machine> machines_;
  CostWeights weights_;
  std::vector<bool> placed_;
  Schedule current_;
  Schedule best_;
  bool found_ = false;
  double bestCost_ = std::numeric_limits<double>::infinity();
};

inline constexpr std::size_t kExactMaxExpandedJobs = 8;

} // namespace

Schedule exactSchedule(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                       const std::vector<std::vector<CutPlan>>& cutOptions, CostWeights weights) {
  if (batch.size() > kExactMaxJobs || machines.size() > kExactMaxMachines) {
    throw InstanceTooLarge("exact scheduling supports at most 6 jobs on 3 machines");
  }
  if (batch.empty() || machines.empty()) {
    throw ValidationError("exact scheduling needs jobs and machines");
  }
  if (!cutOptions.empty() && cutOptions.size() != batch.size()) {
    throw ValidationError("cut options must be given per job");
  }
  for (const auto& options : cutOptions) {
    if (options.size() > kExactMaxCutOptions) {
      throw InstanceTooLarge("exact scheduling supports at most 2 cut options per job");
    }
  }
  for (const auto& job : batch) {
    if (!job.basePTime) {
      throw ValidationError("job " + job.id + " has no processing time estimate");
    }
  }

  // variants[j][0] is the whole job, the rest are its cut alternatives
  std::vector<std::vector<std::vector<CircuitProxy>>> variants(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    variants[j].push_back({batch[j]});
    if (!cutOptions.empty()) {
      for (const auto& plan : cutOptions[j]) {
        const auto outcome = applyCutToProxy(batch[j], plan, machines);
        variants[j].push_back({outcome.fragmentProxies[0], outcome.fragmentProxies[1]});
      }
    }
  }

  std::vector<std::size_t> choice(batch.size(), 0);
  bool found = false;
  double bestCost = std::numeric_limits<double>::infinity();
  Schedule best;
  while (true) {
    std::vector<CircuitProxy> jobs;
    std::vector<CutRecord> cuts;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const auto& pick = variants[j][choice[j]];
      jobs.insert(jobs.end(), pick.begin(), pick.end());
      if (choice[j] > 0) {
        cuts.push_back({batch[j].id, cutOptions[j][choice[j] - 1]});
      }
    }
    if (jobs.size() > kExactMaxExpandedJobs) {
      throw InstanceTooLarge("exact scheduling: cut choices expand beyond 8 jobs");
    }
    ExactSearch search(jobs, machines, weights);
    if (found) {
      search.setIncumbent(bestCost);
    }
    search.run();
    if (search.found() && (!found || search.bestCost() < bestCost)) {
      found = true;
      bestCost = search.bestCost();
      best = search.best();
      best.cuts = std::move(cuts);
    }

    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == variants[k].size()) {
      choice[k] = 0;
      ++k;
    }
    if (k == choice.size()) {
      break;
    }
  }
  if (!found) {
    throw InfeasibleJob("no valid schedule exists for this batch");
  }
  return best;
}

} // namespace qsched
