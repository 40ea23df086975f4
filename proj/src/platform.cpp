#include "qsched/platform.hpp"

#include "qsched/errors.hpp"
#include "qsched/rng.hpp"

#include <set>

namespace qsched {

std::vector<CircuitProxy> SubmissionQueue::popFront(std::size_t count) {
  if (count > items_.size()) {
    throw ValidationError("popFront: not enough queued items");
  }
  std::vector<CircuitProxy> out(std::make_move_iterator(items_.begin()),
                                std::make_move_iterator(items_.begin() +
                                                        static_cast<std::ptrdiff_t>(count)));
  items_.erase(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

std::vector<CircuitProxy> formBatch(SubmissionQueue& queue, int threshold,
                                    std::optional<std::size_t> maxJobs) {
  if (queue.empty()) {
    return {};
  }
  const auto& items = queue.items();
  const std::size_t limit = maxJobs.value_or(items.size());
  std::size_t count = 0;
  long long sum = 0;
  while (count < items.size() && count < limit && sum + items[count].q <= threshold) {
    sum += items[count].q;
    ++count;
  }
  if (count == 0 && limit > 0) {
    count = 1;  // oversize head travels alone
  }
  return queue.popFront(count);
}

Platform::Platform(std::vector<Machine> machines, PlatformConfig config)
    : machines_(std::move(machines)), config_(config) {
  std::set<std::string> ids;
  for (const auto& m : machines_) {
    if (!ids.insert(m.id).second) {
      throw ValidationError("duplicate machine id " + m.id);
    }
    if (m.capacity < 1) {
      throw ValidationError("machine " + m.id + " needs a positive capacity");
    }
    m.model.validate();
  }
}

SubmissionResult Platform::submit(CircuitProxy proxy) {
  validateProxy(proxy);
  if (!proxy.tau) {
    std::optional<std::size_t> chosen;
    for (std::size_t m = 0; m < machines_.size(); ++m) {
      const auto& machine = machines_[m];
      if (!machine.idle() || machine.capacity < proxy.q) {
        continue;
      }
      if (!chosen || machine.capacity < machines_[*chosen].capacity) {
        chosen = m;
      }
    }
    if (chosen) {
      if (!proxy.basePTime) {
        throw ValidationError("job " + proxy.id + " has no processing time estimate");
      }
      auto& machine = machines_[*chosen];
      QueuedEntry entry;
      entry.timeslot = 0;
      entry.startTime = 0.0;
      entry.endTime = *proxy.basePTime;
      entry.proxies.push_back(std::move(proxy));
      machine.queue.push_back(std::move(entry));
      return {SubmissionKind::Immediate, *chosen, 0};
    }

    if (config_.backfilling && proxy.basePTime) {
      std::optional<std::pair<std::size_t, std::size_t>> slot;
      double earliest = 0.0;
      for (std::size_t m = 0; m < machines_.size(); ++m) {
        const auto& queue = machines_[m].queue;
        for (std::size_t t = 0; t < queue.size(); ++t) {
          const auto& entry = queue[t];
          const bool room = entry.usedQubits() + proxy.q <= machines_[m].capacity;
          const bool inside = *proxy.basePTime <= entry.endTime - entry.startTime;
          if (room && inside && (!slot || entry.startTime < earliest)) {
            slot = std::pair{m, t};
            earliest = entry.startTime;
          }
        }
      }
      if (slot) {
        machines_[slot->first].queue[slot->second].proxies.push_back(std::move(proxy));
        return {SubmissionKind::Backfilled, slot->first, slot->second};
      }
    }
  }
  queue_.push(std::move(proxy));
  return {SubmissionKind::Enqueued, 0, 0};
}

void Platform::enqueueSchedule(const Schedule& schedule) {
  schedule.checkConsistency();
  if (!isValid(schedule, machines_)) {
    throw ValidationError("refusing to enqueue a schedule that exceeds machine capacity");
  }
  const EvaluationResult eval = evaluate(schedule, machines_);
  for (std::size_t m = 0; m < machines_.size(); ++m) {
    auto& machine = machines_[m];
    const double base = machine.queueLength();
    int nextSlot = machine.queue.empty() ? 0 : machine.queue.back().timeslot + 1;
    for (const auto& slot : schedule.slots[m]) {
      if (slot.empty()) {
        continue;
      }
      QueuedEntry entry;
      entry.timeslot = nextSlot++;
      entry.startTime = base + eval.perJob[slot.front()].start;
      entry.endTime = entry.startTime;
      for (const auto idx : slot) {
        entry.endTime = std::max(entry.endTime, base + eval.perJob[idx].completion);
        entry.proxies.push_back(schedule.jobs[idx]);
      }
      machine.queue.push_back(std::move(entry));
    }
  }
}

void prepopulate(std::span<Machine> machines, std::uint64_t seed, double lo, double hi) {
  if (lo < 0.0 || hi < lo) {
    throw ValidationError("prepopulate: load range must be a non-negative interval");
  }
  Rng rng(seed);
  for (auto& m : machines) {
    m.loadOffset = rng.uniform(lo, hi);
  }
}

} // namespace qsched
