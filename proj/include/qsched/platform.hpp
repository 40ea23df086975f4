#pragma once

#include "qsched/circuit.hpp"
#include "qsched/machine.hpp"
#include "qsched/schedule.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace qsched {

/// FIFO of proxies waiting for batch processing.
class SubmissionQueue {
public:
  void push(CircuitProxy proxy) { items_.push_back(std::move(proxy)); }
  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] const std::deque<CircuitProxy>& items() const { return items_; }

  /// Removes and returns the first `count` items.
  std::vector<CircuitProxy> popFront(std::size_t count);

private:
  std::deque<CircuitProxy> items_;
};

/**
 * Longest prefix whose qubit sum stays within `threshold` (and, when given,
 * at most `maxJobs` items). A head item wider than the threshold is returned
 * alone so a scheduler can cut it. Empty queue gives an empty batch.
 */
std::vector<CircuitProxy> formBatch(SubmissionQueue& queue, int threshold,
                                    std::optional<std::size_t> maxJobs = std::nullopt);

struct PlatformConfig {
  bool backfilling = false;
};

enum class SubmissionKind { Immediate, Backfilled, Enqueued };

struct SubmissionResult {
  SubmissionKind kind = SubmissionKind::Enqueued;
  std::size_t machine = 0;
  std::size_t timeslot = 0;
};

/// Machines plus the submission queue; the single owner of platform state.
class Platform {
public:
  Platform(std::vector<Machine> machines, PlatformConfig config = {});

  [[nodiscard]] const std::vector<Machine>& machines() const { return machines_; }
  [[nodiscard]] std::vector<Machine>& machines() { return machines_; }
  [[nodiscard]] SubmissionQueue& queue() { return queue_; }
  [[nodiscard]] const SubmissionQueue& queue() const { return queue_; }
  [[nodiscard]] const PlatformConfig& config() const { return config_; }

  /**
   * Jobs without a machine preference start at once on an idle machine wide
   * enough (smallest such capacity, then lowest index), or, with backfilling
   * enabled, join the earliest queued timeslot that has room for them and
   * ends no earlier than they would. Everything else is enqueued.
   */
  SubmissionResult submit(CircuitProxy proxy);

  /// Appends each (machine, timeslot) group of a valid schedule to its device
  /// queue. Throws ValidationError, leaving the state untouched, otherwise.
  void enqueueSchedule(const Schedule& schedule);

private:
  std::vector<Machine> machines_;
  PlatformConfig config_;
  SubmissionQueue queue_;
};

/// Draws every machine's pre-existing load uniformly from [lo, hi].
void prepopulate(std::span<Machine> machines, std::uint64_t seed, double lo, double hi);

} // namespace qsched
