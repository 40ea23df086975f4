#pragma once

#include "qsched/circuit.hpp"
#include "qsched/cutting.hpp"
#include "qsched/machine.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qsched {

/// How the strictness term enters the machine score.
enum class PreferenceTerm {
  /// + sigma * beta when the job runs on its preferred machine.
  AsWritten,
  /// + sigma * beta when a job with a preference runs elsewhere.
  PenaltyWhenOff,
};

struct CostWeights {
  double alpha = 1.0;
  double beta = 1.0;
  PreferenceTerm preference = PreferenceTerm::AsWritten;
};

/// A cut that a scheduler decided on, recorded against the cut job's id.
struct CutRecord {
  std::string jobId;
  CutPlan plan;
};

/// Concurrently executed jobs on one machine, as indices into Schedule::jobs.
using Timeslot = std::vector<std::size_t>;

struct JobPosition {
  std::size_t machine = 0;
  std::size_t slot = 0;
  std::size_t index = 0;  // position inside the timeslot
};

/**
 * Assignment of proxies to (machine, timeslot). Machines are addressed by
 * their position in the machine list the schedule is evaluated against.
 * Over-capacity timeslots are representable; isValid reports them.
 */
struct Schedule {
  std::vector<CircuitProxy> jobs;
  std::vector<std::vector<Timeslot>> slots;  // [machine][timeslot]
  CostWeights weights;
  std::vector<CutRecord> cuts;

  static Schedule empty(std::size_t machineCount, CostWeights weights = {});

  [[nodiscard]] std::size_t machineCount() const { return slots.size(); }
  [[nodiscard]] std::optional<JobPosition> locate(std::size_t job) const;
  [[nodiscard]] std::optional<std::size_t> findJob(const std::string& id) const;

  /// Adds a job and places it in slot `slot` of `machine`; a slot index equal
  /// to the current slot count opens a new timeslot at the end.
  std::size_t addJob(CircuitProxy proxy, std::size_t machine, std::size_t slot);
  std::size_t addJobInNewSlot(CircuitProxy proxy, std::size_t machine);

  /// Drops empty timeslots.
  void compact();

  /// Removes job `job` from the job list and its slot, renumbering indices.
  void removeJob(std::size_t job);

  /// Throws ValidationError unless every job sits in exactly one slot.
  void checkConsistency() const;

  /// Jobs assigned to `machine`, in (timeslot, within-slot) order.
  [[nodiscard]] std::vector<std::size_t> machineJobs(std::size_t machine) const;
};

struct JobTiming {
  double start = 0.0;
  double completion = 0.0;
};

struct EvaluationResult {
  std::vector<JobTiming> perJob;       // indexed like Schedule::jobs
  std::vector<double> machineScore;    // P_m
  std::vector<double> machineSpan;     // max completion per machine, 0 when empty
  double cost = 0.0;                   // P_max
  double makespan = 0.0;
  double noise = 0.0;                  // F
  bool valid = true;
};

/// Noise f(i, m) used by the evaluator: per-machine base noise for root jobs
/// that fit, the proxy's stored estimate for fragments.
double jobNoise(const CircuitProxy& proxy, const Machine& machine);

/**
 * Completion-time recursion, machine scores, P_max, makespan and noise.
 *
 * Timeslots are chained per machine. All members of a slot start together
 * after the setup from the last-finishing job of the previous slot to the
 * slot's first job; each member completes after its own processing time and
 * the slot spans its longest member. Throws ValidationError when a job has no
 * time estimate or the machine count does not match.
 */
EvaluationResult evaluate(const Schedule& schedule, std::span<const Machine> machines);

/// Copies start/completion times from an evaluation into the schedule's proxies.
void stampTimings(Schedule& schedule, const EvaluationResult& result);

/// True iff every timeslot's qubit sum is within its machine's capacity.
bool isValid(const Schedule& schedule, std::span<const Machine> machines);

enum class JobSetPolicy {
  /// Throw ValidationError unless both schedules hold the same job ids.
  RequireSame,
  /// Jobs present in only one schedule count as placed elsewhere.
  AllowDisjoint,
};

/**
 * Hamming-style distance between two timed schedules (see stampTimings).
 * For every machine m and every job placed on m in either schedule: the start
 * time difference when the job is on m in both, otherwise the larger of the
 * two machine spans max_{i on m} c_i.
 */
double distance(const Schedule& lhs, const Schedule& rhs,
                JobSetPolicy policy = JobSetPolicy::RequireSame);

} // namespace qsched
