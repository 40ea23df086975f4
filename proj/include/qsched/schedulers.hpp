#pragma once

#include "qsched/circuit.hpp"
#include "qsched/cutting.hpp"
#include "qsched/machine.hpp"
#include "qsched/schedule.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qsched {

/**
 * Cuts a proxy until every piece fits the widest machine. Each step cuts off
 * a block of at most the widest capacity with the fewest crossing gates and
 * recurses on the remainder. Cuts are appended to `cuts`.
 * Throws InfeasibleJob when the proxy is wider than all machines combined.
 */
std::vector<CircuitProxy> cutToFit(const CircuitProxy& proxy, std::span<const Machine> machines,
                                   std::vector<CutRecord>& cuts);

/**
 * First-fit decreasing baseline. Oversize jobs are cut first; jobs are then
 * taken widest first and put into the first (machine, timeslot) with room,
 * opening a timeslot on the least loaded wide-enough machine when none has.
 * Only slot spans count; priorities, preferences and setups are ignored.
 */
Schedule binpackSchedule(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                         CostWeights weights = {});

/// Named initial-population procedures for scatter search.
inline constexpr const char* kInitBinpack = "binpack";
inline constexpr const char* kInitMinOverhead = "min_overhead";
inline constexpr const char* kInitNoCut = "no_cut";

struct ScatterConfig {
  int iterations = 100;         // N
  int eliteSolutions = 5;
  std::vector<std::string> initializations{kInitBinpack, kInitMinOverhead, kInitNoCut};
  int numSwaps = 3;
  int populationSize = 10;
  int parallelism = 1;           // islands
  bool threaded = true;          // run islands on their own threads

  /// Throws ValidationError on counts below one or elite > population.
  void validate() const;
};

/// A schedule with its cached evaluation.
struct Candidate {
  Schedule schedule;  // timings stamped
  EvaluationResult evaluation;

  [[nodiscard]] const std::vector<CutRecord>& cutsApplied() const { return schedule.cuts; }
};

/// Evaluates and stamps a schedule.
Candidate makeCandidate(Schedule schedule, std::span<const Machine> machines);

struct ScatterResult {
  Candidate best;
  /// Best valid cost after initialisation and after every iteration, for
  /// the island that produced `best`.
  std::vector<double> bestCostHistory;
  int island = 0;
};

/**
 * Scatter search. Each island runs the full loop from its own seed:
 * initialise, then N times generate neighbours by swaps and moves, move a
 * timeslot off the most loaded machine, merge, keep the elite and the most
 * diverse candidates and track the best valid one. Islands run concurrently
 * without communication; the lowest cost wins, ties to the lowest island.
 */
ScatterResult scatterSearch(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                            const ScatterConfig& config, std::uint64_t seed,
                            CostWeights weights = {});

inline constexpr std::size_t kExactMaxJobs = 6;
inline constexpr std::size_t kExactMaxMachines = 3;
inline constexpr std::size_t kExactMaxCutOptions = 2;

/**
 * Exhaustive optimum of P_max over machine assignment, timeslot grouping,
 * ordering and the given cut options (each job may also stay whole).
 * Throws InstanceTooLarge beyond 6 jobs, 3 machines or 2 cut options per job,
 * and InfeasibleJob when no valid schedule exists.
 */
Schedule exactSchedule(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                       const std::vector<std::vector<CutPlan>>& cutOptions = {},
                       CostWeights weights = {});

} // namespace qsched
