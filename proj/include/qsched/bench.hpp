#pragma once

#include "qsched/circuit.hpp"
#include "qsched/machine.hpp"
#include "qsched/rl.hpp"
#include "qsched/schedule.hpp"
#include "qsched/schedulers.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qsched::bench {

struct MachineSpec {
  std::string id;
  int capacity = 5;
  EstimateModel model;
};

struct WorkloadSpec {
  int batchCount = 10;
  int jobsPerBatchTarget = 5;
  int minQubits = 2;
  int maxQubits = 9;
  int minDepth = 4;
  int maxDepth = 16;
  double cxDensity = 0.3;
  std::int64_t shots = kDefaultShots;
  /// Chance that a job names a preferred machine.
  double preferenceProbability = 0.5;
  double sigmaMin = 0.5;  // exclusive
  double sigmaMax = 3.0;  // inclusive
  /// Machine-independent coefficients for the initial processing-time estimate.
  double estimatorPerLayerTime = 0.1;
  double estimatorPerShotReadout = 0.001;
  /// Pre-existing device load in seconds, drawn per machine.
  double loadMin = 0.0;
  double loadMax = 5.0;
};

struct RlSettings {
  rl::TrainConfig train;
  /// Observation rows; 0 means twice the batch size.
  std::size_t maxJobs = 0;
  /// Episode bound; 0 means ten times the batch size.
  int maxSteps = 0;
};

struct SchedulingConfig {
  int batchSize = 5;
  /// Qubit threshold t; 0 means the sum of all machine capacities.
  int batchThreshold = 0;
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 0.5;
  double nu = 5.0;
  bool backfilling = false;
  PreferenceTerm preference = PreferenceTerm::AsWritten;
  ScatterConfig scatter;
  RlSettings rl;
};

struct Seeds {
  std::uint64_t workload = 1;
  std::uint64_t prepopulate = 2;
  std::uint64_t scatter = 3;
  std::uint64_t rl = 4;
};

struct BenchmarkScenario {
  std::string name;
  std::vector<MachineSpec> machines;
  WorkloadSpec workload;
  SchedulingConfig config;
  Seeds seeds;

  /// Throws ValidationError naming the offending field path.
  void validate() const;
};

/// Batch size 5, alpha 1, beta 1, mu 0.5, nu 5, backfilling off.
SchedulingConfig defaultConfig();

/// "5-7" or "5-5-7".
BenchmarkScenario builtinScenario(const std::string& name);

/// Reseeds all streams from one base seed.
void reseed(BenchmarkScenario& scenario, std::uint64_t seed);

/// Circuits and root proxies submitted in one run; identical for every
/// scheduler under fixed seeds.
struct Workload {
  std::vector<std::shared_ptr<const Circuit>> circuits;
  std::vector<CircuitProxy> proxies;
};

Workload generateWorkload(const BenchmarkScenario& scenario, std::span<const Machine> machines);

std::vector<Machine> buildMachines(const BenchmarkScenario& scenario);

inline constexpr const char* kBaseline = "baseline";
inline constexpr const char* kHeuristic = "heuristic";
inline constexpr const char* kRl = "rl";

struct BatchRow {
  std::string scheduler;
  int batch = 0;
  double makespan = 0.0;
  double pmax = 0.0;
  double noise = 0.0;
  double runtimeSeconds = 0.0;
  double scheduleSeconds = 0.0;
  double cutSeconds = 0.0;
  int jobs = 0;
  int fragments = 0;
  int cuts = 0;
};

struct SchedulerSummary {
  std::string scheduler;
  int batches = 0;
  double meanMakespan = 0.0;
  double meanPmax = 0.0;
  double meanNoise = 0.0;
  double meanRuntime = 0.0;
  double medianMakespan = 0.0;
  double medianPmax = 0.0;
  double medianNoise = 0.0;
  /// (baseline - this) / baseline on the means; absent for the baseline.
  std::optional<double> pmaxImprovement;
  std::optional<double> makespanImprovement;
  std::optional<double> noiseImprovement;
};

struct BenchmarkReport {
  std::string scenario;
  std::vector<BatchRow> rows;
  std::vector<SchedulerSummary> summaries;
  std::vector<std::string> notes;
};

struct RunOptions {
  /// Record wall-clock times. Off gives byte-reproducible reports.
  bool timing = true;
};

/**
 * Runs every requested scheduler on a fresh, identically seeded platform:
 * form a batch, schedule it, cut the real circuits as planned, re-estimate
 * time and noise from the fragments, evaluate, and enqueue. Stops after
 * workload.batchCount batches or when the queue runs dry.
 */
BenchmarkReport runBenchmark(const BenchmarkScenario& scenario,
                             const std::vector<std::string>& schedulers, RunOptions options = {});

/// Per-scheduler means, medians and improvements over the baseline rows.
std::vector<SchedulerSummary> summarize(const std::vector<BatchRow>& rows);

/**
 * Re-derives every fragment by cutting the submitted circuits as recorded in
 * the schedule and replaces the fragment noise estimate by the base noise of
 * the fragment circuit on the machine it is assigned to. Throws
 * ValidationError when a fragment does not match its re-derived circuit.
 */
Schedule materializeCuts(const Schedule& schedule,
                         const std::map<std::string, std::shared_ptr<const Circuit>>& roots,
                         std::span<const Machine> machines);

enum class ReportFormat { Json, Csv };

std::string renderCsv(const BenchmarkReport& report);
std::string renderJson(const BenchmarkReport& report);

/// Throws Error when the file cannot be written.
void emitReport(const BenchmarkReport& report, ReportFormat format,
                const std::filesystem::path& path);

} // namespace qsched::bench
