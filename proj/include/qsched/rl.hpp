#pragma once

#include "qsched/circuit.hpp"
#include "qsched/machine.hpp"
#include "qsched/schedule.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qsched::rl {

/// Split job `job` into qubits [0, qubit) and [qubit, q).
struct CutAction {
  std::size_t job = 0;
  int qubit = 0;
};
/// Move job `job` to timeslot `timeslot` of `machine`; the slot count opens
/// a new timeslot at the end.
struct MoveAction {
  std::size_t job = 0;
  std::size_t machine = 0;
  std::size_t timeslot = 0;
};
struct SwapAction {
  std::size_t first = 0;
  std::size_t second = 0;
};
struct TerminateAction {};

using Action = std::variant<CutAction, MoveAction, SwapAction, TerminateAction>;

std::string describe(const Action& action);

/// Flat feature vector: one row per job slot (padded with zeros), then one
/// row per machine.
struct Observation {
  static constexpr std::size_t kJobFeatures = 7;
  static constexpr std::size_t kMachineFeatures = 2;
  std::vector<double> values;
  std::size_t jobRows = 0;
  std::size_t machineRows = 0;
};

struct EnvConfig {
  double mu = 0.5;
  double nu = 5.0;
  CostWeights weights;
  /// Defaults to mu * (sum of batch processing times) * 20.
  std::optional<double> penalty;
  /// Defaults to 10 * batch size.
  std::optional<int> maxSteps;
  /// Job rows in the observation; defaults to 2 * batch size.
  std::optional<std::size_t> maxJobs;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  bool invalidAction = false;
  bool invalidState = false;
  double cost = 0.0;   // P_max of the state after the step
  double noise = 0.0;  // F of the state after the step
};

/**
 * Scheduling MDP. Episodes start from the bin-packing schedule of the batch.
 * Every step is rewarded with -(mu * P_max + nu * F) of the resulting
 * schedule, minus the penalty when the action was invalid or the schedule
 * is over capacity. Invalid actions leave the state unchanged; step never
 * throws.
 */
class SchedulingEnv {
public:
  SchedulingEnv(std::vector<CircuitProxy> batch, std::vector<Machine> machines,
                EnvConfig config = {});

  Observation reset();
  StepResult step(const Action& action);

  [[nodiscard]] const Schedule& current() const { return current_; }
  [[nodiscard]] const Schedule& initial() const { return initial_; }
  [[nodiscard]] const std::vector<Machine>& machines() const { return machines_; }
  [[nodiscard]] bool done() const { return done_; }
  [[nodiscard]] int stepCount() const { return steps_; }
  [[nodiscard]] int maxSteps() const { return maxSteps_; }
  [[nodiscard]] double penalty() const { return penalty_; }
  [[nodiscard]] const EnvConfig& config() const { return config_; }

  /// -(mu * P_max + nu * F) of a schedule.
  [[nodiscard]] double scheduleReward(const Schedule& schedule) const;

  [[nodiscard]] Observation observe() const;
  [[nodiscard]] std::size_t observationSize() const;

  /// Discrete action space: every cut position, move target and job pair
  /// over the padded job rows, plus Terminate.
  [[nodiscard]] std::size_t actionCount() const;
  [[nodiscard]] Action decode(std::size_t index) const;

private:
  [[nodiscard]] Observation observeWith(const EvaluationResult& eval) const;
  bool apply(const Action& action);
  bool applyCut(const CutAction& action);
  bool applyMove(const MoveAction& action);
  bool applySwap(const SwapAction& action);

  std::vector<CircuitProxy> batch_;
  std::vector<Machine> machines_;
  EnvConfig config_;
  Schedule initial_;
  Schedule current_;
  double penalty_ = 0.0;
  int maxSteps_ = 0;
  std::size_t maxJobs_ = 0;
  int maxCutPosition_ = 1;
  bool done_ = false;
  int steps_ = 0;

  // observation scales
  double scaleQ_ = 1.0;
  double scaleD_ = 1.0;
  double scaleP_ = 1.0;
  double scaleC_ = 1.0;
  double scaleL_ = 1.0;
};

/// Linear softmax policy with a linear value baseline.
struct Policy {
  std::size_t observationSize = 0;
  std::size_t actionCount = 0;
  std::vector<double> actionWeights;  // actionCount x (observationSize + 1)
  std::vector<double> valueWeights;   // observationSize + 1

  static Policy zeros(std::size_t observationSize, std::size_t actionCount);

  [[nodiscard]] std::vector<double> probabilities(const Observation& obs) const;
  [[nodiscard]] double value(const Observation& obs) const;
  [[nodiscard]] std::size_t greedy(const Observation& obs) const;
};

struct TrainConfig {
  /// Policy updates; each consumes `episodesPerUpdate` fresh episodes.
  int iterations = 5000;
  int episodesPerUpdate = 1;
  int epochs = 4;
  double clip = 0.2;
  double learningRate = 0.05;
  double valueLearningRate = 0.05;
  double entropyBonus = 0.05;
  double gamma = 0.99;
};

struct CurvePoint {
  int iteration = 0;
  double meanReward = 0.0;
};

struct TrainResult {
  Policy policy;
  std::vector<CurvePoint> curve;
  int policyUpdates = 0;
  long long environmentSteps = 0;
};

/**
 * Clipped-surrogate policy optimisation. Each update collects episodes with
 * the current stochastic policy, computes discounted returns against the
 * value baseline and runs a few epochs of clipped policy-gradient ascent.
 * Rewards are divided by the environment penalty for conditioning. An
 * episode ended by a valid Terminate keeps its final reward for the remaining
 * steps of the horizon, so stopping early is not a way to dodge step costs.
 */
TrainResult train(const std::function<SchedulingEnv()>& envFactory, const TrainConfig& config,
                  std::uint64_t seed);

/// Greedy rollout; returns the final schedule when valid, else the best valid
/// schedule seen on the way, else the initial schedule.
Schedule extractSchedule(const Policy& policy, SchedulingEnv& env);

} // namespace qsched::rl
