#include "qsched/errors.hpp"
#include "qsched/rl.hpp"
#include "qsched/schedulers.hpp"

#include <algorithm>
#include <sstream>

namespace qsched::rl {

std::string describe(const Action& action) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, CutAction>) {
          os << "cut(job=" << a.job << ", qubit=" << a.qubit << ")";
        } else if constexpr (std::is_same_v<T, MoveAction>) {
          os << "move(job=" << a.job << ", machine=" << a.machine << ", slot=" << a.timeslot
             << ")";
        } else if constexpr (std::is_same_v<T, SwapAction>) {
          os << "swap(" << a.first << ", " << a.second << ")";
        } else {
          os << "terminate";
        }
      },
      action);
  return os.str();
}

SchedulingEnv::SchedulingEnv(std::vector<CircuitProxy> batch, std::vector<Machine> machines,
                             EnvConfig config)
    : batch_(std::move(batch)), machines_(std::move(machines)), config_(config) {
  if (batch_.empty() || machines_.empty()) {
    throw ValidationError("scheduling environment needs jobs and machines");
  }
  initial_ = binpackSchedule(batch_, machines_, config_.weights);
  double totalTime = 0.0;
  for (const auto& job : initial_.jobs) {
    totalTime += job.basePTime.value_or(0.0);
  }
  penalty_ = config_.penalty.value_or(config_.mu * totalTime * 20.0);
  maxSteps_ = config_.maxSteps.value_or(10 * static_cast<int>(batch_.size()));
  maxJobs_ = std::max(config_.maxJobs.value_or(2 * batch_.size()), initial_.jobs.size());
  if (maxSteps_ < 1) {
    throw ValidationError("maxSteps must be >= 1");
  }

  int widest = 1;
  double longestQueue = 0.0;
  double worstSetup = 0.0;
  for (const auto& m : machines_) {
    widest = std::max(widest, m.capacity);
    longestQueue = std::max(longestQueue, m.queueLength());
    worstSetup = std::max({worstSetup, m.model.baseSetup, m.model.fragmentSetup});
  }
  maxCutPosition_ = std::max(1, widest - 1);
  int deepest = 1;
  for (const auto& job : initial_.jobs) {
    deepest = std::max(deepest, job.d);
  }
  scaleQ_ = widest;
  scaleD_ = deepest;
  scaleP_ = totalTime > 0.0 ? totalTime : 1.0;
  scaleC_ = totalTime + worstSetup * static_cast<double>(maxJobs_);
  if (scaleC_ <= 0.0) {
    scaleC_ = 1.0;
  }
  scaleL_ = longestQueue > 0.0 ? longestQueue : 1.0;
  reset();
}

Observation SchedulingEnv::reset() {
  current_ = initial_;
  done_ = false;
  steps_ = 0;
  return observe();
}

double SchedulingEnv::scheduleReward(const Schedule& schedule) const {
  const auto eval = evaluate(schedule, machines_);
  return -(config_.mu * eval.cost + config_.nu * eval.noise);
}

std::size_t SchedulingEnv::observationSize() const {
  return maxJobs_ * Observation::kJobFeatures + machines_.size() * Observation::kMachineFeatures;
}

Observation SchedulingEnv::observe() const { return observeWith(evaluate(current_, machines_)); }

Observation SchedulingEnv::observeWith(const EvaluationResult& eval) const {
  Observation obs;
  obs.jobRows = maxJobs_;
  obs.machineRows = machines_.size();
  obs.values.assign(observationSize(), 0.0);
  const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const double machineScale =
      machines_.size() > 1 ? static_cast<double>(machines_.size() - 1) : 1.0;
  for (std::size_t i = 0; i < current_.jobs.size() && i < maxJobs_; ++i) {
    const auto pos = current_.locate(i);
    if (!pos) {
      continue;
    }
    const auto& job = current_.jobs[i];
    double* row = &obs.values[i * Observation::kJobFeatures];
    row[0] = clamp01(static_cast<double>(pos->machine) / machineScale);
    row[1] = clamp01(static_cast<double>(pos->slot) / static_cast<double>(maxJobs_));
    row[2] = clamp01(job.q / scaleQ_);
    row[3] = clamp01(job.d / scaleD_);
    row[4] = clamp01(job.basePTime.value_or(0.0) / scaleP_);
    row[5] = clamp01(jobNoise(job, machines_[pos->machine]));
    row[6] = clamp01(eval.perJob[i].completion / scaleC_);
  }
  double* machineRows = &obs.values[maxJobs_ * Observation::kJobFeatures];
  for (std::size_t m = 0; m < machines_.size(); ++m) {
    machineRows[m * 2] = clamp01(machines_[m].queueLength() / scaleL_);
    machineRows[m * 2 + 1] = clamp01(machines_[m].capacity / scaleQ_);
  }
  return obs;
}

std::size_t SchedulingEnv::actionCount() const {
  const std::size_t cuts = maxJobs_ * static_cast<std::size_t>(maxCutPosition_);
  const std::size_t moves = maxJobs_ * machines_.size() * (maxJobs_ + 1);
  const std::size_t swaps = maxJobs_ * (maxJobs_ - 1) / 2;
  return cuts + moves + swaps + 1;
}

Action SchedulingEnv::decode(std::size_t index) const {
  const auto cutPositions = static_cast<std::size_t>(maxCutPosition_);
  const std::size_t cuts = maxJobs_ * cutPositions;
  if (index < cuts) {
    return CutAction{index / cutPositions, static_cast<int>(index % cutPositions) + 1};
  }
  index -= cuts;
  const std::size_t slotChoices = maxJobs_ + 1;
  const std::size_t moves = maxJobs_ * machines_.size() * slotChoices;
  if (index < moves) {
    const std::size_t job = index / (machines_.size() * slotChoices);
    const std::size_t rest = index % (machines_.size() * slotChoices);
    return MoveAction{job, rest / slotChoices, rest % slotChoices};
  }
  index -= moves;
  const std::size_t swaps = maxJobs_ * (maxJobs_ - 1) / 2;
  if (index < swaps) {
    std::size_t a = 0;
    std::size_t row = maxJobs_ - 1;
    while (index >= row) {
      index -= row;
      ++a;
      --row;
    }
    return SwapAction{a, a + 1 + index};
  }
  return TerminateAction{};
}

bool SchedulingEnv::applyCut(const CutAction& action) {
  if (action.job >= current_.jobs.size() || current_.jobs.size() + 1 > maxJobs_) {
    return false;
  }
  const CircuitProxy& job = current_.jobs[action.job];
  if (job.q <= 1 || action.qubit <= 0 || action.qubit >= job.q || !job.circuit) {
    return false;
  }
  const auto pos = current_.locate(action.job);
  if (!pos) {
    return false;
  }
  std::vector<std::uint8_t> partition(static_cast<std::size_t>(job.q), 0);
  for (int i = action.qubit; i < job.q; ++i) {
    partition[static_cast<std::size_t>(i)] = 1;
  }
  try {
    const CutPlan plan = planFromPartition(Connectivity(*job.circuit), std::move(partition));
    const CutOutcome outcome = applyCutToProxy(job, plan, machines_);
    const std::string jobId = job.id;
    current_.removeJob(action.job);
    for (const auto& fragment : outcome.fragmentProxies) {
      current_.addJobInNewSlot(fragment, pos->machine);
    }
    current_.cuts.push_back({jobId, plan});
  } catch (const Error&) {
    return false;
  }
  return true;
}

bool SchedulingEnv::applyMove(const MoveAction& action) {
  if (action.job >= current_.jobs.size() || action.machine >= machines_.size() ||
      action.timeslot > current_.slots[action.machine].size()) {
    return false;
  }
  const auto from = current_.locate(action.job);
  if (!from || (from->machine == action.machine && from->slot == action.timeslot)) {
    return false;
  }
  auto& target = current_.slots[action.machine];
  if (action.timeslot == target.size()) {
    target.emplace_back();
  }
  target[action.timeslot].push_back(action.job);
  auto& source = current_.slots[from->machine][from->slot];
  source.erase(source.begin() + static_cast<std::ptrdiff_t>(from->index));
  current_.compact();
  return true;
}

bool SchedulingEnv::applySwap(const SwapAction& action) {
  const std::size_t n = current_.jobs.size();
  if (action.first >= n || action.second >= n || action.first == action.second) {
    return false;
  }
  const auto a = current_.locate(action.first);
  const auto b = current_.locate(action.second);
  if (!a || !b) {
    return false;
  }
  current_.slots[a->machine][a->slot][a->index] = action.second;
  current_.slots[b->machine][b->slot][b->index] = action.first;
  return true;
}

bool SchedulingEnv::apply(const Action& action) {
  return std::visit(
      [this](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, CutAction>) {
          return applyCut(a);
        } else if constexpr (std::is_same_v<T, MoveAction>) {
          return applyMove(a);
        } else if constexpr (std::is_same_v<T, SwapAction>) {
          return applySwap(a);
        } else {
          if (!isValid(current_, machines_)) {
            return false;
          }
          done_ = true;
          return true;
        }
      },
      action);
}

StepResult SchedulingEnv::step(const Action& action) {
  StepResult result;
  if (done_) {
    result.invalidAction = true;
  } else {
    ++steps_;
    result.invalidAction = !apply(action);
    if (steps_ >= maxSteps_) {
      done_ = true;
    }
  }
  const auto eval = evaluate(current_, machines_);
  result.cost = eval.cost;
  result.noise = eval.noise;
  result.invalidState = !eval.valid;
  result.reward = -(config_.mu * eval.cost + config_.nu * eval.noise);
  if (result.invalidAction || result.invalidState) {
    result.reward -= penalty_;
  }
  result.done = done_;
  result.observation = observeWith(eval);
  return result;
}

} // namespace qsched::rl
