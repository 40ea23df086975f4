#include "qsched/errors.hpp"
#include "qsched/rl.hpp"
#include "qsched/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsched::rl {

Policy Policy::zeros(std::size_t observationSize, std::size_t actionCount) {
  Policy p;
  p.observationSize = observationSize;
  p.actionCount = actionCount;
  p.actionWeights.assign(actionCount * (observationSize + 1), 0.0);
  p.valueWeights.assign(observationSize + 1, 0.0);
  return p;
}

namespace {

double dotWithBias(const double* weights, const std::vector<double>& x) {
  double sum = weights[x.size()];
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += weights[i] * x[i];
  }
  return sum;
}

void checkShape(const Policy& policy, const Observation& obs) {
  if (obs.values.size() != policy.observationSize) {
    throw ValidationError("observation size does not match the policy");
  }
}

} // namespace

std::vector<double> Policy::probabilities(const Observation& obs) const {
  checkShape(*this, obs);
  const std::size_t stride = observationSize + 1;
  std::vector<double> logits(actionCount);
  for (std::size_t a = 0; a < actionCount; ++a) {
    logits[a] = dotWithBias(&actionWeights[a * stride], obs.values);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (auto& l : logits) {
    l /= total;
  }
  return logits;
}

double Policy::value(const Observation& obs) const {
  checkShape(*this, obs);
  return dotWithBias(valueWeights.data(), obs.values);
}

std::size_t Policy::greedy(const Observation& obs) const {
  const auto probs = probabilities(obs);
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

namespace {

struct Transition {
  Observation observation;
  std::size_t action = 0;
  double oldProbability = 0.0;
  double reward = 0.0;
  double ret = 0.0;
  double advantage = 0.0;
};

std::size_t sample(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    acc += probs[a];
    if (u < acc) {
      return a;
    }
  }
  return probs.size() - 1;
}

} // namespace

TrainResult train(const std::function<SchedulingEnv()>& envFactory, const TrainConfig& config,
                  std::uint64_t seed) {
  if (config.iterations < 1 || config.episodesPerUpdate < 1 || config.epochs < 1) {
    throw ValidationError("training needs at least one iteration, episode and epoch");
  }
  if (!(config.gamma > 0.0 && config.gamma <= 1.0)) {
    throw ValidationError("gamma must be in (0, 1]");
  }
  Rng rng(seed);
  SchedulingEnv env = envFactory();
  TrainResult result;
  result.policy = Policy::zeros(env.observationSize(), env.actionCount());
  Policy& policy = result.policy;
  const std::size_t stride = policy.observationSize + 1;
  const double scale = env.penalty() > 0.0 ? env.penalty() : 1.0;

  std::vector<Transition> batch;
  for (int iter = 0; iter < config.iterations; ++iter) {
    batch.clear();
    double rewardSum = 0.0;
    for (int e = 0; e < config.episodesPerUpdate; ++e) {
      Observation obs = env.reset();
      const std::size_t first = batch.size();
      double running = 0.0;
      while (!env.done()) {
        const auto probs = policy.probabilities(obs);
        const std::size_t a = sample(probs, rng);
        const Action action = env.decode(a);
        StepResult step = env.step(action);
        ++result.environmentSteps;
        rewardSum += step.reward;
        const double reward = step.reward / scale;
        batch.push_back({std::move(obs), a, probs[a], reward, 0.0, 0.0});
        obs = std::move(step.observation);
        if (step.done && !step.invalidAction && std::holds_alternative<TerminateAction>(action)) {
          // the terminal schedule is kept for the rest of the horizon
          const int remaining = env.maxSteps() - env.stepCount();
          running = config.gamma < 1.0
                        ? reward * (1.0 - std::pow(config.gamma, remaining)) / (1.0 - config.gamma)
                        : reward * remaining;
        }
      }
      for (std::size_t k = batch.size(); k-- > first;) {
        running = batch[k].reward + config.gamma * running;
        batch[k].ret = running;
      }
    }
    for (auto& t : batch) {
      t.advantage = t.ret - policy.value(t.observation);
    }
    const double norm = 1.0 / static_cast<double>(batch.size());
    std::vector<double> gradient(policy.actionWeights.size());
    std::vector<double> valueGradient(policy.valueWeights.size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      std::fill(gradient.begin(), gradient.end(), 0.0);
      std::fill(valueGradient.begin(), valueGradient.end(), 0.0);
      for (const auto& t : batch) {
        const auto probs = policy.probabilities(t.observation);
        const double ratio = probs[t.action] / t.oldProbability;
        const bool clipped = (t.advantage >= 0.0 && ratio > 1.0 + config.clip) ||
                             (t.advantage < 0.0 && ratio < 1.0 - config.clip);
        double entropy = 0.0;
        for (const double p : probs) {
          if (p > 0.0) {
            entropy -= p * std::log(p);
          }
        }
        for (std::size_t a = 0; a < policy.actionCount; ++a) {
          double g = 0.0;
          if (!clipped) {
            g += t.advantage * ratio * ((a == t.action ? 1.0 : 0.0) - probs[a]);
          }
          if (probs[a] > 0.0) {
            g -= config.entropyBonus * probs[a] * (std::log(probs[a]) + entropy);
          }
          if (g == 0.0) {
            continue;
          }
          double* row = &gradient[a * stride];
          for (std::size_t i = 0; i < t.observation.values.size(); ++i) {
            row[i] += g * t.observation.values[i];
          }
          row[policy.observationSize] += g;
        }
        const double error = t.ret - policy.value(t.observation);
        for (std::size_t i = 0; i < t.observation.values.size(); ++i) {
          valueGradient[i] += error * t.observation.values[i];
        }
        valueGradient[policy.observationSize] += error;
      }
      for (std::size_t i = 0; i < gradient.size(); ++i) {
        policy.actionWeights[i] += config.learningRate * norm * gradient[i];
      }
      for (std::size_t i = 0; i < valueGradient.size(); ++i) {
        policy.valueWeights[i] += config.valueLearningRate * norm * valueGradient[i];
      }
    }
    ++result.policyUpdates;
    result.curve.push_back({iter + 1, rewardSum / static_cast<double>(config.episodesPerUpdate)});
  }
  return result;
}

Schedule extractSchedule(const Policy& policy, SchedulingEnv& env) {
  Observation obs = env.reset();
  std::optional<Schedule> bestValid;
  double bestReward = 0.0;
  const auto consider = [&] {
    if (!isValid(env.current(), env.machines())) {
      return;
    }
    const double r = env.scheduleReward(env.current());
    if (!bestValid || r > bestReward) {
      bestValid = env.current();
      bestReward = r;
    }
  };
  consider();
  while (!env.done()) {
    const StepResult step = env.step(env.decode(policy.greedy(obs)));
    obs = step.observation;
    consider();
  }
  if (isValid(env.current(), env.machines())) {
    return env.current();
  }
  return bestValid ? *bestValid : env.initial();
}

} // namespace qsched::rl
