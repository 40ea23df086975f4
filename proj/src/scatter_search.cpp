#include "placement.hpp"
#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"
#include "qsched/rng.hpp"
#include "qsched/schedulers.hpp"

#include <algorithm>
#include <limits>
#include <thread>

namespace qsched {

void ScatterConfig::validate() const {
  if (iterations < 0) {
    throw ValidationError("scatter search: iterations must be >= 0");
  }
  if (eliteSolutions < 1 || numSwaps < 1 || populationSize < 1 || parallelism < 1) {
    throw ValidationError("scatter search: counts must be >= 1");
  }
  if (eliteSolutions > populationSize) {
    throw ValidationError("scatter search: eliteSolutions exceeds populationSize");
  }
  if (initializations.empty()) {
    throw ValidationError("scatter search: no initialization procedure");
  }
  for (const auto& name : initializations) {
    if (name != kInitBinpack && name != kInitMinOverhead && name != kInitNoCut) {
      throw ValidationError("scatter search: unknown initialization '" + name + "'");
    }
  }
}

namespace {

using Population = std::vector<Candidate>;

/// Lower P_max; equal P_max goes to the shorter makespan.
bool cheaper(const EvaluationResult& a, const EvaluationResult& b) {
  if (a.cost != b.cost) {
    return a.cost < b.cost;
  }
  return a.makespan < b.makespan;
}

/// valid before invalid, then by cost
bool ranksBefore(const Candidate& a, const Candidate& b) {
  if (a.evaluation.valid != b.evaluation.valid) {
    return a.evaluation.valid;
  }
  return cheaper(a.evaluation, b.evaluation);
}

void addUnique(Population& population, Candidate candidate) {
  for (const auto& existing : population) {
    if (existing.evaluation.cost == candidate.evaluation.cost &&
        detail::sameStructure(existing.schedule, candidate.schedule)) {
      return;
    }
  }
  population.push_back(std::move(candidate));
}

Schedule assignByPreference(std::vector<CircuitProxy> pieces, std::vector<CutRecord> cuts,
                            std::span<const Machine> machines, CostWeights weights) {
  Schedule schedule = Schedule::empty(machines.size(), weights);
  schedule.cuts = std::move(cuts);
  for (auto& piece : pieces) {
    const std::size_t m = detail::predictMachine(piece, machines);
    const std::size_t t = detail::firstFitSlot(schedule, m, piece.q, machines);
    schedule.addJob(std::move(piece), m, t);
  }
  return schedule;
}

/// Cuts every oversize job with the lowest-overhead plan over all machine pairs.
Schedule minOverheadInit(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                         CostWeights weights) {
  int widest = 0;
  for (const auto& m : machines) {
    widest = std::max(widest, m.capacity);
  }
  std::vector<CircuitProxy> pieces;
  std::vector<CutRecord> cuts;
  for (const auto& job : batch) {
    if (job.q <= widest || !job.circuit || job.q > kMaxBruteForceQubits) {
      auto sub = cutToFit(job, machines, cuts);
      pieces.insert(pieces.end(), sub.begin(), sub.end());
      continue;
    }
    std::optional<CutPlan> best;
    const Connectivity graph(*job.circuit);
    for (std::size_t i = 0; i < machines.size(); ++i) {
      for (std::size_t j = i + 1; j < machines.size(); ++j) {
        const int a = machines[i].capacity;
        const int b = machines[j].capacity;
        if (a + b < job.q) {
          continue;
        }
        try {
          CutPlan plan = estimateCut(graph, a, b);
          if (!best || plan.overhead < best->overhead) {
            best = std::move(plan);
          }
        } catch (const Error&) {
          // no representable plan for this pair
        }
      }
    }
    if (!best) {
      auto sub = cutToFit(job, machines, cuts);
      pieces.insert(pieces.end(), sub.begin(), sub.end());
      continue;
    }
    const CutOutcome outcome = applyCutToProxy(job, *best, machines);
    cuts.push_back({job.id, *best});
    for (const auto& fragment : outcome.fragmentProxies) {
      auto sub = cutToFit(fragment, machines, cuts);
      pieces.insert(pieces.end(), sub.begin(), sub.end());
    }
  }
  return assignByPreference(std::move(pieces), std::move(cuts), machines, weights);
}

Population initializePopulation(std::span<const CircuitProxy> batch,
                                std::span<const Machine> machines, const ScatterConfig& config,
                                CostWeights weights) {
  Population population;
  for (const auto& name : config.initializations) {
    if (name == kInitBinpack) {
      addUnique(population, makeCandidate(binpackSchedule(batch, machines, weights), machines));
    } else if (name == kInitMinOverhead) {
      addUnique(population, makeCandidate(minOverheadInit(batch, machines, weights), machines));
    } else if (name == kInitNoCut) {
      const bool allFit = std::all_of(batch.begin(), batch.end(), [&](const CircuitProxy& job) {
        return std::any_of(machines.begin(), machines.end(),
                           [&](const Machine& m) { return m.capacity >= job.q; });
      });
      if (allFit) {
        std::vector<CircuitProxy> pieces(batch.begin(), batch.end());
        addUnique(population,
                  makeCandidate(assignByPreference(std::move(pieces), {}, machines, weights),
                                machines));
      }
    }
  }
  return population;
}

/// Moves job `job` into slot `slot` of `machine` (slot == count opens a new one).
void moveJob(Schedule& schedule, std::size_t job, std::size_t machine, std::size_t slot) {
  const auto from = schedule.locate(job);
  if (!from) {
    return;
  }
  auto& target = schedule.slots[machine];
  if (slot == target.size()) {
    target.emplace_back();
  }
  if (from->machine == machine && from->slot == slot) {
    return;
  }
  target[slot].push_back(job);
  auto& source = schedule.slots[from->machine][from->slot];
  source.erase(source.begin() + static_cast<std::ptrdiff_t>(from->index));
}

void swapJobs(Schedule& schedule, std::size_t a, std::size_t b) {
  const auto pa = schedule.locate(a);
  const auto pb = schedule.locate(b);
  if (!pa || !pb) {
    return;
  }
  schedule.slots[pa->machine][pa->slot][pa->index] = b;
  schedule.slots[pb->machine][pb->slot][pb->index] = a;
}

/// One local-search move. The partner is drawn from the real jobs plus one
/// dummy per timeslot and one per machine tail; pairing with a dummy moves
/// the job there instead of swapping.
void localMove(Schedule& schedule, Rng& rng) {
  const std::size_t n = schedule.jobs.size();
  if (n == 0) {
    return;
  }
  std::size_t dummies = 0;
  for (const auto& machineSlots : schedule.slots) {
    dummies += machineSlots.size() + 1;
  }
  const std::size_t job = rng.below(n);
  std::size_t partner = rng.below(n + dummies);
  if (partner < n) {
    if (partner != job) {
      swapJobs(schedule, job, partner);
    }
    return;
  }
  partner -= n;
  for (std::size_t m = 0; m < schedule.slots.size(); ++m) {
    const std::size_t here = schedule.slots[m].size() + 1;
    if (partner < here) {
      moveJob(schedule, job, m, partner);
      return;
    }
    partner -= here;
  }
}

Population generateNewSolutions(const Population& population, std::span<const Machine> machines,
                                const ScatterConfig& config, Rng& rng) {
  Population out;
  out.reserve(population.size());
  for (const auto& candidate : population) {
    Schedule next = candidate.schedule;
    for (int s = 0; s < config.numSwaps; ++s) {
      localMove(next, rng);
    }
    next.compact();
    out.push_back(makeCandidate(std::move(next), machines));
  }
  return out;
}

/// Moves one random timeslot from the machine finishing last to the one
/// finishing first, first-fitting its jobs into the receiver's timeslots.
Population improveSolutions(const Population& population, std::span<const Machine> machines,
                            Rng& rng) {
  Population out;
  for (const auto& candidate : population) {
    const auto& eval = candidate.evaluation;
    std::size_t longest = 0;
    std::size_t shortest = 0;
    double longestEnd = -1.0;
    double shortestEnd = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < machines.size(); ++m) {
      const double end = machines[m].queueLength() + eval.machineSpan[m];
      if (end > longestEnd) {
        longestEnd = end;
        longest = m;
      }
      if (end < shortestEnd) {
        shortestEnd = end;
        shortest = m;
      }
    }
    const auto& donor = candidate.schedule.slots[longest];
    if (longest == shortest || donor.empty()) {
      continue;
    }
    Schedule next = candidate.schedule;
    const std::size_t slot = rng.below(donor.size());
    const Timeslot moving = next.slots[longest][slot];
    next.slots[longest].erase(next.slots[longest].begin() + static_cast<std::ptrdiff_t>(slot));
    for (const auto job : moving) {
      const std::size_t t = detail::firstFitSlot(next, shortest, next.jobs[job].q, machines);
      if (t == next.slots[shortest].size()) {
        next.slots[shortest].emplace_back();
      }
      next.slots[shortest][t].push_back(job);
    }
    out.push_back(makeCandidate(std::move(next), machines));
  }
  return out;
}

/// Elite candidates by rank, then the candidates farthest from everything
/// already retained.
Population selectPopulation(Population pool, const ScatterConfig& config) {
  std::stable_sort(pool.begin(), pool.end(), ranksBefore);
  const std::size_t eliteCount = std::min<std::size_t>(config.eliteSolutions, pool.size());
  Population kept(std::make_move_iterator(pool.begin()),
                  std::make_move_iterator(pool.begin() + static_cast<std::ptrdiff_t>(eliteCount)));
  Population rest(std::make_move_iterator(pool.begin() + static_cast<std::ptrdiff_t>(eliteCount)),
                  std::make_move_iterator(pool.end()));
  const std::size_t diverseCount =
      std::min<std::size_t>(config.populationSize - config.eliteSolutions, rest.size());
  if (diverseCount == 0) {
    return kept;
  }

  std::vector<double> nearest(rest.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    for (const auto& k : kept) {
      nearest[i] = std::min(nearest[i], distance(rest[i].schedule, k.schedule,
                                                 JobSetPolicy::AllowDisjoint));
    }
  }
  std::vector<bool> taken(rest.size(), false);
  for (std::size_t pick = 0; pick < diverseCount; ++pick) {
    std::size_t best = rest.size();
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (!taken[i] && (best == rest.size() || nearest[i] > nearest[best])) {
        best = i;
      }
    }
    taken[best] = true;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (!taken[i]) {
        nearest[i] = std::min(nearest[i], distance(rest[i].schedule, rest[best].schedule,
                                                   JobSetPolicy::AllowDisjoint));
      }
    }
    kept.push_back(std::move(rest[best]));
  }
  return kept;
}

const Candidate* bestValid(const Population& population) {
  const Candidate* best = nullptr;
  for (const auto& c : population) {
    if (c.evaluation.valid && (best == nullptr || cheaper(c.evaluation, best->evaluation))) {
      best = &c;
    }
  }
  return best;
}

struct IslandResult {
  std::optional<Candidate> best;
  std::vector<double> history;
};

IslandResult runIsland(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                       const ScatterConfig& config, std::uint64_t seed, CostWeights weights) {
  Rng rng(seed);
  IslandResult result;
  Population population = initializePopulation(batch, machines, config, weights);
  if (const auto* b = bestValid(population)) {
    result.best = *b;
  }
  const auto record = [&result] {
    result.history.push_back(result.best ? result.best->evaluation.cost
                                         : std::numeric_limits<double>::infinity());
  };
  record();

  for (int iter = 0; iter < config.iterations; ++iter) {
    Population fresh = generateNewSolutions(population, machines, config, rng);
    Population improved = improveSolutions(population, machines, rng);
    Population pool = std::move(population);
    for (auto& c : fresh) {
      addUnique(pool, std::move(c));
    }
    for (auto& c : improved) {
      addUnique(pool, std::move(c));
    }
    population = selectPopulation(std::move(pool), config);
    if (const auto* current = bestValid(population);
        current && (!result.best || cheaper(current->evaluation, result.best->evaluation))) {
      result.best = *current;
    }
    record();
  }
  return result;
}

} // namespace

ScatterResult scatterSearch(std::span<const CircuitProxy> batch, std::span<const Machine> machines,
                            const ScatterConfig& config, std::uint64_t seed, CostWeights weights) {
  config.validate();
  if (batch.empty()) {
    throw ValidationError("scatter search needs a non-empty batch");
  }
  if (machines.empty()) {
    throw ValidationError("scatter search needs at least one machine");
  }
  const auto islands = static_cast<std::size_t>(config.parallelism);
  std::vector<IslandResult> results(islands);
  if (islands == 1 || !config.threaded) {
    for (std::size_t w = 0; w < islands; ++w) {
      results[w] = runIsland(batch, machines, config, deriveSeed(seed, w), weights);
    }
  } else {
    std::vector<std::exception_ptr> errors(islands);
    {
      std::vector<std::jthread> workers;
      workers.reserve(islands);
      for (std::size_t w = 0; w < islands; ++w) {
        workers.emplace_back([&, w] {
          try {
            results[w] = runIsland(batch, machines, config, deriveSeed(seed, w), weights);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) {
        std::rethrow_exception(e);
      }
    }
  }

  std::optional<std::size_t> winner;
  for (std::size_t w = 0; w < islands; ++w) {
    if (results[w].best &&
        (!winner || cheaper(results[w].best->evaluation, results[*winner].best->evaluation))) {
      winner = w;
    }
  }
  if (!winner) {
    throw InfeasibleJob("scatter search found no valid schedule");
  }
  return ScatterResult{std::move(*results[*winner].best), std::move(results[*winner].history),
                       static_cast<int>(*winner)};
}

} // namespace qsched
