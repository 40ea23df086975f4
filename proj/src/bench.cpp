#include "qsched/bench.hpp"

#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"
#include "qsched/platform.hpp"
#include "qsched/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

namespace qsched::bench {

namespace {

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) {
    throw ValidationError(path + ": " + what);
  }
}

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double>(to - from).count();
}

double mean(const std::vector<double>& values) {
  if (values.empty()) {
    return 0.0;
  }
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) {
    return 0.0;
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::string formatNumber(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) {
    throw Error("cannot format number");
  }
  return {buffer, end};
}

int totalCapacity(std::span<const Machine> machines) {
  int total = 0;
  for (const auto& m : machines) {
    total += m.capacity;
  }
  return total;
}

Schedule runScheduler(const std::string& name, const std::vector<CircuitProxy>& batch,
                      std::span<const Machine> machines, const BenchmarkScenario& scenario,
                      int batchIndex, CostWeights weights) {
  const auto& cfg = scenario.config;
  if (name == kBaseline) {
    return binpackSchedule(batch, machines, weights);
  }
  if (name == kHeuristic) {
    const auto seed = deriveSeed(scenario.seeds.scatter, static_cast<std::uint64_t>(batchIndex));
    return scatterSearch(batch, machines, cfg.scatter, seed, weights).best.schedule;
  }
  if (name == kRl) {
    rl::EnvConfig env;
    env.mu = cfg.mu;
    env.nu = cfg.nu;
    env.weights = weights;
    if (cfg.rl.maxJobs > 0) {
      env.maxJobs = cfg.rl.maxJobs;
    }
    if (cfg.rl.maxSteps > 0) {
      env.maxSteps = cfg.rl.maxSteps;
    }
    const std::vector<Machine> snapshot(machines.begin(), machines.end());
    auto factory = [&] { return rl::SchedulingEnv(batch, snapshot, env); };
    const auto seed = deriveSeed(scenario.seeds.rl, static_cast<std::uint64_t>(batchIndex));
    const auto trained = rl::train(factory, cfg.rl.train, seed);
    auto episode = factory();
    return rl::extractSchedule(trained.policy, episode);
  }
  throw ValidationError("unknown scheduler '" + name + "'");
}

} // namespace

SchedulingConfig defaultConfig() { return {}; }

void BenchmarkScenario::validate() const {
  require(!machines.empty(), "machines", "at least one machine is required");
  for (std::size_t i = 0; i < machines.size(); ++i) {
    const std::string path = "machines[" + std::to_string(i) + "]";
    require(!machines[i].id.empty(), path + ".id", "must not be empty");
    require(machines[i].capacity >= 1, path + ".capacity", "must be at least 1");
    try {
      machines[i].model.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(path + ".model: " + e.what());
    }
    for (std::size_t j = 0; j < i; ++j) {
      require(machines[j].id != machines[i].id, path + ".id", "duplicate id " + machines[i].id);
    }
  }
  const auto& w = workload;
  int combined = 0;
  for (const auto& m : machines) {
    combined += m.capacity;
  }
  require(w.batchCount >= 1, "workload.batchCount", "must be at least 1");
  require(w.jobsPerBatchTarget >= 0, "workload.jobsPerBatchTarget", "must be non-negative");
  require(w.minQubits >= 2, "workload.minQubits", "must be at least 2");
  require(w.maxQubits >= w.minQubits, "workload.maxQubits", "must be at least minQubits");
  require(w.maxQubits <= kMaxBruteForceQubits, "workload.maxQubits",
          "must be at most " + std::to_string(kMaxBruteForceQubits));
  require(w.maxQubits <= combined, "workload.maxQubits",
          "exceeds the combined machine capacity " + std::to_string(combined));
  require(w.minDepth >= 1, "workload.minDepth", "must be at least 1");
  require(w.maxDepth >= w.minDepth, "workload.maxDepth", "must be at least minDepth");
  require(w.cxDensity >= 0.0 && w.cxDensity <= 1.0, "workload.cxDensity", "must be in [0, 1]");
  require(w.shots >= 1, "workload.shots", "must be at least 1");
  require(w.preferenceProbability >= 0.0 && w.preferenceProbability <= 1.0,
          "workload.preferenceProbability", "must be in [0, 1]");
  require(w.sigmaMin >= 0.0, "workload.sigmaMin", "must be non-negative");
  require(w.sigmaMax > w.sigmaMin, "workload.sigmaMax", "must exceed sigmaMin");
  require(w.estimatorPerLayerTime >= 0.0, "workload.estimatorPerLayerTime",
          "must be non-negative");
  require(w.estimatorPerShotReadout >= 0.0, "workload.estimatorPerShotReadout",
          "must be non-negative");
  require(w.loadMin >= 0.0, "workload.loadMin", "must be non-negative");
  require(w.loadMax >= w.loadMin, "workload.loadMax", "must be at least loadMin");

  const auto& c = config;
  require(c.batchSize >= 1, "config.batchSize", "must be at least 1");
  require(c.batchThreshold >= 0, "config.batchThreshold", "must be non-negative");
  require(c.alpha >= 0.0, "config.alpha", "must be non-negative");
  require(c.beta >= 0.0, "config.beta", "must be non-negative");
  require(c.mu >= 0.0, "config.mu", "must be non-negative");
  require(c.nu >= 0.0, "config.nu", "must be non-negative");
  try {
    c.scatter.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("config.scatter: ") + e.what());
  }
  require(c.rl.train.iterations >= 1, "config.rl.iterations", "must be at least 1");
  require(c.rl.train.episodesPerUpdate >= 1, "config.rl.episodesPerUpdate", "must be at least 1");
  require(c.rl.train.epochs >= 1, "config.rl.epochs", "must be at least 1");
  require(c.rl.maxSteps >= 0, "config.rl.maxSteps", "must be non-negative");
}

BenchmarkScenario builtinScenario(const std::string& name) {
  BenchmarkScenario s;
  s.name = name;
  EstimateModel base;
  if (name == "5-7") {
    EstimateModel wide = base;
    wide.noisePerQubitLayer = 0.012;
    s.machines = {{"qpu-5", 5, base}, {"qpu-7", 7, wide}};
  } else if (name == "5-5-7") {
    EstimateModel slowSetup = base;
    slowSetup.baseSetup = 3.0 * base.baseSetup;
    slowSetup.noisePerQubitLayer = 0.011;
    EstimateModel wide = base;
    wide.noisePerQubitLayer = 0.012;
    s.machines = {{"qpu-5a", 5, base}, {"qpu-5b", 5, slowSetup}, {"qpu-7", 7, wide}};
  } else {
    throw ValidationError("unknown builtin scenario '" + name + "' (expected 5-7 or 5-5-7)");
  }
  s.config = defaultConfig();
  return s;
}

void reseed(BenchmarkScenario& scenario, std::uint64_t seed) {
  scenario.seeds.workload = deriveSeed(seed, 1);
  scenario.seeds.prepopulate = deriveSeed(seed, 2);
  scenario.seeds.scatter = deriveSeed(seed, 3);
  scenario.seeds.rl = deriveSeed(seed, 4);
}

std::vector<Machine> buildMachines(const BenchmarkScenario& scenario) {
  std::vector<Machine> machines;
  machines.reserve(scenario.machines.size());
  for (const auto& spec : scenario.machines) {
    machines.push_back(makeMachine(spec.id, spec.capacity, spec.model));
  }
  return machines;
}

Workload generateWorkload(const BenchmarkScenario& scenario, std::span<const Machine> machines) {
  const auto& w = scenario.workload;
  EstimateModel reference;
  reference.perLayerTime = w.estimatorPerLayerTime;
  reference.perShotReadout = w.estimatorPerShotReadout;

  const int jobs = w.batchCount * w.jobsPerBatchTarget;
  Workload out;
  out.circuits.reserve(static_cast<std::size_t>(jobs));
  out.proxies.reserve(static_cast<std::size_t>(jobs));
  for (int k = 0; k < jobs; ++k) {
    Rng rng(deriveSeed(scenario.seeds.workload, static_cast<std::uint64_t>(k)));
    const int q = static_cast<int>(rng.uniformInt(w.minQubits, w.maxQubits));
    const int d = static_cast<int>(rng.uniformInt(w.minDepth, w.maxDepth));
    auto circuit =
        std::make_shared<const Circuit>(generateRandomCircuit(q, d, w.cxDensity, rng.next()));

    std::optional<std::string> tau;
    double sigma = 0.0;
    if (rng.uniform01() < w.preferenceProbability) {
      const auto m = static_cast<std::size_t>(rng.below(machines.size()));
      tau = machines[m].id;
      sigma = w.sigmaMax - (w.sigmaMax - w.sigmaMin) * rng.uniform01();
    }
    const int rho = static_cast<int>(rng.uniformInt(kMinPriority, kMaxPriority));

    ProxyEstimates estimates;
    estimates.basePTime = processingTime(circuit->depth(), w.shots, reference);
    auto proxy = makeProxy(circuit, tau, sigma, rho, w.shots, estimates);
    proxy.baseNoise = extrapolatedNoise(proxy, proxy.d, machines).value;
    out.circuits.push_back(std::move(circuit));
    out.proxies.push_back(std::move(proxy));
  }
  return out;
}

Schedule materializeCuts(const Schedule& schedule,
                         const std::map<std::string, std::shared_ptr<const Circuit>>& roots,
                         std::span<const Machine> machines) {
  if (schedule.machineCount() != machines.size()) {
    throw ValidationError("schedule and machine list differ in size");
  }
  std::map<std::string, std::shared_ptr<const Circuit>> circuits = roots;
  for (const auto& cut : schedule.cuts) {
    const auto it = circuits.find(cut.jobId);
    if (it == circuits.end()) {
      throw ValidationError("cut of unknown circuit " + cut.jobId);
    }
    auto [left, right] = applyCutToCircuit(*it->second, cut.plan);
    const std::string leftId = left.id();
    const std::string rightId = right.id();
    circuits[leftId] = std::make_shared<const Circuit>(std::move(left));
    circuits[rightId] = std::make_shared<const Circuit>(std::move(right));
  }

  Schedule out = schedule;
  for (std::size_t j = 0; j < out.jobs.size(); ++j) {
    auto& job = out.jobs[j];
    const auto it = circuits.find(job.id);
    if (it == circuits.end()) {
      throw ValidationError("job " + job.id + " has no circuit");
    }
    if (!job.isFragment()) {
      continue;
    }
    const Circuit& actual = *it->second;
    if (actual.numQubits() != job.q || actual.depth() != job.d ||
        (job.circuit && !(*job.circuit == actual))) {
      throw ValidationError("fragment " + job.id + " does not match its cut circuit");
    }
    job.circuit = it->second;
    const auto pos = out.locate(j);
    if (!pos) {
      throw ValidationError("fragment " + job.id + " is not placed");
    }
    if (const auto noise = baseNoise(actual.numQubits(), actual.depth(), machines[pos->machine])) {
      job.baseNoise = noise->value;
    }
  }
  return out;
}

std::vector<SchedulerSummary> summarize(const std::vector<BatchRow>& rows) {
  std::vector<std::string> order;
  for (const auto& row : rows) {
    if (std::find(order.begin(), order.end(), row.scheduler) == order.end()) {
      order.push_back(row.scheduler);
    }
  }
  std::vector<SchedulerSummary> out;
  for (const auto& name : order) {
    std::vector<double> makespan, pmax, noise, runtime;
    for (const auto& row : rows) {
      if (row.scheduler == name) {
        makespan.push_back(row.makespan);
        pmax.push_back(row.pmax);
        noise.push_back(row.noise);
        runtime.push_back(row.runtimeSeconds);
      }
    }
    SchedulerSummary s;
    s.scheduler = name;
    s.batches = static_cast<int>(pmax.size());
    s.meanMakespan = mean(makespan);
    s.meanPmax = mean(pmax);
    s.meanNoise = mean(noise);
    s.meanRuntime = mean(runtime);
    s.medianMakespan = median(makespan);
    s.medianPmax = median(pmax);
    s.medianNoise = median(noise);
    out.push_back(std::move(s));
  }
  const auto base = std::find_if(out.begin(), out.end(),
                                 [](const SchedulerSummary& s) { return s.scheduler == kBaseline; });
  if (base != out.end()) {
    const auto improvement = [](double reference, double value) -> std::optional<double> {
      if (reference == 0.0) {
        return std::nullopt;
      }
      return (reference - value) / reference;
    };
    for (auto& s : out) {
      if (s.scheduler == kBaseline) {
        continue;
      }
      s.pmaxImprovement = improvement(base->meanPmax, s.meanPmax);
      s.makespanImprovement = improvement(base->meanMakespan, s.meanMakespan);
      s.noiseImprovement = improvement(base->meanNoise, s.meanNoise);
    }
  }
  return out;
}

BenchmarkReport runBenchmark(const BenchmarkScenario& scenario,
                             const std::vector<std::string>& schedulers, RunOptions options) {
  scenario.validate();
  if (schedulers.empty()) {
    throw ValidationError("schedulers: at least one scheduler is required");
  }
  for (const auto& name : schedulers) {
    if (name != kBaseline && name != kHeuristic && name != kRl) {
      throw ValidationError("schedulers: unknown scheduler '" + name + "'");
    }
  }

  const CostWeights weights{scenario.config.alpha, scenario.config.beta,
                            scenario.config.preference};
  BenchmarkReport report;
  report.scenario = scenario.name;

  for (const auto& name : schedulers) {
    auto machines = buildMachines(scenario);
    prepopulate(machines, scenario.seeds.prepopulate, scenario.workload.loadMin,
                scenario.workload.loadMax);
    Platform platform(std::move(machines), PlatformConfig{scenario.config.backfilling});
    const int threshold = scenario.config.batchThreshold > 0
                              ? scenario.config.batchThreshold
                              : totalCapacity(platform.machines());

    const auto workload = generateWorkload(scenario, platform.machines());
    std::map<std::string, std::shared_ptr<const Circuit>> roots;
    for (const auto& c : workload.circuits) {
      roots.emplace(c->id(), c);
    }
    for (const auto& proxy : workload.proxies) {
      platform.submit(proxy);
    }

    for (int b = 0; b < scenario.workload.batchCount; ++b) {
      const auto batch = formBatch(platform.queue(), threshold,
                                   static_cast<std::size_t>(scenario.config.batchSize));
      if (batch.empty()) {
        break;
      }
      const std::span<const Machine> current(platform.machines());
      const auto t0 = Clock::now();
      const Schedule planned = runScheduler(name, batch, current, scenario, b, weights);
      const auto t1 = Clock::now();
      const Schedule final = materializeCuts(planned, roots, current);
      const auto t2 = Clock::now();

      const auto eval = evaluate(final, current);
      if (!eval.valid) {
        throw Error(name + " produced an over-capacity schedule for batch " + std::to_string(b));
      }
      BatchRow row;
      row.scheduler = name;
      row.batch = b;
      row.makespan = eval.makespan;
      row.pmax = eval.cost;
      row.noise = eval.noise;
      if (options.timing) {
        row.scheduleSeconds = seconds(t0, t1);
        row.cutSeconds = seconds(t1, t2);
        row.runtimeSeconds = seconds(t0, t2);
      }
      row.jobs = static_cast<int>(batch.size());
      row.fragments = static_cast<int>(std::count_if(
          final.jobs.begin(), final.jobs.end(), [](const CircuitProxy& p) { return p.isFragment(); }));
      row.cuts = static_cast<int>(final.cuts.size());
      report.rows.push_back(row);
      platform.enqueueSchedule(final);
    }
  }
  report.summaries = summarize(report.rows);
  if (!options.timing) {
    report.notes.push_back("timing disabled; runtime columns are zero");
  }
  return report;
}

std::string renderCsv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "scheduler,batch,makespan,pmax,noise,runtime_s\n";
  for (const auto& row : report.rows) {
    out << row.scheduler << ',' << row.batch << ',' << formatNumber(row.makespan) << ','
        << formatNumber(row.pmax) << ',' << formatNumber(row.noise) << ','
        << formatNumber(row.runtimeSeconds) << '\n';
  }
  return out.str();
}

std::string renderJson(const BenchmarkReport& report) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"scheduler", row.scheduler},
                    {"batch", row.batch},
                    {"makespan", row.makespan},
                    {"pmax", row.pmax},
                    {"noise", row.noise},
                    {"runtime_s", row.runtimeSeconds},
                    {"schedule_s", row.scheduleSeconds},
                    {"cut_s", row.cutSeconds},
                    {"jobs", row.jobs},
                    {"fragments", row.fragments},
                    {"cuts", row.cuts}});
  }
  const auto optionalNumber = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"scheduler", s.scheduler},
                         {"batches", s.batches},
                         {"mean", {{"makespan", s.meanMakespan},
                                   {"pmax", s.meanPmax},
                                   {"noise", s.meanNoise},
                                   {"runtime_s", s.meanRuntime}}},
                         {"median", {{"makespan", s.medianMakespan},
                                     {"pmax", s.medianPmax},
                                     {"noise", s.medianNoise}}},
                         {"improvement", {{"pmax", optionalNumber(s.pmaxImprovement)},
                                          {"makespan", optionalNumber(s.makespanImprovement)},
                                          {"noise", optionalNumber(s.noiseImprovement)}}}});
  }
  json doc{{"scenario", report.scenario},
           {"rows", rows},
           {"summary", summaries},
           {"notes", report.notes}};
  return doc.dump(2) + "\n";
}

void emitReport(const BenchmarkReport& report, ReportFormat format,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << (format == ReportFormat::Csv ? renderCsv(report) : renderJson(report));
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

} // namespace qsched::bench
