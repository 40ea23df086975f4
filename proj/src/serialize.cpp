#include "qsched/serialize.hpp"

#include "qsched/errors.hpp"
#include "qsched/estimation.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qsched {

namespace {

template <class T>
T field(const Json& obj, const std::string& key, const std::string& path) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + ": missing");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + ": wrong type");
  }
}

template <class T>
T fieldOr(const Json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    return fallback;
  }
  return field<T>(obj, key, path);
}

void requireObject(const Json& doc, const std::string& path) {
  if (!doc.is_object()) {
    throw ValidationError((path.empty() ? std::string("document") : path) +
                          ": expected an object");
  }
}

void requireArray(const Json& doc, const std::string& path) {
  if (!doc.is_array()) {
    throw ValidationError((path.empty() ? std::string("document") : path) +
                          ": expected an array");
  }
}

std::string indexPath(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

Json modelToJson(const EstimateModel& m) {
  return {{"perLayerTime", m.perLayerTime},
          {"perShotReadout", m.perShotReadout},
          {"noisePerQubitLayer", m.noisePerQubitLayer},
          {"baseSetup", m.baseSetup},
          {"fragmentSetup", m.fragmentSetup}};
}

/// Overlays `patch` onto `base`, rejecting keys the base does not have.
void mergeStrict(Json& base, const Json& patch, const std::string& path) {
  requireObject(patch, path);
  for (const auto& [key, value] : patch.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) {
      throw ValidationError(where + ": unknown field");
    }
    Json& target = base[key];
    if (target.is_object() && value.is_object()) {
      mergeStrict(target, value, where);
    } else {
      target = value;
    }
  }
}

Json machineDefaults() {
  return {{"id", ""}, {"capacity", 0}, {"loadOffset", 0.0}, {"model", modelToJson({})}};
}

EstimateModel modelFromJson(const Json& doc, const std::string& path) {
  requireObject(doc, path);
  EstimateModel m;
  m.perLayerTime = field<double>(doc, "perLayerTime", path);
  m.perShotReadout = field<double>(doc, "perShotReadout", path);
  m.noisePerQubitLayer = field<double>(doc, "noisePerQubitLayer", path);
  m.baseSetup = field<double>(doc, "baseSetup", path);
  m.fragmentSetup = field<double>(doc, "fragmentSetup", path);
  return m;
}

Machine machineFromJson(const Json& patch, const std::string& path) {
  Json doc = machineDefaults();
  mergeStrict(doc, patch, path);
  auto model = modelFromJson(doc.at("model"), path + ".model");
  try {
    model.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ".model: " + e.what());
  }
  const auto id = field<std::string>(doc, "id", path);
  const auto capacity = field<int>(doc, "capacity", path);
  if (id.empty()) {
    throw ValidationError(path + ".id: must not be empty");
  }
  if (capacity < 1) {
    throw ValidationError(path + ".capacity: must be at least 1");
  }
  Machine m = makeMachine(id, capacity, model);
  m.loadOffset = field<double>(doc, "loadOffset", path);
  if (m.loadOffset < 0.0) {
    throw ValidationError(path + ".loadOffset: must be non-negative");
  }
  return m;
}

std::string preferenceName(PreferenceTerm term) {
  return term == PreferenceTerm::AsWritten ? "as_written" : "penalty_when_off";
}

PreferenceTerm preferenceFromName(const std::string& name, const std::string& path) {
  if (name == "as_written") {
    return PreferenceTerm::AsWritten;
  }
  if (name == "penalty_when_off") {
    return PreferenceTerm::PenaltyWhenOff;
  }
  throw ValidationError(path + ": expected as_written or penalty_when_off");
}

Json scenarioWithoutMachines(const bench::BenchmarkScenario& s) {
  Json doc = toJson(s);
  doc["machines"] = Json::array();
  return doc;
}

} // namespace

Json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(path.string() + ": cannot open");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Json toJson(const Circuit& circuit) {
  Json gates = Json::array();
  for (const auto& g : circuit.gates()) {
    if (g.kind == GateKind::CX) {
      gates.push_back({{"kind", "cx"}, {"qubits", {g.qubits[0], g.qubits[1]}}});
    } else {
      gates.push_back({{"kind", "single"}, {"qubits", {g.qubits[0]}}});
    }
  }
  return {{"id", circuit.id()},
          {"numQubits", circuit.numQubits()},
          {"depth", circuit.depth()},
          {"gates", gates}};
}

Circuit circuitFromJson(const Json& doc) {
  requireObject(doc, "circuit");
  const auto id = field<std::string>(doc, "id", "circuit");
  const auto numQubits = field<int>(doc, "numQubits", "circuit");
  if (!doc.contains("gates")) {
    throw ValidationError("circuit.gates: missing");
  }
  const Json& list = doc.at("gates");
  requireArray(list, "circuit.gates");
  std::vector<Gate> gates;
  gates.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = indexPath("circuit.gates", i);
    requireObject(list[i], path);
    const auto kind = field<std::string>(list[i], "kind", path);
    const auto qubits = field<std::vector<int>>(list[i], "qubits", path);
    if (kind == "cx") {
      if (qubits.size() != 2) {
        throw ValidationError(path + ".qubits: a cx gate takes two qubits");
      }
      gates.push_back(Gate::cx(qubits[0], qubits[1]));
    } else if (kind == "single") {
      if (qubits.size() != 1) {
        throw ValidationError(path + ".qubits: a single-qubit gate takes one qubit");
      }
      gates.push_back(Gate::single(qubits[0]));
    } else {
      throw ValidationError(path + ".kind: expected single or cx");
    }
  }
  return Circuit(id, numQubits, std::move(gates));
}

Json toJson(const CutPlan& plan) {
  return {{"partition", plan.partition},
          {"crossingGates", plan.crossingGates},
          {"kappa", plan.kappa},
          {"overhead", plan.overhead},
          {"variantCount", plan.variantCount},
          {"fragmentSizes", {plan.fragmentSizes[0], plan.fragmentSizes[1]}}};
}

Json toJson(const EvaluationResult& result) {
  Json jobs = Json::array();
  for (const auto& t : result.perJob) {
    jobs.push_back({{"start", t.start}, {"completion", t.completion}});
  }
  return {{"cost", result.cost},
          {"makespan", result.makespan},
          {"noise", result.noise},
          {"valid", result.valid},
          {"machineScore", result.machineScore},
          {"machineSpan", result.machineSpan},
          {"jobs", jobs}};
}

Json toJson(const CircuitProxy& proxy) {
  Json doc{{"id", proxy.id},
           {"parentId", proxy.parentId},
           {"q", proxy.q},
           {"d", proxy.d},
           {"tau", proxy.tau ? Json(*proxy.tau) : Json(nullptr)},
           {"sigma", proxy.sigma},
           {"rho", proxy.rho},
           {"shots", proxy.shots}};
  doc["basePTime"] = proxy.basePTime ? Json(*proxy.basePTime) : Json(nullptr);
  doc["baseNoise"] = proxy.baseNoise ? Json(*proxy.baseNoise) : Json(nullptr);
  if (proxy.b) {
    doc["b"] = *proxy.b;
  }
  if (proxy.c) {
    doc["c"] = *proxy.c;
  }
  return doc;
}

Json toJson(const Schedule& schedule, std::span<const Machine> machines) {
  Json list = Json::array();
  for (std::size_t m = 0; m < schedule.machineCount(); ++m) {
    Json slots = Json::array();
    for (const auto& slot : schedule.slots[m]) {
      Json members = Json::array();
      for (const auto j : slot) {
        members.push_back(toJson(schedule.jobs[j]));
      }
      slots.push_back(members);
    }
    const std::string id = m < machines.size() ? machines[m].id : std::to_string(m);
    list.push_back({{"machine", id}, {"timeslots", slots}});
  }
  Json cuts = Json::array();
  for (const auto& cut : schedule.cuts) {
    cuts.push_back({{"job", cut.jobId}, {"plan", toJson(cut.plan)}});
  }
  return {{"machines", list},
          {"cuts", cuts},
          {"weights",
           {{"alpha", schedule.weights.alpha},
            {"beta", schedule.weights.beta},
            {"preference", preferenceName(schedule.weights.preference)}}}};
}

Json queueToJson(const Machine& machine) {
  Json entries = Json::array();
  for (const auto& e : machine.queue) {
    Json ids = Json::array();
    for (const auto& p : e.proxies) {
      ids.push_back(p.id);
    }
    entries.push_back({{"timeslot", e.timeslot},
                       {"start", e.startTime},
                       {"end", e.endTime},
                       {"qubits", e.usedQubits()},
                       {"jobs", ids}});
  }
  return {{"machine", machine.id},
          {"capacity", machine.capacity},
          {"loadOffset", machine.loadOffset},
          {"queueLength", machine.queueLength()},
          {"entries", entries}};
}

std::vector<Machine> machinesFromJson(const Json& doc) {
  requireArray(doc, "machines");
  if (doc.empty()) {
    throw ValidationError("machines: at least one machine is required");
  }
  std::vector<Machine> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(machineFromJson(doc[i], indexPath("machines", i)));
    for (std::size_t k = 0; k + 1 < out.size(); ++k) {
      if (out[k].id == out.back().id) {
        throw ValidationError(indexPath("machines", i) + ".id: duplicate id " + out.back().id);
      }
    }
  }
  return out;
}

std::vector<CircuitProxy> batchFromJson(const Json& doc, std::span<const Machine> machines) {
  requireArray(doc, "jobs");
  const EstimateModel reference;
  std::vector<CircuitProxy> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = indexPath("jobs", i);
    requireObject(doc[i], path);
    if (!doc[i].contains("circuit")) {
      throw ValidationError(path + ".circuit: missing");
    }
    std::shared_ptr<const Circuit> circuit;
    try {
      circuit = std::make_shared<const Circuit>(circuitFromJson(doc[i].at("circuit")));
    } catch (const ValidationError& e) {
      throw ValidationError(path + "." + e.what());
    }
    std::optional<std::string> tau;
    if (doc[i].contains("tau") && !doc[i].at("tau").is_null()) {
      tau = field<std::string>(doc[i], "tau", path);
      bool known = false;
      for (const auto& m : machines) {
        known = known || m.id == *tau;
      }
      if (!known) {
        throw ValidationError(path + ".tau: unknown machine " + *tau);
      }
    }
    const auto sigma = fieldOr<double>(doc[i], "sigma", path, 0.0);
    const auto rho = fieldOr<int>(doc[i], "rho", path, kMinPriority);
    const auto shots = fieldOr<std::int64_t>(doc[i], "shots", path, kDefaultShots);
    ProxyEstimates estimates;
    estimates.basePTime = fieldOr<double>(doc[i], "basePTime", path,
                                          shots >= 1 ? processingTime(circuit->depth(), shots,
                                                                      reference)
                                                     : 0.0);
    CircuitProxy proxy;
    try {
      proxy = makeProxy(circuit, tau, sigma, rho, shots, estimates);
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": " + e.what());
    }
    if (doc[i].contains("baseNoise") && !doc[i].at("baseNoise").is_null()) {
      proxy.baseNoise = field<double>(doc[i], "baseNoise", path);
    } else {
      proxy.baseNoise = extrapolatedNoise(proxy, proxy.d, machines).value;
    }
    out.push_back(std::move(proxy));
  }
  return out;
}

Json toJson(const bench::BenchmarkScenario& s) {
  Json machines = Json::array();
  for (const auto& m : s.machines) {
    machines.push_back({{"id", m.id}, {"capacity", m.capacity}, {"model", modelToJson(m.model)}});
  }
  const auto& w = s.workload;
  const auto& c = s.config;
  return {
      {"name", s.name},
      {"machines", machines},
      {"workload",
       {{"batchCount", w.batchCount},
        {"jobsPerBatchTarget", w.jobsPerBatchTarget},
        {"minQubits", w.minQubits},
        {"maxQubits", w.maxQubits},
        {"minDepth", w.minDepth},
        {"maxDepth", w.maxDepth},
        {"cxDensity", w.cxDensity},
        {"shots", w.shots},
        {"preferenceProbability", w.preferenceProbability},
        {"sigmaMin", w.sigmaMin},
        {"sigmaMax", w.sigmaMax},
        {"estimatorPerLayerTime", w.estimatorPerLayerTime},
        {"estimatorPerShotReadout", w.estimatorPerShotReadout},
        {"loadMin", w.loadMin},
        {"loadMax", w.loadMax}}},
      {"config",
       {{"batchSize", c.batchSize},
        {"batchThreshold", c.batchThreshold},
        {"alpha", c.alpha},
        {"beta", c.beta},
        {"mu", c.mu},
        {"nu", c.nu},
        {"backfilling", c.backfilling},
        {"preference", preferenceName(c.preference)},
        {"scatter",
         {{"iterations", c.scatter.iterations},
          {"eliteSolutions", c.scatter.eliteSolutions},
          {"initializations", c.scatter.initializations},
          {"numSwaps", c.scatter.numSwaps},
          {"populationSize", c.scatter.populationSize},
          {"parallelism", c.scatter.parallelism}}},
        {"rl",
         {{"iterations", c.rl.train.iterations},
          {"episodesPerUpdate", c.rl.train.episodesPerUpdate},
          {"epochs", c.rl.train.epochs},
          {"clip", c.rl.train.clip},
          {"learningRate", c.rl.train.learningRate},
          {"valueLearningRate", c.rl.train.valueLearningRate},
          {"entropyBonus", c.rl.train.entropyBonus},
          {"gamma", c.rl.train.gamma},
          {"maxJobs", c.rl.maxJobs},
          {"maxSteps", c.rl.maxSteps}}}}},
      {"seeds",
       {{"workload", s.seeds.workload},
        {"prepopulate", s.seeds.prepopulate},
        {"scatter", s.seeds.scatter},
        {"rl", s.seeds.rl}}}};
}

bench::BenchmarkScenario scenarioFromJson(const Json& patch) {
  requireObject(patch, "");
  bench::BenchmarkScenario defaults;
  defaults.config = bench::defaultConfig();
  Json doc = scenarioWithoutMachines(defaults);
  Json machinesPatch = patch.contains("machines") ? patch.at("machines") : Json::array();
  Json rest = patch;
  rest.erase("machines");
  mergeStrict(doc, rest, "");

  bench::BenchmarkScenario s;
  s.name = field<std::string>(doc, "name", "");
  for (const auto& m : machinesFromJson(machinesPatch)) {
    s.machines.push_back({m.id, m.capacity, m.model});
  }

  const Json& w = doc.at("workload");
  const std::string wp = "workload";
  s.workload.batchCount = field<int>(w, "batchCount", wp);
  s.workload.jobsPerBatchTarget = field<int>(w, "jobsPerBatchTarget", wp);
  s.workload.minQubits = field<int>(w, "minQubits", wp);
  s.workload.maxQubits = field<int>(w, "maxQubits", wp);
  s.workload.minDepth = field<int>(w, "minDepth", wp);
  s.workload.maxDepth = field<int>(w, "maxDepth", wp);
  s.workload.cxDensity = field<double>(w, "cxDensity", wp);
  s.workload.shots = field<std::int64_t>(w, "shots", wp);
  s.workload.preferenceProbability = field<double>(w, "preferenceProbability", wp);
  s.workload.sigmaMin = field<double>(w, "sigmaMin", wp);
  s.workload.sigmaMax = field<double>(w, "sigmaMax", wp);
  s.workload.estimatorPerLayerTime = field<double>(w, "estimatorPerLayerTime", wp);
  s.workload.estimatorPerShotReadout = field<double>(w, "estimatorPerShotReadout", wp);
  s.workload.loadMin = field<double>(w, "loadMin", wp);
  s.workload.loadMax = field<double>(w, "loadMax", wp);

  const Json& c = doc.at("config");
  const std::string cp = "config";
  s.config.batchSize = field<int>(c, "batchSize", cp);
  s.config.batchThreshold = field<int>(c, "batchThreshold", cp);
  s.config.alpha = field<double>(c, "alpha", cp);
  s.config.beta = field<double>(c, "beta", cp);
  s.config.mu = field<double>(c, "mu", cp);
  s.config.nu = field<double>(c, "nu", cp);
  s.config.backfilling = field<bool>(c, "backfilling", cp);
  s.config.preference =
      preferenceFromName(field<std::string>(c, "preference", cp), "config.preference");

  const Json& sc = c.at("scatter");
  const std::string sp = "config.scatter";
  s.config.scatter.iterations = field<int>(sc, "iterations", sp);
  s.config.scatter.eliteSolutions = field<int>(sc, "eliteSolutions", sp);
  s.config.scatter.initializations = field<std::vector<std::string>>(sc, "initializations", sp);
  s.config.scatter.numSwaps = field<int>(sc, "numSwaps", sp);
  s.config.scatter.populationSize = field<int>(sc, "populationSize", sp);
  s.config.scatter.parallelism = field<int>(sc, "parallelism", sp);

  const Json& r = c.at("rl");
  const std::string rp = "config.rl";
  s.config.rl.train.iterations = field<int>(r, "iterations", rp);
  s.config.rl.train.episodesPerUpdate = field<int>(r, "episodesPerUpdate", rp);
  s.config.rl.train.epochs = field<int>(r, "epochs", rp);
  s.config.rl.train.clip = field<double>(r, "clip", rp);
  s.config.rl.train.learningRate = field<double>(r, "learningRate", rp);
  s.config.rl.train.valueLearningRate = field<double>(r, "valueLearningRate", rp);
  s.config.rl.train.entropyBonus = field<double>(r, "entropyBonus", rp);
  s.config.rl.train.gamma = field<double>(r, "gamma", rp);
  s.config.rl.maxJobs = field<std::size_t>(r, "maxJobs", rp);
  s.config.rl.maxSteps = field<int>(r, "maxSteps", rp);

  const Json& seeds = doc.at("seeds");
  s.seeds.workload = field<std::uint64_t>(seeds, "workload", "seeds");
  s.seeds.prepopulate = field<std::uint64_t>(seeds, "prepopulate", "seeds");
  s.seeds.scatter = field<std::uint64_t>(seeds, "scatter", "seeds");
  s.seeds.rl = field<std::uint64_t>(seeds, "rl", "seeds");
  return s;
}

void applyOverride(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override '" + assignment + "': expected path=value");
  }
  // machines[0].capacity and machines.0.capacity are the same path
  std::string path;
  for (const char ch : assignment.substr(0, eq)) {
    if (ch == '[') {
      path += '.';
    } else if (ch != ']') {
      path += ch;
    }
  }
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }

  Json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (key.empty()) {
      throw ValidationError("override '" + assignment + "': empty path segment");
    }
    Json* next = nullptr;
    if (node->is_array()) {
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
      if (ec != std::errc{} || ptr != key.data() + key.size() || index >= node->size()) {
        throw ValidationError(path + ": no element " + key);
      }
      next = &(*node)[index];
    } else if (node->is_object() && node->contains(key)) {
      next = &(*node)[key];
    } else {
      throw ValidationError(path + ": unknown field");
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    begin = dot + 1;
  }
}

bench::BenchmarkScenario loadScenario(const std::string& source,
                                      const std::vector<std::string>& overrides) {
  Json doc;
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) {
    doc = toJson(bench::builtinScenario(source.substr(prefix.size())));
  } else {
    doc = toJson(scenarioFromJson(readJsonFile(source)));
  }
  for (const auto& o : overrides) {
    applyOverride(doc, o);
  }
  auto scenario = scenarioFromJson(doc);
  scenario.validate();
  return scenario;
}

Json toJson(const rl::Policy& policy) {
  return {{"observationSize", policy.observationSize},
          {"actionCount", policy.actionCount},
          {"actionWeights", policy.actionWeights},
          {"valueWeights", policy.valueWeights}};
}

rl::Policy policyFromJson(const Json& doc) {
  requireObject(doc, "policy");
  rl::Policy p;
  p.observationSize = field<std::size_t>(doc, "observationSize", "policy");
  p.actionCount = field<std::size_t>(doc, "actionCount", "policy");
  p.actionWeights = field<std::vector<double>>(doc, "actionWeights", "policy");
  p.valueWeights = field<std::vector<double>>(doc, "valueWeights", "policy");
  if (p.actionWeights.size() != p.actionCount * (p.observationSize + 1) ||
      p.valueWeights.size() != p.observationSize + 1) {
    throw ValidationError("policy: weight sizes do not match the declared shape");
  }
  return p;
}

std::string renderCurveCsv(const std::vector<rl::CurvePoint>& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,mean_reward\n";
  for (const auto& p : curve) {
    out << p.iteration << ',' << p.meanReward << '\n';
  }
  return out.str();
}

} // namespace qsched
