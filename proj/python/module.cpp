#include "qsched/bench.hpp"
#include "qsched/circuit.hpp"
#include "qsched/cutting.hpp"
#include "qsched/errors.hpp"
#include "qsched/rl.hpp"
#include "qsched/schedulers.hpp"
#include "qsched/serialize.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using qsched::Json;

namespace {

// Documents cross the boundary as JSON text; the Python side decodes them.

std::string generateCircuit(int numQubits, int depth, double density, std::uint64_t seed) {
  return qsched::toJson(qsched::generateRandomCircuit(numQubits, depth, density, seed)).dump();
}

std::string estimateCut(const std::string& circuit, int maxA, int maxB, bool fragments) {
  const auto c = qsched::circuitFromJson(Json::parse(circuit));
  const auto plan = qsched::estimateCut(c, maxA, maxB);
  Json doc = qsched::toJson(plan);
  if (fragments) {
    const auto [a, b] = qsched::applyCutToCircuit(c, plan);
    doc["fragments"] = {qsched::toJson(a), qsched::toJson(b)};
  }
  return doc.dump();
}

std::string scheduleBatch(const std::string& batchDoc, const std::string& machinesDoc,
                          const std::string& algo, std::uint64_t seed, int iterations,
                          int rlIterations) {
  const auto machines = qsched::machinesFromJson(Json::parse(machinesDoc));
  const auto batch = qsched::batchFromJson(Json::parse(batchDoc), machines);
  qsched::Schedule schedule;
  {
    py::gil_scoped_release release;
    if (algo == "baseline" || algo == "binpack") {
      schedule = qsched::binpackSchedule(batch, machines);
    } else if (algo == "heuristic" || algo == "scatter") {
      qsched::ScatterConfig config;
      config.iterations = iterations;
      schedule = qsched::scatterSearch(batch, machines, config, seed).best.schedule;
    } else if (algo == "exact") {
      schedule = qsched::exactSchedule(batch, machines);
    } else if (algo == "rl") {
      auto factory = [&] { return qsched::rl::SchedulingEnv(batch, machines); };
      qsched::rl::TrainConfig config;
      config.iterations = rlIterations;
      const auto trained = qsched::rl::train(factory, config, seed);
      auto env = factory();
      schedule = qsched::rl::extractSchedule(trained.policy, env);
    } else {
      throw qsched::ValidationError("algo: expected baseline, heuristic, exact or rl");
    }
  }
  const auto eval = qsched::evaluate(schedule, machines);
  qsched::stampTimings(schedule, eval);
  return Json{{"schedule", qsched::toJson(schedule, machines)},
              {"evaluation", qsched::toJson(eval)}}
      .dump();
}

py::tuple runBenchmark(const std::string& scenario, const std::vector<std::string>& schedulers,
                       const std::vector<std::string>& overrides,
                       std::optional<std::uint64_t> seed, bool timing) {
  auto s = qsched::loadScenario(scenario, overrides);
  if (seed) {
    qsched::bench::reseed(s, *seed);
  }
  qsched::bench::BenchmarkReport report;
  {
    py::gil_scoped_release release;
    report = qsched::bench::runBenchmark(s, schedulers, {.timing = timing});
  }
  return py::make_tuple(qsched::bench::renderJson(report), qsched::bench::renderCsv(report));
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the qsched package";

  auto base = py::register_exception<qsched::Error>(m, "Error");
  py::register_exception<qsched::ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<qsched::InfeasibleCut>(m, "InfeasibleCut", base.ptr());
  py::register_exception<qsched::InfeasibleJob>(m, "InfeasibleJob", base.ptr());
  py::register_exception<qsched::InstanceTooLarge>(m, "InstanceTooLarge", base.ptr());
  py::register_exception<qsched::CapacityError>(m, "CapacityError", base.ptr());

  m.def("generate_circuit", &generateCircuit, py::arg("num_qubits"), py::arg("depth"),
        py::arg("density"), py::arg("seed"));
  m.def("estimate_cut", &estimateCut, py::arg("circuit"), py::arg("max_a"), py::arg("max_b"),
        py::arg("fragments") = false);
  m.def("schedule", &scheduleBatch, py::arg("batch"), py::arg("machines"), py::arg("algo"),
        py::arg("seed"), py::arg("iterations"), py::arg("rl_iterations"));
  m.def("run_benchmark", &runBenchmark, py::arg("scenario"), py::arg("schedulers"),
        py::arg("overrides"), py::arg("seed"), py::arg("timing"));
}
