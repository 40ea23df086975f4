#include "qsched/bench.hpp"
#include "qsched/cutting.hpp"
#include "qsched/errors.hpp"
#include "qsched/rl.hpp"
#include "qsched/schedulers.hpp"
#include "qsched/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

struct BenchArgs {
  std::string scenario = "builtin:5-7";
  std::string schedulers = "baseline,heuristic,rl";
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string format = "json,csv";
  std::vector<std::string> overrides;
  bool noTiming = false;
};

int runBench(const BenchArgs& args) {
  auto scenario = qsched::loadScenario(args.scenario, args.overrides);
  if (args.seed) {
    qsched::bench::reseed(scenario, *args.seed);
  }
  std::vector<qsched::bench::ReportFormat> formats;
  for (const auto& f : splitList(args.format)) {
    if (f == "json") {
      formats.push_back(qsched::bench::ReportFormat::Json);
    } else if (f == "csv") {
      formats.push_back(qsched::bench::ReportFormat::Csv);
    } else {
      throw qsched::ValidationError("format: unknown format '" + f + "'");
    }
  }
  const auto report = qsched::bench::runBenchmark(scenario, splitList(args.schedulers),
                                                  {.timing = !args.noTiming});
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  for (const auto f : formats) {
    const bool csv = f == qsched::bench::ReportFormat::Csv;
    const auto path = dir / (csv ? "report.csv" : "report.json");
    qsched::bench::emitReport(report, f, path);
    std::cout << path.string() << '\n';
  }
  for (const auto& s : report.summaries) {
    std::cout << s.scheduler << ": mean pmax " << s.meanPmax << ", mean makespan "
              << s.meanMakespan << ", mean noise " << s.meanNoise;
    if (s.pmaxImprovement) {
      std::cout << ", pmax improvement " << *s.pmaxImprovement;
    }
    std::cout << '\n';
  }
  return 0;
}

struct CutArgs {
  std::string circuit;
  int maxA = 0;
  int maxB = 0;
  bool fragments = false;
};

int runCutEstimate(const CutArgs& args) {
  const auto circuit = qsched::circuitFromJson(qsched::readJsonFile(args.circuit));
  const auto plan = qsched::estimateCut(circuit, args.maxA, args.maxB);
  qsched::Json doc = qsched::toJson(plan);
  if (args.fragments) {
    const auto [a, b] = qsched::applyCutToCircuit(circuit, plan);
    doc["fragments"] = {qsched::toJson(a), qsched::toJson(b)};
  }
  std::cout << doc.dump(2) << '\n';
  return 0;
}

struct ScheduleArgs {
  std::string batch;
  std::string machines;
  std::string algo = "heuristic";
  std::uint64_t seed = 1;
  int iterations = 100;
  int rlIterations = 5000;
};

int runSchedule(const ScheduleArgs& args) {
  const auto machines = qsched::machinesFromJson(qsched::readJsonFile(args.machines));
  const auto batch = qsched::batchFromJson(qsched::readJsonFile(args.batch), machines);
  qsched::Schedule schedule;
  if (args.algo == "baseline" || args.algo == "binpack") {
    schedule = qsched::binpackSchedule(batch, machines);
  } else if (args.algo == "heuristic" || args.algo == "scatter") {
    qsched::ScatterConfig config;
    config.iterations = args.iterations;
    schedule = qsched::scatterSearch(batch, machines, config, args.seed).best.schedule;
  } else if (args.algo == "exact") {
    schedule = qsched::exactSchedule(batch, machines);
  } else if (args.algo == "rl") {
    auto factory = [&] { return qsched::rl::SchedulingEnv(batch, machines); };
    qsched::rl::TrainConfig config;
    config.iterations = args.rlIterations;
    const auto trained = qsched::rl::train(factory, config, args.seed);
    auto env = factory();
    schedule = qsched::rl::extractSchedule(trained.policy, env);
  } else {
    throw qsched::ValidationError("algo: expected baseline, heuristic, exact or rl");
  }
  const auto eval = qsched::evaluate(schedule, machines);
  qsched::stampTimings(schedule, eval);
  const qsched::Json doc{{"schedule", qsched::toJson(schedule, machines)},
                         {"evaluation", qsched::toJson(eval)}};
  std::cout << doc.dump(2) << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch scheduler for quantum circuits with circuit cutting"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* benchCmd = app.add_subcommand("bench", "Run schedulers on a benchmark scenario");
  benchCmd->add_option("--scenario", bench.scenario, "Scenario file or builtin:5-7 / builtin:5-5-7")
      ->capture_default_str();
  benchCmd->add_option("--schedulers", bench.schedulers, "Comma-separated scheduler list")
      ->capture_default_str();
  benchCmd->add_option("--seed", bench.seed, "Base seed for all random streams");
  benchCmd->add_option("--out", bench.out, "Output directory")->capture_default_str();
  benchCmd->add_option("--format", bench.format, "json, csv or both")->capture_default_str();
  benchCmd->add_option("--set", bench.overrides, "Override a scenario key, e.g. config.alpha=2");
  benchCmd->add_flag("--no-timing", bench.noTiming, "Write zero runtimes for reproducible reports");

  CutArgs cut;
  auto* cutCmd = app.add_subcommand("cut-estimate", "Find the cheapest gate-cut bipartition");
  cutCmd->add_option("--circuit", cut.circuit, "Circuit JSON file")->required();
  cutCmd->add_option("--max-a", cut.maxA, "Largest block A")->required();
  cutCmd->add_option("--max-b", cut.maxB, "Largest block B")->required();
  cutCmd->add_flag("--fragments", cut.fragments, "Also print the fragment circuits");

  ScheduleArgs sched;
  auto* schedCmd = app.add_subcommand("schedule", "Schedule one batch");
  schedCmd->add_option("--batch", sched.batch, "Job list JSON file")->required();
  schedCmd->add_option("--machines", sched.machines, "Machine list JSON file")->required();
  schedCmd->add_option("--algo", sched.algo, "baseline, heuristic, exact or rl")
      ->capture_default_str();
  schedCmd->add_option("--seed", sched.seed, "Seed")->capture_default_str();
  schedCmd->add_option("--iterations", sched.iterations, "Scatter search iterations")
      ->capture_default_str();
  schedCmd->add_option("--rl-iterations", sched.rlIterations, "Policy updates")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (benchCmd->parsed()) {
      return runBench(bench);
    }
    if (cutCmd->parsed()) {
      return runCutEstimate(cut);
    }
    return runSchedule(sched);
  } catch (const qsched::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
