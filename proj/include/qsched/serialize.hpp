#pragma once

#include "qsched/bench.hpp"
#include "qsched/circuit.hpp"
#include "qsched/cutting.hpp"
#include "qsched/machine.hpp"
#include "qsched/rl.hpp"
#include "qsched/schedule.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qsched {

using Json = nlohmann::json;

/// Parses a file; throws ValidationError on I/O or syntax errors.
Json readJsonFile(const std::filesystem::path& path);

/// {"id", "numQubits", "gates": [{"kind": "single"|"cx", "qubits": [...]}]}
Json toJson(const Circuit& circuit);
Circuit circuitFromJson(const Json& doc);

Json toJson(const CutPlan& plan);
Json toJson(const EvaluationResult& result);
Json toJson(const CircuitProxy& proxy);

/// Jobs grouped by machine and timeslot, with timings and recorded cuts.
Json toJson(const Schedule& schedule, std::span<const Machine> machines);

/// Device queue of one machine.
Json queueToJson(const Machine& machine);

/**
 * Machine list: [{"id", "capacity", "loadOffset"?, "model"?: {...}}].
 * Missing model coefficients take their defaults.
 */
std::vector<Machine> machinesFromJson(const Json& doc);

/**
 * Job list: [{"circuit": {...}, "tau"?, "sigma"?, "rho"?, "shots"?,
 * "basePTime"?, "baseNoise"?}]. Missing estimates are computed from the
 * default reference coefficients and the given machines.
 */
std::vector<CircuitProxy> batchFromJson(const Json& doc, std::span<const Machine> machines);

Json toJson(const bench::BenchmarkScenario& scenario);

/**
 * Reads a scenario on top of the defaults. Unknown keys and ill-typed values
 * raise ValidationError naming the field path.
 */
bench::BenchmarkScenario scenarioFromJson(const Json& doc);

/// Applies "a.b.c=value" overrides; the value is parsed as JSON when
/// possible and taken as a string otherwise.
void applyOverride(Json& doc, const std::string& assignment);

/**
 * Resolves "builtin:<name>" or a scenario file path, then applies the
 * overrides and validates the result.
 */
bench::BenchmarkScenario loadScenario(const std::string& source,
                                      const std::vector<std::string>& overrides = {});

Json toJson(const rl::Policy& policy);
rl::Policy policyFromJson(const Json& doc);

/// "iteration,mean_reward" rows.
std::string renderCurveCsv(const std::vector<rl::CurvePoint>& curve);

} // namespace qsched
