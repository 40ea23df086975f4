#pragma once

#include "qsched/circuit.hpp"
#include "qsched/machine.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace qsched {

/// Expected noise of a job, a value in [0, 1).
struct NoiseEstimate {
  double value = 0.0;
};

/// d * perLayerTime + shots * perShotReadout, without a capacity check.
/// Used for machine-independent reference estimates. Requires depth >= 1.
double processingTime(int depth, std::int64_t shots, const EstimateModel& model);

/// p(i, m). Throws CapacityError when the proxy is wider than the machine.
double processingTime(const CircuitProxy& proxy, const Machine& machine);

/// p_j = p_i * d_j / d_i for a fragment of depth d_j cut from parent i.
double scaledProcessingTime(const CircuitProxy& parent, int fragmentDepth);

/// f(i, m) = 1 - (1 - eps_m)^(q * d); no result when q exceeds the capacity.
std::optional<NoiseEstimate> baseNoise(int q, int d, const Machine& machine);
inline std::optional<NoiseEstimate> baseNoise(const CircuitProxy& proxy, const Machine& machine) {
  return baseNoise(proxy.q, proxy.d, machine);
}

/**
 * Noise of a fragment of depth fragmentDepth: the maximum base noise of the
 * parent over all machines, scaled by d_j / d_i. When the parent fits no
 * machine its noise is seeded from a sub-proxy as wide as the largest
 * machine with the parent's depth.
 */
NoiseEstimate extrapolatedNoise(const CircuitProxy& parent, int fragmentDepth,
                                std::span<const Machine> machines);

/// s(prev, next, m). Zero at the start of a chain, fragmentSetup between
/// fragments of the same parent, baseSetup otherwise.
double setupTime(const CircuitProxy* prev, const CircuitProxy& next, const Machine& machine);

/// Clamp into [0, 1).
double clampNoise(double value);

} // namespace qsched
