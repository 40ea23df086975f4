#include "qsched/estimation.hpp"

#include "qsched/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qsched {

void EstimateModel::validate() const {
  if (perLayerTime < 0.0 || perShotReadout < 0.0 || baseSetup < 0.0 || fragmentSetup < 0.0) {
    throw ValidationError("estimate model coefficients must be non-negative");
  }
  if (!(noisePerQubitLayer > 0.0 && noisePerQubitLayer < 1.0)) {
    throw ValidationError("noisePerQubitLayer must lie in (0, 1)");
  }
}

int QueuedEntry::usedQubits() const {
  int used = 0;
  for (const auto& p : proxies) {
    used += p.q;
  }
  return used;
}

double Machine::queueLength() const {
  return queue.empty() ? loadOffset : queue.back().endTime;
}

Machine makeMachine(std::string id, int capacity, EstimateModel model) {
  if (capacity < 1) {
    throw ValidationError("machine capacity must be >= 1");
  }
  model.validate();
  Machine m;
  m.id = std::move(id);
  m.capacity = capacity;
  m.model = model;
  return m;
}

double clampNoise(double value) {
  if (!(value >= 0.0)) {
    return 0.0;
  }
  return value < 1.0 ? value : std::nextafter(1.0, 0.0);
}

double processingTime(int depth, std::int64_t shots, const EstimateModel& model) {
  if (depth < 1) {
    throw ValidationError("processing time needs depth >= 1");
  }
  if (shots < 0) {
    throw ValidationError("processing time needs a non-negative shot count");
  }
  return static_cast<double>(depth) * model.perLayerTime +
         static_cast<double>(shots) * model.perShotReadout;
}

double processingTime(const CircuitProxy& proxy, const Machine& machine) {
  if (proxy.q > machine.capacity) {
    throw CapacityError("job " + proxy.id + " needs " + std::to_string(proxy.q) +
                        " qubits but machine " + machine.id + " has " +
                        std::to_string(machine.capacity));
  }
  return processingTime(proxy.d, proxy.shots, machine.model);
}

double scaledProcessingTime(const CircuitProxy& parent, int fragmentDepth) {
  if (!parent.basePTime) {
    throw ValidationError("scaledProcessingTime: parent " + parent.id + " has no time estimate");
  }
  if (fragmentDepth < 1 || parent.d < 1) {
    throw ValidationError("scaledProcessingTime: depths must be >= 1");
  }
  if (fragmentDepth == parent.d) {
    return *parent.basePTime;
  }
  return *parent.basePTime * static_cast<double>(fragmentDepth) / static_cast<double>(parent.d);
}

std::optional<NoiseEstimate> baseNoise(int q, int d, const Machine& machine) {
  if (q > machine.capacity) {
    return std::nullopt;
  }
  const double exponent = static_cast<double>(q) * static_cast<double>(d);
  const double survive = std::pow(1.0 - machine.model.noisePerQubitLayer, exponent);
  return NoiseEstimate{clampNoise(1.0 - survive)};
}

NoiseEstimate extrapolatedNoise(const CircuitProxy& parent, int fragmentDepth,
                                std::span<const Machine> machines) {
  if (machines.empty()) {
    throw ValidationError("extrapolatedNoise: no machines");
  }
  if (fragmentDepth < 1 || parent.d < 1) {
    throw ValidationError("extrapolatedNoise: depths must be >= 1");
  }
  int maxCapacity = 0;
  for (const auto& m : machines) {
    maxCapacity = std::max(maxCapacity, m.capacity);
  }
  const int seedWidth = std::min(parent.q, maxCapacity);
  double worst = 0.0;
  for (const auto& m : machines) {
    if (const auto f = baseNoise(seedWidth, parent.d, m)) {
      worst = std::max(worst, f->value);
    }
  }
  const double ratio = static_cast<double>(fragmentDepth) / static_cast<double>(parent.d);
  return NoiseEstimate{clampNoise(worst * ratio)};
}

double setupTime(const CircuitProxy* prev, const CircuitProxy& next, const Machine& machine) {
  if (prev == nullptr) {
    return 0.0;
  }
  if (prev->parentId == next.parentId) {
    return machine.model.fragmentSetup;
  }
  return machine.model.baseSetup;
}

} // namespace qsched
